#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "errors.hpp"
#include "numeric.hpp"
#include "optimize.hpp"
#include "parallel.hpp"
#include "potential.hpp"

namespace gibbsdyn {

/// The two-layer objective r -> V(r) + r^2/2 + (r - alpha)^2 / (2t).
class TiltedRate {
 public:
  TiltedRate(PotentialSpec potential, double t, double alpha) : potential_(std::move(potential)), t_(t), alpha_(alpha) {
    if (!(t > 0.0) || !std::isfinite(t)) throw DomainError("tilted rate: t must be positive and finite");
    if (!std::isfinite(alpha)) throw DomainError("tilted rate: alpha must be finite");
  }

  const PotentialSpec& potential() const { return potential_; }
  double t() const { return t_; }
  double alpha() const { return alpha_; }

  /// Centre alpha/(1+t) and curvature (1+t)/(2t) of the quadratic part.
  double centre() const { return alpha_ / (1.0 + t_); }
  double curvature() const { return (1.0 + t_) / (2.0 * t_); }
  /// alpha^2 / (2(1+t)): the gap between eval_rate and rate_function.
  double offset() const { return alpha_ * alpha_ / (2.0 * (1.0 + t_)); }

  double eval_rate(double r) const {
    if (!std::isfinite(r)) throw DomainError("eval_rate: non-finite argument");
    const double d = r - alpha_;
    return potential_.eval(r) + 0.5 * r * r + d * d / (2.0 * t_);
  }

  /// V(r) + (r - alpha/(1+t))^2 (1+t)/(2t).
  double rate_function(double r) const {
    const double d = r - centre();
    return potential_.eval(r) + curvature() * d * d;
  }

  /// d/dr of eval_rate; requires a differentiable potential.
  double slope(double r) const { return potential_.d1(r) + r + (r - alpha_) / t_; }

 private:
  PotentialSpec potential_;
  double t_;
  double alpha_;
};

/// Global minimisers of eval_rate.
struct MinimiserSet {
  std::vector<double> locations;
  double value = num::kNaN;  ///< min of eval_rate, i.e. C_{t,alpha}
  bool multiple = false;
  double q_min = num::kNaN;
  double q_max = num::kNaN;
  bool indeterminate = false;
  double runner_up_value = num::kNaN;
  double window_lo = num::kNaN;
  double window_hi = num::kNaN;
  double max_foc_residual = 0.0;  ///< largest |slope| over the locations (0 when V is not C1)
};

/// Global minimisation of eval_rate over the truncation window outside of which
/// the quadratic part alone exceeds the best value found plus the configured margin.
inline MinimiserSet global_minimisers(const TiltedRate& tr, const ToleranceConfig& tol = {}) {
  tol.validate();
  const double a = tr.centre(), c = tr.curvature(), K = tr.offset() + tr.potential().lower_bound();
  const auto f = [&tr](double r) { return tr.eval_rate(r); };
  std::function<double(double)> fprime;
  if (tr.potential().is_c1()) fprime = [&tr](double r) { return tr.slope(r); };

  double best = tr.eval_rate(a);
  double radius = std::sqrt(std::max(0.0, best - K + tol.window_margin) / c);
  GlobalMinimumResult res;
  for (int pass = 0; pass < 3; ++pass) {
    res = global_minima(f, a - radius, a + radius, tol, fprime);
    best = std::min(best, res.value);
    const double shrunk = std::sqrt(std::max(0.0, best - K + tol.window_margin) / c);
    if (shrunk > 0.9 * radius) break;
    radius = shrunk;
  }

  MinimiserSet out;
  out.locations = res.locations;
  out.value = res.value;
  out.multiple = out.locations.size() >= 2;
  out.q_min = out.locations.front();
  out.q_max = out.locations.back();
  out.indeterminate = res.indeterminate;
  out.runner_up_value = res.runner_up_value;
  out.window_lo = a - radius;
  out.window_hi = a + radius;
  if (fprime)
    for (double q : out.locations) out.max_foc_residual = std::max(out.max_foc_residual, std::abs(fprime(q)));
  return out;
}

enum class Verdict { good, bad, indeterminate };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::good: return "good";
    case Verdict::bad: return "bad";
    case Verdict::indeterminate: return "indeterminate";
  }
  return "?";
}

struct Badness {
  bool bad = false;
  Verdict verdict = Verdict::good;
  MinimiserSet minimisers;
};

inline Badness is_bad(const PotentialSpec& potential, double t, double alpha, const ToleranceConfig& tol = {}) {
  if (!(t > 0.0)) throw DomainError("is_bad: t must be > 0");
  Badness b;
  b.minimisers = global_minimisers(TiltedRate(potential, t, alpha), tol);
  b.bad = b.minimisers.multiple;
  b.verdict = b.bad ? Verdict::bad : (b.minimisers.indeterminate ? Verdict::indeterminate : Verdict::good);
  return b;
}

struct ScanRow {
  double alpha;
  std::size_t n_minimisers;
  double q_min;
  double q_max;
  double value;
  Verdict verdict;
};

/// A bad interval [lo, hi]; degenerate intervals mark isolated bad magnetisations.
struct BadInterval {
  double lo;
  double hi;
  bool degenerate;
  double q_left;   ///< smallest global minimiser on the left edge
  double q_right;  ///< largest global minimiser on the right edge
  bool from_jump;  ///< located between grid points from a jump of the minimiser
};

struct BadSetScan {
  double t = num::kNaN;
  std::vector<ScanRow> rows;
  std::vector<BadInterval> intervals;
  bool empty() const { return intervals.empty(); }
};

struct ScanConfig {
  double endpoint_width = 1e-6;    ///< bisection width for interval endpoints
  double jump_width = 1e-9;        ///< bisection width when resolving a minimiser jump
  double jump_threshold = 1e-4;    ///< a gap in the minimiser larger than this after bisection is a jump
  double jump_dominance = 2.0;     ///< a pair is bisected only if its gap exceeds this multiple of its neighbours' gaps
};

namespace detail {

inline bool bad_at(const PotentialSpec& p, double t, double alpha, const ToleranceConfig& tol) {
  return global_minimisers(TiltedRate(p, t, alpha), tol).multiple;
}

// Moves from a good point toward a bad point until the bracket is narrower than width; returns the bad end.
inline double refine_edge(const PotentialSpec& p, double t, double good, double bad, double width,
                          const ToleranceConfig& tol) {
  while (std::abs(bad - good) > width) {
    const double mid = 0.5 * (good + bad);
    if (mid == good || mid == bad) break;
    (bad_at(p, t, mid, tol) ? bad : good) = mid;
  }
  return bad;
}

}  // namespace detail

/// Scans alpha over [lo, hi] for bad magnetisations. Grid points that are bad are merged into
/// intervals whose edges are refined by bisection; between two good grid points a jump of the
/// (monotone) global minimiser is bisected down to an isolated bad magnetisation.
inline BadSetScan bad_set_scan(const PotentialSpec& potential, double t, double lo, double hi, std::size_t grid_n,
                               const ToleranceConfig& tol = {}, const ScanConfig& scan = {}) {
  if (!(t > 0.0)) throw DomainError("bad_set_scan: t must be > 0");
  if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi)) throw ConfigError("bad_set_scan: empty window");
  if (grid_n < 2) throw ConfigError("bad_set_scan: grid_n must be >= 2");
  tol.validate();
  const std::vector<double> alphas = num::linspace(lo, hi, grid_n);
  std::vector<MinimiserSet> sets(grid_n);
  parallel_for(grid_n, [&](std::size_t i) { sets[i] = global_minimisers(TiltedRate(potential, t, alphas[i]), tol); });

  BadSetScan out;
  out.t = t;
  for (std::size_t i = 0; i < grid_n; ++i) {
    const auto& m = sets[i];
    const Verdict v = m.multiple ? Verdict::bad : (m.indeterminate ? Verdict::indeterminate : Verdict::good);
    out.rows.push_back({alphas[i], m.locations.size(), m.q_min, m.q_max, m.value, v});
  }

  std::vector<std::optional<BadInterval>> found(grid_n);
  parallel_for(grid_n, [&](std::size_t i) {
    const bool bad_i = sets[i].multiple;
    if (bad_i) {
      const bool run_start = i == 0 || !sets[i - 1].multiple;
      if (!run_start) return;
      std::size_t j = i;
      while (j + 1 < grid_n && sets[j + 1].multiple) ++j;
      double left = alphas[i], right = alphas[j];
      if (i > 0) left = detail::refine_edge(potential, t, alphas[i - 1], alphas[i], scan.endpoint_width, tol);
      if (j + 1 < grid_n) right = detail::refine_edge(potential, t, alphas[j + 1], alphas[j], scan.endpoint_width, tol);
      const auto ml = global_minimisers(TiltedRate(potential, t, left), tol);
      const auto mr = global_minimisers(TiltedRate(potential, t, right), tol);
      found[i] = BadInterval{left, right, right - left <= scan.endpoint_width, ml.q_min, mr.q_max, false};
      return;
    }
    if (i + 1 >= grid_n || sets[i + 1].multiple) return;
    const auto gap = [&](std::size_t k) {
      return k + 1 < grid_n && !sets[k].multiple && !sets[k + 1].multiple ? sets[k + 1].q_min - sets[k].q_max : 0.0;
    };
    const double here = gap(i);
    if (here <= scan.jump_threshold) return;
    const double around = std::max(i > 0 ? gap(i - 1) : 0.0, gap(i + 1));
    if (here <= scan.jump_dominance * around) return;
    double a = alphas[i], b = alphas[i + 1];
    double qa = sets[i].q_max, qb = sets[i + 1].q_min;
    while (b - a > scan.jump_width && qb - qa > scan.jump_threshold) {
      const double mid = 0.5 * (a + b);
      if (mid == a || mid == b) break;
      const auto mm = global_minimisers(TiltedRate(potential, t, mid), tol);
      if (mm.multiple) {
        found[i] = BadInterval{mid, mid, true, mm.q_min, mm.q_max, true};
        return;
      }
      if (mm.q_min - qa >= qb - mm.q_max) {
        b = mid;
        qb = mm.q_min;
      } else {
        a = mid;
        qa = mm.q_max;
      }
    }
    if (qb - qa > scan.jump_threshold) found[i] = BadInterval{a, b, true, qa, qb, true};
  });
  for (auto& f : found)
    if (f) out.intervals.push_back(*f);
  return out;
}

/// Inf-convolution V_t(r) = inf_s [V(s) + (s - r/(1+t))^2 (1+t)/(2t)].
inline double limiting_potential(const PotentialSpec& potential, double t, double r, const ToleranceConfig& tol = {}) {
  if (!(t > 0.0)) throw DomainError("limiting_potential: t must be > 0");
  const TiltedRate tr(potential, t, r);
  return global_minimisers(tr, tol).value - tr.offset();
}

}  // namespace gibbsdyn
