#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "errors.hpp"
#include "kernels.hpp"
#include "numeric.hpp"
#include "optimize.hpp"
#include "parallel.hpp"
#include "potential.hpp"
#include "tilted.hpp"

namespace gibbsdyn {

enum class GibbsAtTc { gibbs, non_gibbs, unknown };
enum class Method { automatic, second_derivative, phi2_scan };

inline const char* to_string(GibbsAtTc g) {
  switch (g) {
    case GibbsAtTc::gibbs: return "gibbs";
    case GibbsAtTc::non_gibbs: return "non_gibbs";
    case GibbsAtTc::unknown: return "unknown";
  }
  return "?";
}

inline const char* to_string(Method m) {
  switch (m) {
    case Method::automatic: return "automatic";
    case Method::second_derivative: return "second_derivative";
    case Method::phi2_scan: return "phi2_scan";
  }
  return "?";
}

struct ClassifyConfig {
  double unbounded_threshold = -1e6;  ///< curvature (in units of V'') below this means unbounded below
  double probe_radius = 1280.0;       ///< extended window for the unboundedness probe
  double probe_step = 1e-3;
  std::size_t curvature_grid = 65537;
  std::size_t phi2_base = 256;
  int phi2_refinements = 2;
  int phi2_max_levels = 10;
  double tc_value_band = 1e-8;        ///< V'' within this of its infimum counts as attaining it
  double tc_interval_length = 1e-3;   ///< a component this long is an interval, not a point
  double tc_grid_step = 1e-4;
  bool find_witness = true;
  double witness_window = 8.0;
  std::size_t witness_grid = 161;
  ToleranceConfig tol{};
};

struct Witness {
  double t_probe;
  double alpha;
  MinimiserSet minimisers;
};

struct ClassificationReport {
  double beta = num::kNaN;           ///< -1/2 inf V'' (or -inf Phi2 V); +inf when unbounded below
  double t_c = num::kNaN;            ///< 1 / (2 beta - 1), +inf for beta <= 1/2, 0 for beta = +inf
  std::optional<GibbsAtTc> gibbs_at_tc;  ///< empty when t_c is 0 or infinite
  std::optional<Witness> witness;
  Method method = Method::second_derivative;
  double argmin = num::kNaN;         ///< where the curvature infimum is attained on the window
  bool infimum_at_window_edge = false;
};

inline double crossover_from_beta(double beta) {
  if (std::isinf(beta) && beta > 0) return 0.0;
  if (beta <= 0.5) return num::kInf;
  return 1.0 / (2.0 * beta - 1.0);
}

struct Phi2Extremum {
  double value = num::kInf;
  double x = num::kNaN, y = num::kNaN, z = num::kNaN;
};

namespace detail {

// Rounding noise of a second difference quotient built from values fx, fy, fz.
inline double phi2_noise(double fx, double fy, double fz, double x, double y, double z) {
  const double eps = std::numeric_limits<double>::epsilon();
  return 4.0 * eps * (std::abs(fx) + std::abs(fy) + std::abs(fz)) / std::min(y - x, z - y) / (z - x);
}

inline bool phi2_reliable(double value, double noise) { return std::isfinite(value) && noise <= 1e-4 * std::max(1.0, std::abs(value)); }

}  // namespace detail

/// Minimum of the second difference quotient over all triples of a grid of `base` points on
/// [lo, hi], then over grids concentrated around the minimising triple.
template <class F>
Phi2Extremum phi2_triple_scan(const F& f, double lo, double hi, std::size_t base = 256, int refinements = 2,
                              int max_levels = 10, double stop_below = -1e6) {
  Phi2Extremum best;
  double wlo = lo, whi = hi;
  for (int level = 0; level < max_levels; ++level) {
    const auto xs = num::linspace(wlo, whi, base);
    std::vector<double> fs(base);
    for (std::size_t i = 0; i < base; ++i) fs[i] = f(xs[i]);
    std::vector<Phi2Extremum> per_outer(base);
    parallel_for(base, [&](std::size_t i) {
      Phi2Extremum local;
      for (std::size_t j = i + 1; j < base; ++j) {
        const double s1 = (fs[j] - fs[i]) / (xs[j] - xs[i]);
        for (std::size_t k = j + 1; k < base; ++k) {
          const double v = ((fs[k] - fs[j]) / (xs[k] - xs[j]) - s1) / (xs[k] - xs[i]);
          if (v < local.value && detail::phi2_reliable(v, detail::phi2_noise(fs[i], fs[j], fs[k], xs[i], xs[j], xs[k])))
            local = {v, xs[i], xs[j], xs[k]};
        }
      }
      per_outer[i] = local;
    });
    Phi2Extremum level_best;
    for (const auto& p : per_outer)
      if (p.value < level_best.value) level_best = p;
    const double previous = best.value;
    if (level_best.value < best.value) best = level_best;
    if (best.value < stop_below) break;
    if (level >= refinements) {
      const bool diverging = best.value < 0.0 && std::isfinite(previous) && best.value < 2.0 * previous;
      if (!diverging) break;
    }
    if (!std::isfinite(level_best.value)) break;
    const double h = xs[1] - xs[0];
    wlo = std::max(lo, level_best.x - h);
    whi = std::min(hi, level_best.z + h);
  }
  return best;
}

namespace detail {

// True when some second difference quotient (in units of V'', i.e. 2 Phi2) on the extended window
// falls below the threshold.
inline bool curvature_unbounded(const PotentialSpec& v, const ClassifyConfig& cfg, bool use_second_derivative) {
  const std::size_t n = static_cast<std::size_t>(2.0 * cfg.probe_radius / cfg.probe_step) + 1;
  const auto xs = num::linspace(-cfg.probe_radius, cfg.probe_radius, n);
  if (use_second_derivative) {
    for (double x : xs) {
      const double c = v.d2(x);
      if (std::isfinite(c) && c < cfg.unbounded_threshold) return true;
    }
    return false;
  }
  double f0 = v.eval(xs[0]), f1 = v.eval(xs[1]);
  for (std::size_t i = 2; i < n; ++i) {
    const double f2 = v.eval(xs[i]);
    const double p = ((f2 - f1) / (xs[i] - xs[i - 1]) - (f1 - f0) / (xs[i - 1] - xs[i - 2])) / (xs[i] - xs[i - 2]);
    if (2.0 * p < cfg.unbounded_threshold && phi2_reliable(p, phi2_noise(f0, f1, f2, xs[i - 2], xs[i - 1], xs[i])))
      return true;
    f0 = f1;
    f1 = f2;
  }
  return false;
}

// Searches outward from alpha = 0 for a bad magnetisation at time t.
inline std::optional<Witness> find_witness(const PotentialSpec& v, double t, const ClassifyConfig& cfg) {
  const std::size_t half = cfg.witness_grid / 2;
  const double step = cfg.witness_window / static_cast<double>(std::max<std::size_t>(half, 1));
  for (int sign : {1, -1}) {
    std::optional<MinimiserSet> prev;
    double prev_alpha = 0.0;
    for (std::size_t i = 0; i <= half; ++i) {
      const double alpha = sign * step * static_cast<double>(i);
      MinimiserSet ms = global_minimisers(TiltedRate(v, t, alpha), cfg.tol);
      if (ms.multiple) return Witness{t, alpha, ms};
      if (prev) {
        const double lo = std::min(prev_alpha, alpha), hi = std::max(prev_alpha, alpha);
        const auto scan = bad_set_scan(v, t, lo, hi, 2, cfg.tol);
        if (!scan.empty()) {
          const auto& iv = scan.intervals.front();
          const double a = 0.5 * (iv.lo + iv.hi);
          MinimiserSet at = global_minimisers(TiltedRate(v, t, a), cfg.tol);
          if (!at.multiple) {
            at.locations = {iv.q_left, iv.q_right};
            at.q_min = iv.q_left;
            at.q_max = iv.q_right;
            at.multiple = true;
          }
          return Witness{t, a, at};
        }
      }
      prev = ms;
      prev_alpha = alpha;
    }
  }
  return std::nullopt;
}

}  // namespace detail

/// Decides the status exactly at t_c from the shape of the set where V'' attains its infimum:
/// isolated points give gibbs, an interval gives non_gibbs.
inline GibbsAtTc gibbs_at_tc_from_curvature(const PotentialSpec& v, double inf_curvature, bool at_edge,
                                             const ClassifyConfig& cfg = {}) {
  if (v.smoothness() != Smoothness::C2_analytic) return GibbsAtTc::unknown;
  if (at_edge) return GibbsAtTc::unknown;
  const double R = v.window();
  const double band = inf_curvature + cfg.tc_value_band;
  const std::size_t n = static_cast<std::size_t>(2.0 * R / cfg.tc_grid_step) + 1;
  const auto xs = num::linspace(-R, R, n);
  const auto above = [&](double x) { return v.d2(x) - band; };
  double longest = 0.0;
  bool any = false;
  std::size_t i = 0;
  while (i < n) {
    if (above(xs[i]) > 0.0) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < n && above(xs[j + 1]) <= 0.0) ++j;
    if (i == 0 || j == n - 1) return GibbsAtTc::unknown;
    any = true;
    const double left = num::bisect(above, xs[i - 1], xs[i], 1e-12);
    const double right = num::bisect(above, xs[j], xs[j + 1], 1e-12);
    longest = std::max(longest, right - left);
    i = j + 1;
  }
  if (longest >= cfg.tc_interval_length) return GibbsAtTc::non_gibbs;
  (void)any;
  return GibbsAtTc::gibbs;
}

/// Crossover time of the potential, with the curvature bound it derives from.
inline ClassificationReport crossover_time(const PotentialSpec& v, Method method = Method::automatic,
                                           const ClassifyConfig& cfg = {}) {
  if (method == Method::automatic)
    method = v.smoothness() == Smoothness::C2_analytic ? Method::second_derivative : Method::phi2_scan;
  if (method == Method::second_derivative && v.smoothness() != Smoothness::C2_analytic)
    throw NotApplicableError("crossover_time: second_derivative method needs a C2 potential");

  ClassificationReport rep;
  rep.method = method;
  const double R = v.window();
  double inf_curv;  // in units of V''
  if (method == Method::second_derivative) {
    ToleranceConfig tol = cfg.tol;
    tol.coarse_n = cfg.curvature_grid;
    const auto curv = [&v](double x) { return v.d2(x); };
    const GlobalMinimumResult res = global_minima(curv, -R, R, tol);
    inf_curv = res.value;
    rep.argmin = res.locations.front();
    const double h = 2.0 * R / static_cast<double>(cfg.curvature_grid - 1);
    for (double q : res.locations)
      if (std::abs(std::abs(q) - R) <= 1.5 * h) rep.infimum_at_window_edge = true;
  } else {
    const auto f = [&v](double x) { return v.eval(x); };
    const Phi2Extremum ex = phi2_triple_scan(f, -R, R, cfg.phi2_base, cfg.phi2_refinements, cfg.phi2_max_levels,
                                             0.5 * cfg.unbounded_threshold);
    inf_curv = 2.0 * ex.value;
    rep.argmin = ex.y;
    const double h = 2.0 * R / static_cast<double>(cfg.phi2_base - 1);
    rep.infimum_at_window_edge = std::abs(std::abs(ex.x) - R) < 0.5 * h || std::abs(std::abs(ex.z) - R) < 0.5 * h;
  }

  bool unbounded = inf_curv < cfg.unbounded_threshold;
  if (!unbounded) unbounded = detail::curvature_unbounded(v, cfg, method == Method::second_derivative);
  if (!unbounded && rep.infimum_at_window_edge && v.family() == Family::custom_table)
    throw InconclusiveError("crossover_time: the curvature infimum " + std::to_string(inf_curv) +
                            " is attained at the edge of the window [-" + std::to_string(R) + ", " +
                            std::to_string(R) + "]; extend the table or the window");

  rep.beta = unbounded ? num::kInf : -0.5 * inf_curv + 0.0;
  rep.t_c = crossover_from_beta(rep.beta);
  if (rep.t_c > 0.0 && std::isfinite(rep.t_c)) {
    rep.gibbs_at_tc = method == Method::second_derivative
                          ? gibbs_at_tc_from_curvature(v, inf_curv, rep.infimum_at_window_edge, cfg)
                          : GibbsAtTc::unknown;
  }
  if (cfg.find_witness && rep.t_c < num::kInf) {
    const double t_probe = rep.t_c > 0.0 ? 2.0 * rep.t_c : 1.0;
    rep.witness = detail::find_witness(v, t_probe, cfg);
  }
  return rep;
}

/// Status exactly at the crossover time.
inline GibbsAtTc gibbs_at_tc(const PotentialSpec& v, const ClassifyConfig& cfg = {}) {
  ClassifyConfig quiet = cfg;
  quiet.find_witness = false;
  const ClassificationReport rep = crossover_time(v, Method::automatic, quiet);
  if (!(rep.t_c > 0.0) || !std::isfinite(rep.t_c))
    throw NotApplicableError("gibbs_at_tc: t_c is " + std::string(rep.t_c == 0.0 ? "0" : "infinite"));
  return *rep.gibbs_at_tc;
}

namespace detail {

// Points where a continuous, non-differentiable potential has corners.
inline std::vector<double> corners(const PotentialSpec& v) {
  if (v.family() == Family::abs) return {0.0};
  std::vector<double> out;
  if (v.family() == Family::custom_table && v.interpolation() == Interpolation::linear) {
    const auto& r = v.table_r();
    const auto& y = v.table_v();
    for (std::size_t i = 1; i + 1 < r.size(); ++i) {
      const double left = (y[i] - y[i - 1]) / (r[i] - r[i - 1]);
      const double right = (y[i + 1] - y[i]) / (r[i + 1] - r[i]);
      if (std::abs(right - left) > 1e-9 * std::max(1.0, std::abs(left))) out.push_back(r[i]);
    }
  }
  return out;
}

}  // namespace detail

/// Sequential Gibbsianness at time t. At t = 0 a differentiable potential is Gibbs; otherwise the
/// initial kernel is probed on both sides of every corner at n = 10^4.
inline bool gibbs_at(const PotentialSpec& v, double t, const ClassifyConfig& cfg = {}) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw DomainError("gibbs_at: t must be finite and >= 0");
  if (t == 0.0) {
    if (v.is_c1()) return true;
    const std::size_t n = 10000;
    const double shift = 1.0 / std::sqrt(static_cast<double>(n - 1));
    for (double c : detail::corners(v)) {
      const double below = initial_kernel(v, n, c - shift).mean;
      const double above = initial_kernel(v, n, c + shift).mean;
      if (std::abs(below - above) > 0.1) return false;
    }
    return true;
  }
  ClassifyConfig quiet = cfg;
  quiet.find_witness = false;
  const ClassificationReport rep = crossover_time(v, Method::automatic, quiet);
  if (rep.t_c == 0.0) return false;
  if (std::isinf(rep.t_c)) return true;
  if (std::abs(t - rep.t_c) <= 1e-9 * rep.t_c) {
    const GibbsAtTc g = rep.gibbs_at_tc.value_or(GibbsAtTc::unknown);
    if (g == GibbsAtTc::unknown) throw InconclusiveError("gibbs_at: t equals t_c and the status at t_c is unknown");
    return g == GibbsAtTc::gibbs;
  }
  return t < rep.t_c;
}

/// True when no sampled chord through y passes above f, i.e. min Phi2 f(x, y, z) >= -1e-10 over
/// grid points x < y < z. Grid points within 1e-9 (relative) of y are skipped.
template <class F>
bool supporting_point(const F& f, double y, const std::vector<double>& grid) {
  std::vector<double> left, right;
  const double gap = 1e-9 * std::max(1.0, std::abs(y));
  for (double g : grid) {
    if (g < y - gap) left.push_back(g);
    if (g > y + gap) right.push_back(g);
  }
  if (left.empty() || right.empty()) throw ConfigError("supporting_point: grid must have points on both sides of y");
  const double fy = f(y);
  std::vector<double> fl(left.size()), fr(right.size());
  for (std::size_t i = 0; i < left.size(); ++i) fl[i] = f(left[i]);
  for (std::size_t i = 0; i < right.size(); ++i) fr[i] = f(right[i]);
  double worst = num::kInf;
  for (std::size_t i = 0; i < left.size(); ++i)
    for (std::size_t k = 0; k < right.size(); ++k) {
      const double v = ((fr[k] - fy) / (right[k] - y) - (fy - fl[i]) / (y - left[i])) / (right[k] - left[i]);
      worst = std::min(worst, v);
    }
  return worst >= -1e-10;
}

struct TieCriterionResult {
  bool multiple_minimisers;  ///< some alpha gives f + beta x^2 - alpha x two non-adjacent grid minimisers
  bool phi2_below;           ///< some grid triple has Phi2 f <= -beta
  bool agree() const { return multiple_minimisers == phi2_below; }
};

/// Brute-force check of the equivalence between tied minimisers of quadratically tilted f and
/// second difference quotients of f reaching -beta, on a uniform grid.
template <class F>
TieCriterionResult tie_criterion_check(const F& f, double beta, double lo, double hi, std::size_t grid_n) {
  if (!(lo < hi)) throw ConfigError("tie_criterion_check: empty window");
  if (grid_n < 3) throw ConfigError("tie_criterion_check: grid_n must be >= 3");
  const auto xs = num::linspace(lo, hi, grid_n);
  std::vector<double> fv(grid_n), tilted(grid_n);
  double scale = 1.0;
  for (std::size_t i = 0; i < grid_n; ++i) {
    fv[i] = f(xs[i]);
    tilted[i] = fv[i] + beta * xs[i] * xs[i];
    scale = std::max(scale, std::abs(tilted[i]));
  }
  const double tol = 1e-12 * scale;

  TieCriterionResult res{false, false};
  for (std::size_t i = 0; i < grid_n && !res.multiple_minimisers; ++i)
    for (std::size_t j = i + 2; j < grid_n && !res.multiple_minimisers; ++j) {
      const double slope = (tilted[j] - tilted[i]) / (xs[j] - xs[i]);
      const double level = tilted[i] - slope * xs[i];
      bool below = true;
      for (std::size_t k = 0; k < grid_n && below; ++k)
        if (tilted[k] - slope * xs[k] < level - tol) below = false;
      if (below) res.multiple_minimisers = true;
    }
  for (std::size_t i = 0; i < grid_n && !res.phi2_below; ++i)
    for (std::size_t j = i + 1; j < grid_n && !res.phi2_below; ++j)
      for (std::size_t k = j + 1; k < grid_n; ++k) {
        const double p = ((fv[k] - fv[j]) / (xs[k] - xs[j]) - (fv[j] - fv[i]) / (xs[j] - xs[i])) / (xs[k] - xs[i]);
        if (p <= -beta) {
          res.phi2_below = true;
          break;
        }
      }
  return res;
}

}  // namespace gibbsdyn
