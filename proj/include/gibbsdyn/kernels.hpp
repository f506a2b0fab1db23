#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "log.hpp"
#include "numeric.hpp"
#include "parallel.hpp"
#include "potential.hpp"
#include "quadrature.hpp"
#include "tilted.hpp"

namespace gibbsdyn {

/// A one-dimensional probability law held as a density on a grid with quadrature weights.
struct KernelEstimate {
  std::vector<double> grid;
  std::vector<double> density;
  std::vector<double> weights;     ///< quadrature weights on grid
  std::vector<double> cumulative;  ///< CDF at the grid points
  double mean = num::kNaN;
  double variance = num::kNaN;
  double total_mass_defect = 0.0;

  /// Builds the estimate, normalises the density, and fills moments and CDF.
  /// `defect` is the error already known from upstream quadrature.
  static KernelEstimate build(std::vector<double> grid, std::vector<double> density, std::vector<double> weights,
                              double defect) {
    KernelEstimate k;
    k.grid = std::move(grid);
    k.density = std::move(density);
    k.weights = std::move(weights);
    double mass = 0.0;
    for (std::size_t i = 0; i < k.grid.size(); ++i) mass += k.weights[i] * k.density[i];
    if (!(mass > 0.0) || !std::isfinite(mass)) throw AccuracyError("kernel has no mass on its grid");
    for (double& d : k.density) d /= mass;
    k.total_mass_defect = defect;
    double m = 0.0;
    for (std::size_t i = 0; i < k.grid.size(); ++i) m += k.weights[i] * k.grid[i] * k.density[i];
    double v = 0.0;
    for (std::size_t i = 0; i < k.grid.size(); ++i) v += k.weights[i] * (k.grid[i] - m) * (k.grid[i] - m) * k.density[i];
    k.mean = m;
    k.variance = v;
    k.cumulative = num::cumulative_trapezoid(k.grid, k.density);
    const double end = k.cumulative.back();
    for (double& c : k.cumulative) c /= end;
    return k;
  }

  double cdf(double x) const {
    if (x <= grid.front()) return 0.0;
    if (x >= grid.back()) return 1.0;
    return num::interp_clamped(grid, cumulative, x);
  }

  /// Integral of the density over the grid with the stored weights.
  double mass() const {
    double s = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) s += weights[i] * density[i];
    return s;
  }

  std::size_t mode_count(double rel_height = 1e-3) const {
    double peak = 0.0;
    for (double d : density) peak = std::max(peak, d);
    std::size_t modes = 0;
    for (std::size_t i = 1; i + 1 < density.size(); ++i)
      if (density[i] > density[i - 1] && density[i] >= density[i + 1] && density[i] > rel_height * peak) ++modes;
    return modes;
  }

  /// Interior local maxima of the density above rel_height of the peak.
  std::vector<double> modes(double rel_height = 1e-3) const {
    double peak = 0.0;
    for (double d : density) peak = std::max(peak, d);
    std::vector<double> out;
    for (std::size_t i = 1; i + 1 < density.size(); ++i)
      if (density[i] > density[i - 1] && density[i] >= density[i + 1] && density[i] > rel_height * peak)
        out.push_back(grid[i]);
    return out;
  }
};

/// Gaussian N(mean, var) tabulated on mean +- 12 sd with grid_n points.
inline KernelEstimate gaussian_kernel(double mean, double var, std::size_t grid_n = 4097) {
  if (!(var > 0.0)) throw DomainError("gaussian_kernel: variance must be positive");
  if (grid_n % 2 == 0) ++grid_n;
  const double sd = std::sqrt(var);
  auto grid = num::linspace(mean - 12.0 * sd, mean + 12.0 * sd, grid_n);
  std::vector<double> dens(grid_n);
  for (std::size_t i = 0; i < grid_n; ++i) dens[i] = num::normal_pdf(grid[i], mean, var);
  auto w = num::simpson_weights(grid_n, grid[1] - grid[0]);
  double mass = 0.0;
  for (std::size_t i = 0; i < grid_n; ++i) mass += w[i] * dens[i];
  return KernelEstimate::build(std::move(grid), std::move(dens), std::move(w), std::abs(1.0 - mass));
}

/// Wasserstein-1 distance between two tabulated laws, from their CDFs.
inline double w1_distance(const KernelEstimate& p, const KernelEstimate& q) {
  std::vector<double> xs;
  xs.reserve(p.grid.size() + q.grid.size());
  xs.insert(xs.end(), p.grid.begin(), p.grid.end());
  xs.insert(xs.end(), q.grid.begin(), q.grid.end());
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  double acc = 0.0;
  double prev = std::abs(p.cdf(xs[0]) - q.cdf(xs[0]));
  for (std::size_t i = 1; i < xs.size(); ++i) {
    const double cur = std::abs(p.cdf(xs[i]) - q.cdf(xs[i]));
    acc += 0.5 * (cur + prev) * (xs[i] - xs[i - 1]);
    prev = cur;
  }
  return acc;
}

/// Kolmogorov distance between two tabulated laws.
inline double ks_between(const KernelEstimate& p, const KernelEstimate& q) {
  double d = 0.0;
  for (double x : p.grid) d = std::max(d, std::abs(p.cdf(x) - q.cdf(x)));
  for (double x : q.grid) d = std::max(d, std::abs(p.cdf(x) - q.cdf(x)));
  return d;
}

inline constexpr std::size_t kMaxSystemSize = 100000;

namespace detail {

inline std::size_t capped_n(std::size_t n) {
  if (n > kMaxSystemSize) {
    log::warn("n = " + std::to_string(n) + " exceeds " + std::to_string(kMaxSystemSize) +
              "; using n = " + std::to_string(kMaxSystemSize) + " (use limit_kernel for the n -> infinity law)");
    return kMaxSystemSize;
  }
  return n;
}

inline KernelEstimate kernel_from_rule(const QuadratureRule& rule) {
  std::vector<double> dens(rule.nodes.size());
  for (std::size_t i = 0; i < dens.size(); ++i) dens[i] = std::exp(-(rule.exponent[i] + rule.log_integral));
  return KernelEstimate::build(rule.nodes, std::move(dens), rule.weights, rule.error_estimate);
}

}  // namespace detail

/// Conditional law of one spin at time 0 given the magnetisation alpha of the other n-1 spins:
/// density proportional to exp(-n V((n-1) alpha / n + x / n)) exp(-x^2 / 2).
inline KernelEstimate initial_kernel(const PotentialSpec& v, std::size_t n, double alpha, const QuadratureConfig& cfg = {}) {
  if (n < 2) throw DomainError("initial_kernel: n must be >= 2");
  if (!std::isfinite(alpha)) throw DomainError("initial_kernel: alpha must be finite");
  n = detail::capped_n(n);
  const double nn = static_cast<double>(n);
  const double base = (nn - 1.0) * alpha / nn;
  const auto e = [&](double x) { return nn * v.eval(base + x / nn) + 0.5 * x * x; };
  return detail::kernel_from_rule(integrate_dominated(e, {0.5, 0.0, nn * v.lower_bound()}, cfg));
}

/// Law of the time-0 magnetisation given time-t magnetisation alpha:
/// density proportional to exp(-n [V(s) + s^2/2 + (s - alpha)^2 / (2t)]).
inline KernelEstimate eta_kernel(const PotentialSpec& v, std::size_t n, double t, double alpha, const QuadratureConfig& cfg = {}) {
  if (n < 1) throw DomainError("eta_kernel: n must be >= 1");
  n = detail::capped_n(n);
  const TiltedRate tr(v, t, alpha);
  const double nn = static_cast<double>(n);
  const auto e = [&](double s) { return nn * tr.eval_rate(s); };
  return detail::kernel_from_rule(integrate_dominated(e, {nn * tr.curvature(), tr.centre(), nn * (tr.offset() + v.lower_bound())}, cfg));
}

namespace detail {

struct TiltIntegrals {
  PotentialSpec v;
  double n, t, alpha, a, c;
  QuadratureConfig cfg;

  TiltIntegrals(const PotentialSpec& pot, std::size_t n_, double t_, double alpha_, const QuadratureConfig& q)
      : v(pot), n(static_cast<double>(n_)), t(t_), alpha(alpha_), a(alpha_ / (1.0 + t_)), c((1.0 + t_) / (2.0 * t_)), cfg(q) {}

  DominatingQuadratic dominating() const { return {(n - 1.0) * c, a, n * v.lower_bound()}; }

  double den_exponent(double r) const {
    const double d = r - a;
    return n * v.eval(r) + (n - 1.0) * c * d * d;
  }
  double num_exponent(double r, double s) const {
    const double d = r - a;
    return n * v.eval(r + (s - r) / n) + (n - 1.0) * c * d * d;
  }

  QuadratureRule denominator(double extra_cutoff = 0.0) const {
    return integrate_dominated([this](double r) { return den_exponent(r); }, dominating(), cfg, extra_cutoff);
  }

  QuadratureRule numerator(double s) const {
    return integrate_dominated([this, s](double r) { return num_exponent(r, s); }, dominating(), cfg);
  }

  /// Numerator rule seeded with the panels of the denominator; falls back to a fresh scan.
  QuadratureRule numerator_on(const QuadratureRule& den, double s) const {
    const auto e = [this, s](double r) { return num_exponent(r, s); };
    try {
      return integrate_on_rule(e, den, cfg, cfg.cutoff());
    } catch (const AccuracyError&) {
      return integrate_dominated(e, dominating(), cfg);
    }
  }
};

inline void check_tilt_args(std::size_t n, double t, double alpha) {
  if (n < 2) throw DomainError("n must be >= 2");
  if (!(t > 0.0) || !std::isfinite(t)) throw DomainError("t must be positive and finite");
  if (!std::isfinite(alpha)) throw DomainError("alpha must be finite");
}

inline double accuracy_threshold() { return 1e-8; }

}  // namespace detail

/// Tilt factor g_{n,t}(alpha, s): ratio of exp(-n V(r + (s-r)/n)) to exp(-n V(r)), each averaged
/// against exp(-(n-1)(r - alpha/(1+t))^2 (1+t)/(2t)).
inline double g_factor(const PotentialSpec& v, std::size_t n, double t, double alpha, double s, const QuadratureConfig& cfg = {}) {
  detail::check_tilt_args(n, t, alpha);
  if (!std::isfinite(s)) throw DomainError("g_factor: s must be finite");
  n = detail::capped_n(n);
  const detail::TiltIntegrals ti(v, n, t, alpha, cfg);
  const QuadratureRule den = ti.denominator();
  const QuadratureRule num = ti.numerator(s);
  const double defect = den.error_estimate + num.error_estimate;
  if (defect > detail::accuracy_threshold())
    throw AccuracyError("g_factor: quadrature error estimate " + std::to_string(defect) + " exceeds threshold");
  return std::exp(num.log_integral - den.log_integral);
}

/// Full output of the evolved-kernel computation.
struct EvolvedKernel {
  KernelEstimate kernel;
  std::vector<double> s_nodes;
  std::vector<double> s_probabilities;  ///< normalised masses of the g-weighted standard normal
  std::vector<double> log_g;            ///< log g_{n,t}(alpha, s) at s_nodes
  double log_denominator = num::kNaN;   ///< log of the shared denominator integral
  double log_mixture = num::kNaN;       ///< log of the integral of g(s) exp(-s^2/2)
  /// log density of the magnetisation of the other n-1 spins at alpha, up to an alpha-independent constant.
  double log_marginal = num::kNaN;
  double s_error = 0.0;
};

/// Conditional law of one spin at time t given magnetisation alpha of the others: the
/// N(0, t)-smoothed mixture of N(0,1) reweighted by g_{n,t}(alpha, .).
inline EvolvedKernel evolved_kernel_details(const PotentialSpec& v, std::size_t n, double t, double alpha,
                                            const QuadratureConfig& cfg = {}) {
  detail::check_tilt_args(n, t, alpha);
  cfg.validate();
  n = detail::capped_n(n);
  const detail::TiltIntegrals ti(v, n, t, alpha, cfg);
  const QuadratureRule den = ti.denominator(20.0);
  const double cutoff = cfg.cutoff();
  double defect = den.error_estimate;

  const auto log_w = [&](double s, double* err) {
    const QuadratureRule num = ti.numerator_on(den, s);
    if (err) *err = std::max(*err, num.error_estimate);
    return num.log_integral - den.log_integral - 0.5 * s * s;
  };

  // Locate the s-window carrying the mass of g(s) exp(-s^2/2).
  double half = 12.0;
  std::vector<double> cs, cw;
  double cmax = -num::kInf;
  for (int expand = 0; expand < 8; ++expand) {
    cs = num::linspace(-half, half, 97);
    cw.assign(cs.size(), 0.0);
    cmax = -num::kInf;
    for (std::size_t i = 0; i < cs.size(); ++i) {
      cw[i] = log_w(cs[i], nullptr);
      cmax = std::max(cmax, cw[i]);
    }
    if (cw.front() < cmax - cutoff && cw.back() < cmax - cutoff) break;
    half *= 2.0;
  }
  std::size_t first = 0, last = cs.size() - 1;
  while (first < cs.size() && cw[first] < cmax - cutoff) ++first;
  while (last > 0 && cw[last] < cmax - cutoff) --last;
  const double s_lo = cs[first > 0 ? first - 1 : 0];
  const double s_hi = cs[std::min(cs.size() - 1, last + 1)];

  // Composite Simpson in s, doubled until the integral is stable.
  std::size_t m = 512;
  std::vector<double> s_nodes = num::linspace(s_lo, s_hi, m + 1), lw(m + 1);
  double s_err = 0.0;
  for (std::size_t i = 0; i <= m; ++i) lw[i] = log_w(s_nodes[i], &s_err);
  double integral_err = 1.0;
  for (;;) {
    const double mx = *std::max_element(lw.begin(), lw.end());
    const auto w_full = num::simpson_weights(m + 1, s_nodes[1] - s_nodes[0]);
    const auto w_half = num::simpson_weights(m / 2 + 1, 2.0 * (s_nodes[1] - s_nodes[0]));
    double full = 0.0, halfsum = 0.0;
    for (std::size_t i = 0; i <= m; ++i) full += w_full[i] * std::exp(lw[i] - mx);
    for (std::size_t i = 0; i <= m / 2; ++i) halfsum += w_half[i] * std::exp(lw[2 * i] - mx);
    integral_err = std::abs(full - halfsum) / full;
    if (integral_err <= 1e-11 || m >= 16384) break;
    std::vector<double> ns(2 * m + 1), nl(2 * m + 1);
    for (std::size_t i = 0; i <= m; ++i) {
      ns[2 * i] = s_nodes[i];
      nl[2 * i] = lw[i];
    }
    for (std::size_t i = 0; i < m; ++i) {
      ns[2 * i + 1] = 0.5 * (s_nodes[i] + s_nodes[i + 1]);
      nl[2 * i + 1] = log_w(ns[2 * i + 1], &s_err);
    }
    s_nodes = std::move(ns);
    lw = std::move(nl);
    m *= 2;
  }
  defect += s_err + integral_err;

  EvolvedKernel out;
  const double mx = *std::max_element(lw.begin(), lw.end());
  const auto ws = num::simpson_weights(m + 1, s_nodes[1] - s_nodes[0]);
  std::vector<double> prob(m + 1);
  double total = 0.0;
  for (std::size_t i = 0; i <= m; ++i) {
    prob[i] = ws[i] * std::exp(lw[i] - mx);
    total += prob[i];
  }
  for (double& p : prob) p /= total;
  out.log_denominator = den.log_integral;
  out.log_mixture = mx + std::log(total);
  const double nn = static_cast<double>(n);
  out.log_marginal = -(nn - 1.0) * alpha * alpha / (2.0 * (1.0 + t)) + out.log_denominator + out.log_mixture;
  out.log_g.resize(m + 1);
  for (std::size_t i = 0; i <= m; ++i) out.log_g[i] = lw[i] + 0.5 * s_nodes[i] * s_nodes[i];
  out.s_error = integral_err + s_err;

  // Gaussian smoothing onto the x-grid.
  std::size_t gx = cfg.grid_n % 2 == 0 ? cfg.grid_n + 1 : cfg.grid_n;
  const double spread = std::sqrt(2.0 * cutoff * t);
  auto xs = num::linspace(s_lo - spread, s_hi + spread, gx);
  std::vector<double> dens(gx, 0.0);
  const double inv2t = 1.0 / (2.0 * t), norm = 1.0 / std::sqrt(2.0 * std::numbers::pi * t);
  for (std::size_t j = 0; j <= m; ++j) {
    if (prob[j] < 1e-300) continue;
    const double sj = s_nodes[j];
    const auto lo = std::lower_bound(xs.begin(), xs.end(), sj - spread);
    const auto hi = std::upper_bound(xs.begin(), xs.end(), sj + spread);
    for (auto it = lo; it != hi; ++it) {
      const double d = *it - sj;
      dens[static_cast<std::size_t>(it - xs.begin())] += prob[j] * norm * std::exp(-d * d * inv2t);
    }
  }
  auto wx = num::simpson_weights(gx, xs[1] - xs[0]);
  double mass = 0.0;
  for (std::size_t i = 0; i < gx; ++i) mass += wx[i] * dens[i];
  defect += std::abs(1.0 - mass);
  out.kernel = KernelEstimate::build(std::move(xs), std::move(dens), std::move(wx), defect);
  out.s_nodes = std::move(s_nodes);
  out.s_probabilities = std::move(prob);
  return out;
}

inline KernelEstimate evolved_kernel(const PotentialSpec& v, std::size_t n, double t, double alpha,
                                     const QuadratureConfig& cfg = {}) {
  return evolved_kernel_details(v, n, t, alpha, cfg).kernel;
}

/// The law the binned simulation estimates: evolved kernels for alpha' in [alpha - h, alpha + h]
/// mixed with the density of the other spins' magnetisation.
inline KernelEstimate binned_evolved_kernel(const PotentialSpec& v, std::size_t n, double t, double alpha, double h,
                                            std::size_t sub_n = 33, const QuadratureConfig& cfg = {}) {
  if (!(h > 0.0)) throw DomainError("binned_evolved_kernel: bin half-width must be positive");
  if (sub_n < 3) sub_n = 3;
  if (sub_n % 2 == 0) ++sub_n;
  const auto alphas = num::linspace(alpha - h, alpha + h, sub_n);
  std::vector<EvolvedKernel> parts(sub_n);
  parallel_for(sub_n, [&](std::size_t k) { parts[k] = evolved_kernel_details(v, n, t, alphas[k], cfg); });
  const auto sw = num::simpson_weights(sub_n, alphas[1] - alphas[0]);
  double lmax = -num::kInf;
  for (const auto& p : parts) lmax = std::max(lmax, p.log_marginal);
  std::vector<double> mix(sub_n);
  double total = 0.0;
  for (std::size_t k = 0; k < sub_n; ++k) {
    mix[k] = sw[k] * std::exp(parts[k].log_marginal - lmax);
    total += mix[k];
  }
  double lo = num::kInf, hi = -num::kInf, defect = 0.0;
  for (const auto& p : parts) {
    lo = std::min(lo, p.kernel.grid.front());
    hi = std::max(hi, p.kernel.grid.back());
    defect = std::max(defect, p.kernel.total_mass_defect);
  }
  std::size_t gx = cfg.grid_n % 2 == 0 ? cfg.grid_n + 1 : cfg.grid_n;
  auto xs = num::linspace(lo, hi, gx);
  std::vector<double> dens(gx, 0.0);
  for (std::size_t k = 0; k < sub_n; ++k)
    for (std::size_t i = 0; i < gx; ++i) {
      const auto& g = parts[k].kernel.grid;
      if (xs[i] < g.front() || xs[i] > g.back()) continue;
      dens[i] += mix[k] / total * num::interp_clamped(g, parts[k].kernel.density, xs[i]);
    }
  auto wx = num::simpson_weights(gx, xs[1] - xs[0]);
  return KernelEstimate::build(std::move(xs), std::move(dens), std::move(wx), defect);
}

/// Raised by limit_kernel at a bad magnetisation; carries both selections.
class BadMagnetisationError : public DomainError {
 public:
  BadMagnetisationError(double q_min, double q_max, KernelEstimate from_min, KernelEstimate from_max)
      : DomainError("alpha is a bad magnetisation: global minimisers " + std::to_string(q_min) + " and " +
                    std::to_string(q_max)),
        q_min(q_min),
        q_max(q_max),
        kernel_min(std::move(from_min)),
        kernel_max(std::move(from_max)) {}
  double q_min, q_max;
  KernelEstimate kernel_min, kernel_max;
};

/// N(-V'(q), 1 + t) at a good magnetisation with minimiser q.
inline KernelEstimate limit_kernel(const PotentialSpec& v, double t, double alpha, const ToleranceConfig& tol = {},
                                   std::size_t grid_n = 4097) {
  const MinimiserSet ms = global_minimisers(TiltedRate(v, t, alpha), tol);
  if (ms.multiple)
    throw BadMagnetisationError(ms.q_min, ms.q_max, gaussian_kernel(-v.d1(ms.q_min), 1.0 + t, grid_n),
                                gaussian_kernel(-v.d1(ms.q_max), 1.0 + t, grid_n));
  return gaussian_kernel(-v.d1(ms.locations.front()), 1.0 + t, grid_n);
}

enum class Sequence { constant, minus_inv_sqrt, plus_inv_sqrt };

inline const char* to_string(Sequence s) {
  switch (s) {
    case Sequence::constant: return "constant";
    case Sequence::minus_inv_sqrt: return "minus_inv_sqrt";
    case Sequence::plus_inv_sqrt: return "plus_inv_sqrt";
  }
  return "?";
}

struct LadderRow {
  std::size_t n;
  double alpha_n;
  double mean;
  double variance;
  double w1;  ///< distance to the limit kernel; NaN when a bad alpha has no selected limit
  double mass_defect;
};

/// Evolved kernels along alpha_n = alpha, alpha - n^{-1/2} or alpha + n^{-1/2}, compared with the
/// limit kernel (the one built from the smallest or largest minimiser at a bad alpha).
inline std::vector<LadderRow> convergence_experiment(const PotentialSpec& v, double t, double alpha,
                                                     const std::vector<std::size_t>& ladder, Sequence seq,
                                                     const QuadratureConfig& cfg = {}) {
  for (std::size_t i = 1; i < ladder.size(); ++i)
    if (!(ladder[i] > ladder[i - 1])) throw ConfigError("convergence_experiment: ladder must be increasing");
  const MinimiserSet ms = global_minimisers(TiltedRate(v, t, alpha));
  std::optional<KernelEstimate> limit;
  if (!ms.multiple)
    limit = gaussian_kernel(-v.d1(ms.locations.front()), 1.0 + t);
  else if (seq == Sequence::minus_inv_sqrt)
    limit = gaussian_kernel(-v.d1(ms.q_min), 1.0 + t);
  else if (seq == Sequence::plus_inv_sqrt)
    limit = gaussian_kernel(-v.d1(ms.q_max), 1.0 + t);
  std::vector<LadderRow> rows(ladder.size());
  parallel_for(ladder.size(), [&](std::size_t i) {
    const std::size_t n = ladder[i];
    const double shift = 1.0 / std::sqrt(static_cast<double>(n));
    const double an = seq == Sequence::constant ? alpha : (seq == Sequence::minus_inv_sqrt ? alpha - shift : alpha + shift);
    const KernelEstimate k = evolved_kernel(v, n, t, an, cfg);
    rows[i] = {n, an, k.mean, k.variance, limit ? w1_distance(k, *limit) : num::kNaN, k.total_mass_defect};
  });
  return rows;
}

/// Ratio of the denominator integral of g_factor reweighted by exp(((1+t)/t)^2 z^2) to the plain one.
inline double g_bound_diagnostic(const PotentialSpec& v, std::size_t n, double t, double alpha, const QuadratureConfig& cfg = {}) {
  detail::check_tilt_args(n, t, alpha);
  n = detail::capped_n(n);
  const detail::TiltIntegrals ti(v, n, t, alpha, cfg);
  const double k = (1.0 + t) / t, k2 = k * k;
  const double base = (ti.n - 1.0) * ti.c;
  const double curvature = base - k2;
  if (!(curvature > 0.0))
    throw DomainError("g_bound_diagnostic: the reweighted integral diverges for this n and t ((n-1)(1+t)/(2t) <= ((1+t)/t)^2)");
  const double centre = base * ti.a / curvature;
  const double floor = base * ti.a * ti.a - curvature * centre * centre + ti.n * v.lower_bound();
  const auto e = [&](double z) { return ti.den_exponent(z) - k2 * z * z; };
  const QuadratureRule num = integrate_dominated(e, {curvature, centre, floor}, cfg);
  const QuadratureRule den = ti.denominator();
  const double defect = num.error_estimate + den.error_estimate;
  if (defect > detail::accuracy_threshold())
    throw AccuracyError("g_bound_diagnostic: quadrature error estimate " + std::to_string(defect) + " exceeds threshold");
  return std::exp(num.log_integral - den.log_integral);
}

}  // namespace gibbsdyn
