#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "numeric.hpp"

namespace gibbsdyn {

struct QuadratureConfig {
  double truncation_mass = 1e-12;  ///< mass allowed to fall outside the integration region
  std::size_t grid_n = 4096;       ///< initial resolution; also the size of output x-grids
  bool log_space = true;           ///< integrands are always handled through their exponent
  double rel_tol = 1e-10;          ///< adaptive Simpson target, relative to the integral
  int max_depth = 40;
  std::size_t scan_n = 32768;      ///< coarse scan used to locate the mass

  void validate() const {
    if (!(truncation_mass > 0.0 && truncation_mass <= 1e-6))
      throw ConfigError("QuadratureConfig: truncation_mass must lie in (0, 1e-6]");
    if (grid_n < 64) throw ConfigError("QuadratureConfig: grid_n must be >= 64");
    if (!log_space) throw ConfigError("QuadratureConfig: log_space cannot be disabled");
    if (!(rel_tol > 0.0 && rel_tol < 1e-4)) throw ConfigError("QuadratureConfig: rel_tol must lie in (0, 1e-4)");
    if (scan_n < 256) throw ConfigError("QuadratureConfig: scan_n must be >= 256");
  }

  /// Exponent excess beyond which the integrand is treated as zero.
  double cutoff() const { return -std::log(truncation_mass) + std::log(1e6); }
};

/// Lower bound E(x) >= curvature (x - centre)^2 + floor for an exponent E; the integrand is exp(-E).
struct DominatingQuadratic {
  double curvature;
  double centre;
  double floor = 0.0;
};

struct Panel {
  double a, b;
};

/// Nodes and weights of a rule integrating exp(-E) together with the log of the integral.
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
  std::vector<double> exponent;  ///< E at the nodes
  std::vector<Panel> leaves;     ///< final Simpson panels, in increasing order
  double shift = 0.0;            ///< reference exponent used for scaling
  double log_integral = -num::kInf;
  double error_estimate = 0.0;   ///< relative quadrature error plus truncated mass bound
  std::size_t evaluations = 0;

  /// Normalised probability masses w_i exp(-E_i) / Z at the nodes.
  std::vector<double> probabilities() const {
    std::vector<double> p(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) p[i] = weights[i] * std::exp(-(exponent[i] + log_integral));
    return p;
  }
};

namespace detail {

struct Leaf {
  double a, m, b;
  double ea, em, eb;
};

template <class E>
class AdaptiveSimpson {
 public:
  AdaptiveSimpson(const E& exponent, double shift, int max_depth)
      : exponent_(exponent), shift_(shift), max_depth_(max_depth) {}

  double scaled(double e) const { return std::exp(-(e - shift_)); }

  double eval(double x) {
    ++evaluations;
    const double e = exponent_(x);
    return std::isnan(e) ? num::kInf : e;
  }

  void run(double a, double b, double ea, double em, double eb, double tol) {
    const double m = 0.5 * (a + b);
    const double whole = (b - a) / 6.0 * (scaled(ea) + 4.0 * scaled(em) + scaled(eb));
    recurse(a, m, b, ea, em, eb, whole, tol, 0);
  }

  std::vector<Leaf> leaves;
  double error = 0.0;
  double total = 0.0;
  std::size_t evaluations = 0;

 private:
  void recurse(double a, double m, double b, double ea, double em, double eb, double whole, double tol, int depth) {
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double elm = eval(lm), erm = eval(rm);
    const double left = (m - a) / 6.0 * (scaled(ea) + 4.0 * scaled(elm) + scaled(em));
    const double right = (b - m) / 6.0 * (scaled(em) + 4.0 * scaled(erm) + scaled(eb));
    const double diff = left + right - whole;
    if (depth >= max_depth_ || std::abs(diff) <= 15.0 * tol || !(m > a && b > m)) {
      leaves.push_back({a, lm, m, ea, elm, em});
      leaves.push_back({m, rm, b, em, erm, eb});
      error += std::abs(diff) / 15.0;
      total += left + right + diff / 15.0;
      return;
    }
    recurse(a, lm, m, ea, elm, em, left, 0.5 * tol, depth + 1);
    recurse(m, rm, b, em, erm, eb, right, 0.5 * tol, depth + 1);
  }

  const E& exponent_;
  double shift_;
  int max_depth_;
};

inline void leaves_to_rule(const std::vector<Leaf>& leaves, QuadratureRule& rule) {
  rule.nodes.clear();
  rule.weights.clear();
  rule.exponent.clear();
  rule.leaves.clear();
  for (const auto& l : leaves) {
    const double h = (l.b - l.a) / 6.0;
    if (rule.nodes.empty() || rule.nodes.back() != l.a) {
      rule.nodes.push_back(l.a);
      rule.weights.push_back(0.0);
      rule.exponent.push_back(l.ea);
    }
    rule.weights.back() += h;
    rule.nodes.push_back(l.m);
    rule.weights.push_back(4.0 * h);
    rule.exponent.push_back(l.em);
    rule.nodes.push_back(l.b);
    rule.weights.push_back(h);
    rule.exponent.push_back(l.eb);
    rule.leaves.push_back({l.a, l.b});
  }
}

// Adaptive Simpson over the given panels. When boundary_margin is finite, the exponent at the
// ends of every maximal run of adjacent panels must exceed the minimum by that margin.
template <class E>
QuadratureRule adapt_panels(const E& exponent, const std::vector<Panel>& panels, const QuadratureConfig& cfg,
                            std::size_t prior_evaluations, double boundary_margin = num::kInf) {
  struct Start {
    double a, b, ea, em, eb;
  };
  std::vector<Start> starts;
  starts.reserve(panels.size());
  std::size_t evals = 0;
  const auto safe = [&](double x) {
    ++evals;
    const double e = exponent(x);
    return std::isnan(e) ? num::kInf : e;
  };
  double shift = num::kInf;
  double prev_b = num::kNaN, prev_eb = num::kNaN;
  std::vector<double> run_ends;
  for (const auto& p : panels) {
    const bool joined = p.a == prev_b;
    const double ea = joined ? prev_eb : safe(p.a);
    if (!joined) {
      if (!starts.empty()) run_ends.push_back(prev_eb);
      run_ends.push_back(ea);
    }
    const double em = safe(0.5 * (p.a + p.b));
    const double eb = safe(p.b);
    starts.push_back({p.a, p.b, ea, em, eb});
    shift = std::min({shift, ea, em, eb});
    prev_b = p.b;
    prev_eb = eb;
  }
  if (!starts.empty()) run_ends.push_back(prev_eb);
  if (!std::isfinite(shift)) throw AccuracyError("quadrature: integrand vanishes on the integration region");
  if (std::isfinite(boundary_margin))
    for (double e : run_ends)
      if (e < shift + boundary_margin)
        throw AccuracyError("quadrature: integrand not negligible at a boundary of the reused region");

  AdaptiveSimpson<E> simpson(exponent, shift, cfg.max_depth);
  double estimate = 0.0, width = 0.0;
  for (const auto& s : starts) {
    estimate += (s.b - s.a) / 6.0 * (simpson.scaled(s.ea) + 4.0 * simpson.scaled(s.em) + simpson.scaled(s.eb));
    width += s.b - s.a;
  }
  const double tol_total = cfg.rel_tol * estimate;
  for (const auto& s : starts) simpson.run(s.a, s.b, s.ea, s.em, s.eb, tol_total * (s.b - s.a) / width);

  QuadratureRule rule;
  leaves_to_rule(simpson.leaves, rule);
  rule.shift = shift;
  double sum = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) sum += rule.weights[i] * simpson.scaled(rule.exponent[i]);
  if (!(sum > 0.0) || !std::isfinite(sum)) throw AccuracyError("quadrature: non-positive or overflowing integral");
  rule.log_integral = -shift + std::log(sum);
  rule.error_estimate = simpson.error / sum + cfg.truncation_mass;
  rule.evaluations = prior_evaluations + evals + simpson.evaluations;
  return rule;
}

}  // namespace detail

/// Integrates exp(-E) over the real line. The dominating quadratic bounds the region that can
/// carry mass; a coarse scan locates where E is within cutoff of its minimum, and adaptive
/// Simpson refines there. `extra_cutoff` widens the retained region (used when the rule is
/// reused for neighbouring integrands).
template <class E>
QuadratureRule integrate_dominated(const E& exponent, const DominatingQuadratic& dom, const QuadratureConfig& cfg,
                                   double extra_cutoff = 0.0) {
  cfg.validate();
  if (!(dom.curvature > 0.0)) throw DomainError("integrate_dominated: the dominating quadratic must have positive curvature");
  const double cutoff = cfg.cutoff() + extra_cutoff;
  const auto safe = [&](double x) {
    const double e = exponent(x);
    return std::isnan(e) ? num::kInf : e;
  };
  std::size_t evals = 0;
  double best = safe(dom.centre);
  ++evals;
  double half = 0.0;
  std::vector<double> xs, es;
  for (int pass = 0; pass < 4; ++pass) {
    const double h_new = std::sqrt(std::max(0.0, best - dom.floor + cutoff) / dom.curvature);
    if (pass > 0 && h_new > 0.9 * half) break;
    half = h_new;
    xs = num::linspace(dom.centre - half, dom.centre + half, cfg.scan_n);
    es.resize(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
      es[i] = safe(xs[i]);
      best = std::min(best, es[i]);
    }
    evals += xs.size();
  }
  if (!std::isfinite(best)) throw AccuracyError("integrate_dominated: exponent is infinite on the whole window");

  // Runs of scan points carrying mass, padded by two points on each side.
  const std::size_t n = xs.size();
  std::vector<char> keep(n, 0);
  for (std::size_t i = 0; i < n; ++i)
    if (es[i] <= best + cutoff) {
      const std::size_t lo = i >= 2 ? i - 2 : 0, hi = std::min(n - 1, i + 2);
      for (std::size_t j = lo; j <= hi; ++j) keep[j] = 1;
    }
  std::vector<Panel> segments;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (!(keep[i] && keep[i + 1])) continue;
    if (!segments.empty() && segments.back().b == xs[i])
      segments.back().b = xs[i + 1];
    else
      segments.push_back({xs[i], xs[i + 1]});
  }
  double covered = 0.0;
  for (const auto& s : segments) covered += s.b - s.a;
  const double target = static_cast<double>(cfg.grid_n) / 16.0;
  std::vector<Panel> panels;
  for (const auto& s : segments) {
    const auto pieces = std::max<std::size_t>(8, static_cast<std::size_t>(std::ceil(target * (s.b - s.a) / covered)));
    for (std::size_t k = 0; k < pieces; ++k) {
      const double a = s.a + (s.b - s.a) * static_cast<double>(k) / static_cast<double>(pieces);
      const double b = k + 1 == pieces ? s.b : s.a + (s.b - s.a) * static_cast<double>(k + 1) / static_cast<double>(pieces);
      panels.push_back({a, b});
    }
  }
  return detail::adapt_panels(exponent, panels, cfg, evals);
}

/// Integrates exp(-E) starting from the leaf panels of an existing rule. Throws AccuracyError
/// when the integrand is within boundary_margin of its minimum at an edge of the reused region.
template <class E>
QuadratureRule integrate_on_rule(const E& exponent, const QuadratureRule& base, const QuadratureConfig& cfg,
                                 double boundary_margin) {
  return detail::adapt_panels(exponent, base.leaves, cfg, 0, boundary_margin);
}

}  // namespace gibbsdyn
