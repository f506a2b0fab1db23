#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

#include "errors.hpp"
#include "numeric.hpp"

namespace gibbsdyn {

/// Knobs of the grid-then-refine global minimiser.
struct ToleranceConfig {
  double eps_val_rel = 1e-9;        ///< candidates within eps_val_rel * max(1,|min|) of the minimum tie
  double delta_cluster = 1e-6;      ///< refined minima closer than this are one minimiser
  std::size_t coarse_n = 32768;     ///< coarse grid size on the search window
  double window_margin = 10.0;      ///< excess over the best value that defines the truncation window
  double indeterminate_factor = 10.0;
  double foc_tol = 1e-8;

  void validate() const {
    if (!(eps_val_rel > 0.0)) throw ConfigError("ToleranceConfig: eps_val_rel must be > 0");
    if (!(delta_cluster > 0.0)) throw ConfigError("ToleranceConfig: delta_cluster must be > 0");
    if (coarse_n < 16) throw ConfigError("ToleranceConfig: coarse_n must be >= 16");
    if (!(window_margin > 0.0)) throw ConfigError("ToleranceConfig: window_margin must be > 0");
    if (!(indeterminate_factor >= 1.0)) throw ConfigError("ToleranceConfig: indeterminate_factor must be >= 1");
  }

  double eps_val(double value) const { return eps_val_rel * std::max(1.0, std::abs(value)); }
};

struct LocalMinimum {
  double x;
  double fx;
};

struct GlobalMinimumResult {
  std::vector<double> locations;  ///< sorted cluster representatives
  double value = num::kNaN;
  bool indeterminate = false;     ///< a separate minimum sits in the (eps, factor*eps] band
  double runner_up_value = num::kNaN;
  std::vector<LocalMinimum> candidates;  ///< every refined local minimum that was examined
};

namespace detail {

template <class F>
LocalMinimum refine_bracket(const F& f, const std::function<double(double)>* fprime, double a, double b) {
  const num::Minimum1D g = num::golden_section(f, a, b, 1e-13, 300);
  LocalMinimum best{g.x, g.fx};
  if (fprime != nullptr && *fprime) {
    const double da = (*fprime)(a), db = (*fprime)(b);
    if (da < 0.0 && db > 0.0) {
      const double root = num::bisect(*fprime, a, b);
      const double fr = f(root);
      if (fr <= best.fx + 1e-13 * std::max(1.0, std::abs(best.fx))) best = {root, fr};
    }
  }
  return best;
}

}  // namespace detail

/// Finds the global minimisers of f on [lo, hi] by a coarse scan, refinement of every discrete
/// local minimum that could be global, and clustering. An optional derivative polishes each
/// location by bisection on its sign change.
template <class F>
GlobalMinimumResult global_minima(const F& f, double lo, double hi, const ToleranceConfig& tol,
                                  const std::function<double(double)>& fprime = {}) {
  tol.validate();
  if (!(lo < hi)) throw ConfigError("global_minima: empty window");
  const std::size_t n = tol.coarse_n;
  const std::vector<double> xs = num::linspace(lo, hi, n);
  std::vector<double> fs(n);
  double grid_min = num::kInf;
  for (std::size_t i = 0; i < n; ++i) {
    fs[i] = f(xs[i]);
    if (std::isnan(fs[i])) throw DomainError("global_minima: objective returned NaN");
    grid_min = std::min(grid_min, fs[i]);
  }
  if (!std::isfinite(grid_min)) throw DomainError("global_minima: objective is infinite on the whole window");

  const double slack = 1e-12 * std::max(1.0, std::abs(grid_min));
  std::vector<LocalMinimum> cands;
  const std::function<double(double)>* dptr = fprime ? &fprime : nullptr;
  for (std::size_t i = 0; i < n; ++i) {
    const double left = i > 0 ? fs[i - 1] : num::kInf;
    const double right = i + 1 < n ? fs[i + 1] : num::kInf;
    if (!(fs[i] <= left && fs[i] <= right)) continue;
    double curvature_drop = 0.0;
    if (i > 0 && i + 1 < n && std::isfinite(left) && std::isfinite(right)) curvature_drop = left - 2.0 * fs[i] + right;
    if (fs[i] - std::abs(curvature_drop) > grid_min + slack) continue;
    const double a = xs[i > 0 ? i - 1 : 0];
    const double b = xs[i + 1 < n ? i + 1 : n - 1];
    LocalMinimum m = detail::refine_bracket(f, dptr, a, b);
    if (fs[i] < m.fx) m = {xs[i], fs[i]};
    cands.push_back(m);
  }

  GlobalMinimumResult out;
  out.candidates = cands;
  double best = num::kInf;
  for (const auto& c : cands) best = std::min(best, c.fx);
  out.value = best;
  const double eps = tol.eps_val(best);

  std::vector<LocalMinimum> ties;
  for (const auto& c : cands)
    if (c.fx <= best + eps) ties.push_back(c);
  std::sort(ties.begin(), ties.end(), [](const auto& p, const auto& q) { return p.x < q.x; });
  std::vector<LocalMinimum> clusters;
  for (const auto& c : ties) {
    if (!clusters.empty() && c.x - clusters.back().x <= tol.delta_cluster) {
      if (c.fx < clusters.back().fx) clusters.back() = c;
      continue;
    }
    clusters.push_back(c);
  }
  for (const auto& c : clusters) out.locations.push_back(c.x);

  for (const auto& c : cands) {
    if (c.fx <= best + eps || c.fx > best + tol.indeterminate_factor * eps) continue;
    bool separate = true;
    for (double q : out.locations)
      if (std::abs(c.x - q) <= tol.delta_cluster) separate = false;
    if (separate) {
      out.indeterminate = true;
      if (std::isnan(out.runner_up_value) || c.fx < out.runner_up_value) out.runner_up_value = c.fx;
    }
  }
  return out;
}

}  // namespace gibbsdyn
