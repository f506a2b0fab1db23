#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "errors.hpp"
#include "numeric.hpp"
#include "potential.hpp"
#include "tilted.hpp"

namespace gibbsdyn {

/// A magnetisation trajectory on [0, t) sampled at t_grid, with its limit at t stored separately.
struct PathOnGrid {
  std::vector<double> t_grid;
  std::vector<double> values;
  double endpoint_alpha = 0.0;
  double horizon = 1.0;

  void validate() const {
    if (t_grid.empty() || t_grid.size() != values.size()) throw ShapeError("path: t_grid and values must be non-empty and equal in length");
    if (t_grid.front() != 0.0) throw ShapeError("path: t_grid must start at 0");
    for (std::size_t i = 1; i < t_grid.size(); ++i)
      if (!(t_grid[i] > t_grid[i - 1])) throw ShapeError("path: t_grid must be strictly increasing");
    if (!(t_grid.back() < horizon)) throw ShapeError("path: t_grid must stay below the horizon");
  }

  /// The closing segment from the last sample to endpoint_alpha at the horizon is no steeper than
  /// twice the steepest sampled segment (or slope 1 for paths with fewer than two samples).
  bool admissible() const {
    double steepest = 1.0;
    for (std::size_t i = 1; i < values.size(); ++i)
      steepest = std::max(steepest, std::abs(values[i] - values[i - 1]) / (t_grid[i] - t_grid[i - 1]));
    const double gap = horizon - t_grid.back();
    return std::abs(endpoint_alpha - values.back()) <= 2.0 * steepest * gap + 1e-12;
  }
};

/// Half the integral of the squared derivative, by forward differences including the closing
/// segment toward endpoint_alpha.
inline double kinetic_energy(const PathOnGrid& path) {
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < path.values.size(); ++i) {
    const double dt = path.t_grid[i + 1] - path.t_grid[i];
    const double dv = path.values[i + 1] - path.values[i];
    acc += dv * dv / dt;
  }
  const double dt = path.horizon - path.t_grid.back();
  const double dv = path.endpoint_alpha - path.values.back();
  acc += dv * dv / dt;
  return 0.5 * acc;
}

/// V(phi(0)) + phi(0)^2/2 + (1/2) int phi'^2 - C_{t,alpha}; +infinity when the path does not end at alpha.
inline double path_rate(const PotentialSpec& v, double t, double alpha, const PathOnGrid& path, const ToleranceConfig& tol = {}) {
  path.validate();
  if (!(t > 0.0)) throw DomainError("path_rate: t must be > 0");
  if (std::abs(path.horizon - t) > 1e-12 * std::max(1.0, t)) throw ShapeError("path_rate: path horizon differs from t");
  if (path.endpoint_alpha != alpha || !path.admissible()) return num::kInf;
  const double c = global_minimisers(TiltedRate(v, t, alpha), tol).value;
  const double x0 = path.values.front();
  return v.eval(x0) + 0.5 * x0 * x0 + kinetic_energy(path) - c;
}

/// Straight line from r at time 0 toward alpha at time t, sampled at k t / grid_n for k < grid_n.
inline PathOnGrid optimal_path(double r, double alpha, double t, std::size_t grid_n = 1024) {
  if (!(t > 0.0)) throw DomainError("optimal_path: t must be > 0");
  if (grid_n < 1) throw ConfigError("optimal_path: grid_n must be >= 1");
  PathOnGrid p;
  p.horizon = t;
  p.endpoint_alpha = alpha;
  p.t_grid.resize(grid_n);
  p.values.resize(grid_n);
  for (std::size_t k = 0; k < grid_n; ++k) {
    const double s = t * static_cast<double>(k) / static_cast<double>(grid_n);
    p.t_grid[k] = s;
    p.values[k] = r + (alpha - r) * s / t;
  }
  return p;
}

/// One optimal path per global minimiser of the tilted rate.
inline std::vector<PathOnGrid> minimising_trajectories(const PotentialSpec& v, double t, double alpha,
                                                       std::size_t grid_n = 1024, const ToleranceConfig& tol = {}) {
  if (!(t > 0.0)) throw DomainError("minimising_trajectories: t must be > 0");
  const MinimiserSet ms = global_minimisers(TiltedRate(v, t, alpha), tol);
  std::vector<PathOnGrid> out;
  for (double q : ms.locations) out.push_back(optimal_path(q, alpha, t, grid_n));
  return out;
}

}  // namespace gibbsdyn
