#pragma once

// Reference computations that share no numerical code with the library: dense uniform grids,
// plain trapezoid sums and closed-form Gaussian algebra.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

namespace oracle {

struct Moments {
  double mean;
  double variance;
};

/// Exact conditional law of y1 given mean(y_2..n) = alpha when the initial spins are Gaussian with
/// precision I + (2k/n) 11^T, i.e. V(m) = k m^2, and each spin receives N(0, t) noise.
inline Moments quadratic_conditional(double k, std::size_t n_, double t, double alpha) {
  const double n = static_cast<double>(n_);
  const double shrink = (2.0 * k / n) / (1.0 + 2.0 * k);  // Cov(x) = I - shrink 11^T
  const double var_y1 = 1.0 - shrink + t;
  const double var_s = (1.0 + t) / (n - 1.0) - shrink;
  const double cov = -shrink;
  return {cov / var_s * alpha, var_y1 - cov * cov / var_s};
}

/// Gaussian mixture describing y1 given mean(y_2..n) in a set of alpha values: conditionally on
/// the magnetisation m of all n initial spins, (y1, mean(y_2..n)) is bivariate normal with mean
/// (m, m), variances (1 - 1/n + t, (t + 1/n)/(n-1)) and covariance -1/n, while m has density
/// proportional to exp(-n V(m) - n m^2 / 2).
class SpinMixture {
 public:
  SpinMixture(std::function<double(double)> v, std::size_t n_, double t, double lo = -8.0, double hi = 8.0,
              std::size_t grid = 400001)
      : n_(static_cast<double>(n_)), t_(t) {
    const double n = this->n_;
    var_y_ = 1.0 - 1.0 / n + t;
    var_s_ = (t + 1.0 / n) / (n - 1.0);
    cov_ = -1.0 / n;
    const double h = (hi - lo) / static_cast<double>(grid - 1);
    m_.resize(grid);
    logp_.resize(grid);
    for (std::size_t i = 0; i < grid; ++i) {
      m_[i] = lo + h * static_cast<double>(i);
      logp_[i] = -n * (v(m_[i]) + 0.5 * m_[i] * m_[i]);
    }
    h_ = h;
  }

  /// Law of y1 given the other spins' mean = alpha: a Gaussian mixture with common variance.
  struct Mixture {
    std::vector<double> weight, mean;
    double variance = 0.0;

    double cdf(double x) const {
      const double sd = std::sqrt(variance);
      double c = 0.0;
      for (std::size_t i = 0; i < weight.size(); ++i)
        c += weight[i] * 0.5 * std::erfc(-(x - mean[i]) / (sd * std::numbers::sqrt2));
      return c;
    }
    Moments moments() const {
      double m1 = 0.0, m2 = 0.0;
      for (std::size_t i = 0; i < weight.size(); ++i) {
        m1 += weight[i] * mean[i];
        m2 += weight[i] * (mean[i] * mean[i] + variance);
      }
      return {m1, m2 - m1 * m1};
    }
  };

  Mixture mixture(double alpha) const {
    std::vector<double> lw(m_.size());
    double top = -INFINITY;
    for (std::size_t i = 0; i < m_.size(); ++i) {
      const double d = alpha - m_[i];
      lw[i] = logp_[i] - 0.5 * d * d / var_s_;
      top = std::max(top, lw[i]);
    }
    Mixture mix;
    double total = 0.0;
    for (std::size_t i = 0; i < m_.size(); ++i) {
      if (lw[i] - top < -60.0) continue;
      const double edge = (i == 0 || i + 1 == m_.size()) ? 0.5 : 1.0;
      mix.weight.push_back(edge * std::exp(lw[i] - top));
      mix.mean.push_back(m_[i] + cov_ / var_s_ * (alpha - m_[i]));
      total += mix.weight.back();
    }
    for (double& w : mix.weight) w /= total;
    mix.variance = var_y_ - cov_ * cov_ / var_s_;
    return mix;
  }

  Moments moments(double alpha) const { return mixture(alpha).moments(); }
  double cdf(double alpha, double x) const { return mixture(alpha).cdf(x); }

  /// Log of the (unnormalised) density of the other spins' mean at alpha.
  double log_marginal(double alpha) const {
    double top = -INFINITY;
    std::vector<double> e(m_.size());
    for (std::size_t i = 0; i < m_.size(); ++i) {
      const double d = alpha - m_[i];
      e[i] = logp_[i] - 0.5 * d * d / var_s_;
      top = std::max(top, e[i]);
    }
    double s = 0.0;
    for (double x : e) s += std::exp(x - top);
    return top + std::log(s * h_);
  }

  /// Law of y1 given the other spins' mean lies in [alpha - h, alpha + h], as (weight, mixture) pairs.
  std::vector<std::pair<double, Mixture>> binned(double alpha, double h, std::size_t sub = 201) const {
    std::vector<double> lw(sub);
    double top = -INFINITY;
    for (std::size_t k = 0; k < sub; ++k) {
      lw[k] = log_marginal(alpha - h + 2.0 * h * static_cast<double>(k) / static_cast<double>(sub - 1));
      top = std::max(top, lw[k]);
    }
    std::vector<std::pair<double, Mixture>> out;
    double den = 0.0;
    for (std::size_t k = 0; k < sub; ++k) {
      const double a = alpha - h + 2.0 * h * static_cast<double>(k) / static_cast<double>(sub - 1);
      const double edge = (k == 0 || k + 1 == sub) ? 0.5 : 1.0;
      out.emplace_back(edge * std::exp(lw[k] - top), mixture(a));
      den += out.back().first;
    }
    for (auto& p : out) p.first /= den;
    return out;
  }

  static double binned_cdf(const std::vector<std::pair<double, Mixture>>& parts, double x) {
    double c = 0.0;
    for (const auto& [w, mix] : parts) c += w * mix.cdf(x);
    return c;
  }

 private:
  double n_, t_, var_y_ = 0, var_s_ = 0, cov_ = 0, h_ = 0;
  std::vector<double> m_, logp_;
};

/// Global minimisers of f on [lo, hi] by a dense grid plus local parabolic polishing; values
/// within tie_tol of the best count as ties and are reported once per well.
inline std::vector<double> grid_minimisers(const std::function<double(double)>& f, double lo, double hi,
                                           std::size_t grid = 2000001, double tie_tol = 1e-9) {
  const double h = (hi - lo) / static_cast<double>(grid - 1);
  std::vector<double> fs(grid);
  double best = INFINITY;
  for (std::size_t i = 0; i < grid; ++i) {
    fs[i] = f(lo + h * static_cast<double>(i));
    best = std::min(best, fs[i]);
  }
  std::vector<double> out;
  for (std::size_t i = 1; i + 1 < grid; ++i) {
    if (!(fs[i] <= fs[i - 1] && fs[i] < fs[i + 1])) continue;
    const double denom = fs[i - 1] - 2.0 * fs[i] + fs[i + 1];
    const double shift = denom > 0 ? 0.5 * (fs[i - 1] - fs[i + 1]) / denom : 0.0;
    const double x = lo + h * (static_cast<double>(i) + shift);
    const double fx = std::min(fs[i], f(x));
    if (fx <= best + tie_tol * std::max(1.0, std::abs(best)) + 1e-12) out.push_back(x);
  }
  return out;
}

/// Second divided difference from the definition.
inline double divided_difference(const std::function<double(double)>& f, double x, double y, double z) {
  return ((f(z) - f(y)) / (z - y) - (f(y) - f(x)) / (y - x)) / (z - x);
}

/// Trapezoid integral of exp(-e(x)) on a dense uniform grid, returned as a log.
inline double log_integral(const std::function<double(double)>& e, double lo, double hi, std::size_t grid = 200001) {
  const double h = (hi - lo) / static_cast<double>(grid - 1);
  std::vector<double> es(grid);
  double top = INFINITY;
  for (std::size_t i = 0; i < grid; ++i) {
    es[i] = e(lo + h * static_cast<double>(i));
    top = std::min(top, es[i]);
  }
  double s = 0.0;
  for (std::size_t i = 0; i < grid; ++i) s += ((i == 0 || i + 1 == grid) ? 0.5 : 1.0) * std::exp(-(es[i] - top));
  return -top + std::log(s * h);
}

}  // namespace oracle
