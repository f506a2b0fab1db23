#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <utility>
#include <vector>

#include "errors.hpp"

namespace gibbsdyn::num {

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
inline constexpr double kLogSqrt2Pi = 0.91893853320467274178;

/// n equally spaced points from lo to hi inclusive; endpoints are exact.
inline std::vector<double> linspace(double lo, double hi, std::size_t n) {
  std::vector<double> out(n);
  if (n == 1) {
    out[0] = lo;
    return out;
  }
  const double span = hi - lo;
  for (std::size_t i = 0; i < n; ++i)
    out[i] = lo + span * static_cast<double>(i) / static_cast<double>(n - 1);
  out[n - 1] = hi;
  return out;
}

inline double log_sum_exp(const std::vector<double>& v) {
  double m = -kInf;
  for (double x : v) m = std::max(m, x);
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

inline double normal_pdf(double x, double mean = 0.0, double var = 1.0) {
  const double d = x - mean;
  return std::exp(-0.5 * d * d / var - kLogSqrt2Pi - 0.5 * std::log(var));
}

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

/// log Phi(x), accurate deep in the lower tail.
inline double log_normal_cdf(double x) {
  if (x > -30.0) return std::log(normal_cdf(x));
  // Asymptotic expansion of the Mills ratio.
  const double x2 = x * x;
  double term = 1.0, series = 1.0;
  for (int k = 1; k <= 8; ++k) {
    term *= -(2.0 * k - 1.0) / x2;
    series += term;
  }
  return -0.5 * x2 - std::log(-x) - kLogSqrt2Pi + std::log(series);
}

/// log(Phi(b) - Phi(a)) for a < b, stable in both tails.
inline double log_normal_interval(double a, double b) {
  if (!(a < b)) return -kInf;
  if (a >= 0.0) return log_normal_interval(-b, -a);
  const double lb = log_normal_cdf(b);
  const double la = log_normal_cdf(a);
  return lb + std::log1p(-std::exp(la - lb));
}

/// Composite Simpson weights on a uniform grid with an odd number of nodes.
inline std::vector<double> simpson_weights(std::size_t n, double h) {
  if (n < 3 || n % 2 == 0) throw ConfigError("simpson_weights: node count must be odd and >= 3");
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) w[i] = (i == 0 || i == n - 1) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
  for (double& x : w) x *= h / 3.0;
  return w;
}

/// Cumulative trapezoid of y over x, starting at zero.
inline std::vector<double> cumulative_trapezoid(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> c(x.size(), 0.0);
  for (std::size_t i = 1; i < x.size(); ++i) c[i] = c[i - 1] + 0.5 * (y[i] + y[i - 1]) * (x[i] - x[i - 1]);
  return c;
}

/// Linear interpolation of a tabulated function, clamped to the end values.
inline double interp_clamped(const std::vector<double>& x, const std::vector<double>& y, double q) {
  if (q <= x.front()) return y.front();
  if (q >= x.back()) return y.back();
  const auto it = std::upper_bound(x.begin(), x.end(), q);
  const std::size_t j = static_cast<std::size_t>(it - x.begin());
  const double w = (q - x[j - 1]) / (x[j] - x[j - 1]);
  return y[j - 1] + w * (y[j] - y[j - 1]);
}

struct Minimum1D {
  double x;
  double fx;
};

/// Golden-section search for a minimum of a unimodal function on [a, b].
template <class F>
Minimum1D golden_section(F&& f, double a, double b, double xtol = 1e-12, int max_iter = 200) {
  constexpr double invphi = 0.61803398874989484820;
  double c = b - invphi * (b - a);
  double d = a + invphi * (b - a);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < max_iter && (b - a) > xtol * std::max(1.0, std::abs(a) + std::abs(b)); ++it) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = f(d);
    }
  }
  return fc <= fd ? Minimum1D{c, fc} : Minimum1D{d, fd};
}

/// Bisection for a sign change of g on [a, b]; g(a) and g(b) must have opposite signs.
template <class G>
double bisect(G&& g, double a, double b, double xtol = 0.0, int max_iter = 200) {
  double ga = g(a);
  for (int it = 0; it < max_iter; ++it) {
    const double m = 0.5 * (a + b);
    if (m <= a || m >= b || (b - a) <= xtol) break;
    const double gm = g(m);
    if (gm == 0.0) return m;
    if ((gm < 0.0) == (ga < 0.0)) {
      a = m;
      ga = gm;
    } else {
      b = m;
    }
  }
  return 0.5 * (a + b);
}

}  // namespace gibbsdyn::num
