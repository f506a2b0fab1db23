#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "numeric.hpp"
#include "optimize.hpp"

namespace gibbsdyn {

enum class Family { polynomial, cosine_well, cos_of_square, glued_exp, abs, zero, custom_table };
enum class Smoothness { C2_analytic, C1_only, lsc_only };
enum class Interpolation { linear, cubic };

inline const char* to_string(Family f) {
  switch (f) {
    case Family::polynomial: return "polynomial";
    case Family::cosine_well: return "cosine_well";
    case Family::cos_of_square: return "cos_of_square";
    case Family::glued_exp: return "glued_exp";
    case Family::abs: return "abs";
    case Family::zero: return "zero";
    case Family::custom_table: return "custom_table";
  }
  return "?";
}

inline const char* to_string(Smoothness s) {
  switch (s) {
    case Smoothness::C2_analytic: return "C2_analytic";
    case Smoothness::C1_only: return "C1_only";
    case Smoothness::lsc_only: return "lsc_only";
  }
  return "?";
}

/// Result of a derivative query. Finite-difference values carry their step.
struct DerivativeValue {
  double value = 0.0;
  bool approximate = false;
  double step = 0.0;
};

namespace detail {

inline double horner(const std::vector<double>& c, double r) {
  double acc = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * r + *it;
  return acc;
}

inline std::vector<double> differentiate(const std::vector<double>& c) {
  if (c.size() <= 1) return {0.0};
  std::vector<double> d(c.size() - 1);
  for (std::size_t i = 1; i < c.size(); ++i) d[i - 1] = static_cast<double>(i) * c[i];
  return d;
}

// log of e^{-1/u + u}; -inf for u <= 0.
inline double glue_log(double u) { return u > 0.0 ? -1.0 / u + u : -num::kInf; }

inline double glue_value(double r) {
  const double lg = glue_log(std::abs(r) - 1.0);
  return lg < -745.0 ? 0.0 : std::exp(lg);
}

inline double glue_d1(double r) {
  const double u = std::abs(r) - 1.0;
  const double lg = glue_log(u);
  if (lg < -745.0) return 0.0;
  const double v = (1.0 + 1.0 / (u * u)) * std::exp(lg);
  return r > 0.0 ? v : -v;
}

inline double glue_d2(double r) {
  const double u = std::abs(r) - 1.0;
  const double lg = glue_log(u);
  if (lg < -745.0) return 0.0;
  const double u2 = u * u;
  return (1.0 - 2.0 * u + 2.0 * u2 + u2 * u2) / (u2 * u2) * std::exp(lg);
}

/// Natural cubic spline through (x_i, y_i), extended linearly with the end slopes.
class NaturalSpline {
 public:
  NaturalSpline() = default;
  NaturalSpline(std::vector<double> x, std::vector<double> y) : x_(std::move(x)), y_(std::move(y)) {
    const std::size_t n = x_.size();
    m_.assign(n, 0.0);
    if (n < 3) return;
    std::vector<double> a(n, 0.0), b(n, 1.0), c(n, 0.0), d(n, 0.0);
    for (std::size_t i = 1; i + 1 < n; ++i) {
      const double h0 = x_[i] - x_[i - 1], h1 = x_[i + 1] - x_[i];
      a[i] = h0 / 6.0;
      b[i] = (h0 + h1) / 3.0;
      c[i] = h1 / 6.0;
      d[i] = (y_[i + 1] - y_[i]) / h1 - (y_[i] - y_[i - 1]) / h0;
    }
    for (std::size_t i = 1; i < n; ++i) {
      const double w = a[i] / b[i - 1];
      b[i] -= w * c[i - 1];
      d[i] -= w * d[i - 1];
    }
    m_[n - 1] = d[n - 1] / b[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) m_[i] = (d[i] - c[i] * m_[i + 1]) / b[i];
  }

  double operator()(double r) const {
    const std::size_t n = x_.size();
    if (r <= x_.front()) return y_.front() + slope(0, true) * (r - x_.front());
    if (r >= x_.back()) return y_.back() + slope(n - 2, false) * (r - x_.back());
    const std::size_t j = static_cast<std::size_t>(std::upper_bound(x_.begin(), x_.end(), r) - x_.begin());
    const std::size_t i = j - 1;
    const double h = x_[j] - x_[i];
    const double A = (x_[j] - r) / h, B = (r - x_[i]) / h;
    return A * y_[i] + B * y_[j] + ((A * A * A - A) * m_[i] + (B * B * B - B) * m_[j]) * h * h / 6.0;
  }

  double end_slope(bool left) const { return left ? slope(0, true) : slope(x_.size() - 2, false); }

 private:
  double slope(std::size_t i, bool at_left) const {
    const double h = x_[i + 1] - x_[i];
    const double secant = (y_[i + 1] - y_[i]) / h;
    return at_left ? secant - h * (2.0 * m_[i] + m_[i + 1]) / 6.0 : secant + h * (m_[i] + 2.0 * m_[i + 1]) / 6.0;
  }

  std::vector<double> x_, y_, m_;
};

}  // namespace detail

/// A potential V on the real line, bounded below, with its smoothness class and derivatives.
/// Instances are immutable after construction and safe to share across threads.
class PotentialSpec {
 public:
  static constexpr double kDefaultWindow = 20.0;

  static PotentialSpec zero() {
    PotentialSpec p(Family::zero, Smoothness::C2_analytic);
    return p;
  }

  /// Polynomial with coefficients stored lowest degree first.
  static PotentialSpec polynomial(std::vector<double> coefficients, bool normalize = false) {
    while (coefficients.size() > 1 && coefficients.back() == 0.0) coefficients.pop_back();
    if (coefficients.empty()) throw DomainError("polynomial: no coefficients");
    for (double c : coefficients)
      if (!std::isfinite(c)) throw DomainError("polynomial: non-finite coefficient");
    const std::size_t degree = coefficients.size() - 1;
    if (degree % 2 != 0) throw DomainError("polynomial: leading degree must be even");
    if (!(coefficients.back() > 0.0)) throw DomainError("polynomial: leading coefficient must be positive");
    PotentialSpec p(Family::polynomial, Smoothness::C2_analytic);
    p.normalize_ = normalize;
    p.raw_coefficients_ = coefficients;
    p.coeffs_ = coefficients;
    const double minimum = polynomial_minimum(coefficients);
    if (normalize)
      p.coeffs_[0] -= minimum;
    else
      p.lower_bound_ = std::min(0.0, minimum);
    p.d1_ = detail::differentiate(p.coeffs_);
    p.d2_ = detail::differentiate(p.d1_);
    return p;
  }

  /// V(r) = 2 beta (1 + cos r).
  static PotentialSpec cosine_well(double beta) {
    if (!(beta > 0.0) || !std::isfinite(beta)) throw DomainError("cosine_well: beta must be a positive real");
    PotentialSpec p(Family::cosine_well, Smoothness::C2_analytic);
    p.beta_ = beta;
    return p;
  }

  /// V(r) = 1 - cos(r^2).
  static PotentialSpec cos_of_square() { return PotentialSpec(Family::cos_of_square, Smoothness::C2_analytic); }

  /// V = g - beta r^2 - C_beta with g(r) = exp(-1/(|r|-1) + |r| - 1) outside [-1, 1] and 0 inside.
  static PotentialSpec glued_exp(double beta) {
    if (!(beta > 0.0) || !std::isfinite(beta)) throw DomainError("glued_exp: beta must be a positive real");
    PotentialSpec p(Family::glued_exp, Smoothness::C2_analytic);
    p.beta_ = beta;
    p.c_beta_ = glued_constant(beta);
    return p;
  }

  static PotentialSpec abs() { return PotentialSpec(Family::abs, Smoothness::lsc_only); }

  /// Tabulated potential. Linear interpolation gives a continuous, non-differentiable V;
  /// cubic interpolation uses a natural spline. Outside the table V continues linearly.
  static PotentialSpec custom_table(std::vector<double> r, std::vector<double> v, Interpolation rule) {
    if (r.size() != v.size()) throw ShapeError("custom_table: r and v differ in length");
    if (r.size() < 2) throw ShapeError("custom_table: at least two samples are required");
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (!std::isfinite(r[i]) || !std::isfinite(v[i])) throw DomainError("custom_table: non-finite sample");
      if (i > 0 && !(r[i] > r[i - 1])) throw ShapeError("custom_table: r must be strictly increasing");
    }
    PotentialSpec p(Family::custom_table, rule == Interpolation::cubic ? Smoothness::C2_analytic : Smoothness::lsc_only);
    p.interp_ = rule;
    p.table_r_ = std::move(r);
    p.table_v_ = std::move(v);
    if (rule == Interpolation::cubic) p.spline_ = detail::NaturalSpline(p.table_r_, p.table_v_);
    const double left = p.end_slope(true), right = p.end_slope(false);
    if (left > 0.0 || right < 0.0)
      throw DomainError("custom_table: the linear continuation outside the table must not decrease outward");
    const double lo = p.table_r_.front(), hi = p.table_r_.back();
    const std::size_t dense = std::max<std::size_t>(20001, 20 * p.table_r_.size());
    for (double x : num::linspace(lo, hi, dense))
      if (p.eval(x) < -1e-12) throw DomainError("custom_table: interpolated V is negative at r=" + std::to_string(x));
    return p;
  }

  Family family() const { return family_; }
  Smoothness smoothness() const { return smoothness_; }
  double beta() const { return beta_; }
  double c_beta() const { return c_beta_; }
  bool normalized() const { return normalize_; }
  const std::vector<double>& coefficients() const { return coeffs_; }
  const std::vector<double>& raw_coefficients() const { return raw_coefficients_; }
  const std::vector<double>& table_r() const { return table_r_; }
  const std::vector<double>& table_v() const { return table_v_; }
  Interpolation interpolation() const { return interp_; }

  /// Half-width R of the working window [-R, R] used by grid scans.
  double window() const { return window_; }
  /// min(0, inf V); negative only for an unnormalised polynomial that dips below zero.
  double lower_bound() const { return lower_bound_; }
  PotentialSpec with_window(double R) const {
    if (!(R > 0.0) || !std::isfinite(R)) throw ConfigError("window half-width must be positive and finite");
    PotentialSpec p = *this;
    p.window_ = R;
    return p;
  }

  bool is_c1() const { return smoothness_ != Smoothness::lsc_only; }

  std::string name() const {
    std::string s = to_string(family_);
    if (family_ == Family::cosine_well || family_ == Family::glued_exp) s += "(beta=" + trimmed(beta_) + ")";
    if (family_ == Family::polynomial) {
      s += "(";
      for (std::size_t i = 0; i < raw_coefficients_.size(); ++i) s += (i ? "," : "") + trimmed(raw_coefficients_[i]);
      s += ")";
    }
    return s;
  }

  double eval(double r) const {
    if (!std::isfinite(r)) throw DomainError("eval: non-finite argument");
    return value_unchecked(r);
  }
  double operator()(double r) const { return eval(r); }

  DerivativeValue deriv(double r, int order) const {
    if (!std::isfinite(r)) throw DomainError("deriv: non-finite argument");
    if (order != 1 && order != 2) throw DomainError("deriv: order must be 1 or 2");
    switch (family_) {
      case Family::zero: return {0.0};
      case Family::polynomial: return {detail::horner(order == 1 ? d1_ : d2_, r)};
      case Family::cosine_well: return {order == 1 ? -2.0 * beta_ * std::sin(r) : -2.0 * beta_ * std::cos(r)};
      case Family::cos_of_square: {
        const double r2 = r * r;
        return {order == 1 ? 2.0 * r * std::sin(r2) : 2.0 * std::sin(r2) + 4.0 * r2 * std::cos(r2)};
      }
      case Family::glued_exp:
        return {order == 1 ? detail::glue_d1(r) - 2.0 * beta_ * r : detail::glue_d2(r) - 2.0 * beta_};
      case Family::abs:
        if (r == 0.0) throw NotDifferentiableError("abs: V is not differentiable at r=0");
        return {order == 1 ? (r > 0.0 ? 1.0 : -1.0) : 0.0};
      case Family::custom_table: return table_derivative(r, order);
    }
    return {};
  }

  /// First derivative value; throws NotDifferentiableError where it does not exist.
  double d1(double r) const { return deriv(r, 1).value; }
  double d2(double r) const { return deriv(r, 2).value; }

 private:
  PotentialSpec(Family f, Smoothness s) : family_(f), smoothness_(s) {}

  static std::string trimmed(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
  }

  double value_unchecked(double r) const {
    switch (family_) {
      case Family::zero: return 0.0;
      case Family::polynomial: {
        const double v = detail::horner(coeffs_, r);
        return normalize_ ? std::max(0.0, v) : v;
      }
      case Family::cosine_well: return 2.0 * beta_ * (1.0 + std::cos(r));
      case Family::cos_of_square: return 1.0 - std::cos(r * r);
      case Family::glued_exp: return std::max(0.0, detail::glue_value(r) - beta_ * r * r - c_beta_);
      case Family::abs: return std::abs(r);
      case Family::custom_table: return table_value(r);
    }
    return num::kNaN;
  }

  double table_value(double r) const {
    if (interp_ == Interpolation::cubic) return spline_(r);
    const double lo = table_r_.front(), hi = table_r_.back();
    if (r <= lo) return table_v_.front() + end_slope(true) * (r - lo);
    if (r >= hi) return table_v_.back() + end_slope(false) * (r - hi);
    return num::interp_clamped(table_r_, table_v_, r);
  }

  double end_slope(bool left) const {
    if (interp_ == Interpolation::cubic) return spline_.end_slope(left);
    const std::size_t n = table_r_.size();
    return left ? (table_v_[1] - table_v_[0]) / (table_r_[1] - table_r_[0])
                : (table_v_[n - 1] - table_v_[n - 2]) / (table_r_[n - 1] - table_r_[n - 2]);
  }

  DerivativeValue table_derivative(double r, int order) const {
    const double h = 1e-5 * std::max(1.0, std::abs(r));
    if (interp_ == Interpolation::linear && order == 1) {
      const auto it = std::lower_bound(table_r_.begin(), table_r_.end(), r - h);
      if (it != table_r_.end() && *it <= r + h)
        throw NotDifferentiableError("custom_table: linear interpolation has a corner at r=" + trimmed(*it));
    }
    const double fp = table_value(r + h), f0 = table_value(r), fm = table_value(r - h);
    if (order == 1) return {(fp - fm) / (2.0 * h), true, h};
    return {(fp - 2.0 * f0 + fm) / (h * h), true, h};
  }

  static double polynomial_minimum(const std::vector<double>& c) {
    if (c.size() == 1) return c[0];
    const std::vector<double> d = detail::differentiate(c);
    double bound = 0.0;
    for (std::size_t i = 0; i + 1 < d.size(); ++i) bound = std::max(bound, std::abs(d[i] / d.back()));
    bound += 1.0;
    const auto f = [&](double r) { return detail::horner(c, r); };
    const std::function<double(double)> fp = [d](double r) { return detail::horner(d, r); };
    ToleranceConfig tol;
    const auto res = global_minima(f, -bound, bound, tol, fp);
    return res.value;
  }

  static double glued_constant(double beta) {
    const auto f = [beta](double s) { return detail::glue_value(s) - beta * s * s; };
    const std::function<double(double)> fp = [beta](double s) { return detail::glue_d1(s) - 2.0 * beta * s; };
    double hi = 4.0;
    while (fp(hi) <= 0.0) hi *= 2.0;
    ToleranceConfig tol;
    tol.eps_val_rel = 1e-10;
    return global_minima(f, 1.0, hi, tol, fp).value;
  }

  Family family_;
  Smoothness smoothness_;
  double window_ = kDefaultWindow;
  double beta_ = 0.0;
  double c_beta_ = 0.0;
  double lower_bound_ = 0.0;
  bool normalize_ = false;
  std::vector<double> raw_coefficients_, coeffs_, d1_, d2_;
  std::vector<double> table_r_, table_v_;
  Interpolation interp_ = Interpolation::linear;
  detail::NaturalSpline spline_;
};

/// Second difference quotient of f on x < y < z.
template <class F>
double phi2(const F& f, double x, double y, double z) {
  if (!std::isfinite(x) || !std::isfinite(y) || !std::isfinite(z)) throw DomainError("phi2: non-finite argument");
  if (!(x < y && y < z)) throw OrderingError("phi2: arguments must satisfy x < y < z");
  const double fx = f(x), fy = f(y), fz = f(z);
  return ((fz - fy) / (z - y) - (fy - fx) / (y - x)) / (z - x);
}

/// The same quotient in its symmetric three-term form.
template <class F>
double phi2_symmetric(const F& f, double x, double y, double z) {
  if (!(x < y && y < z)) throw OrderingError("phi2_symmetric: arguments must satisfy x < y < z");
  return f(x) / ((x - y) * (x - z)) + f(y) / ((y - x) * (y - z)) + f(z) / ((z - x) * (z - y));
}

/// Convenience builders for the potentials used throughout the examples and tests.
namespace builtin {
inline PotentialSpec double_well() { return PotentialSpec::polynomial({3.0, 0.0, -4.0, 0.0, 1.0}); }
inline PotentialSpec quadratic() { return PotentialSpec::polynomial({0.0, 0.0, 1.0}); }
inline PotentialSpec soft_quartic() { return PotentialSpec::polynomial({1.0, 0.0, -0.5, 0.0, 1.0}); }
inline PotentialSpec wide_double_well() { return PotentialSpec::polynomial({81.0, 0.0, -18.0, 0.0, 1.0}); }

/// The potentials used for property sweeps.
inline std::vector<PotentialSpec> all() {
  return {PotentialSpec::zero(),          quadratic(),
          soft_quartic(),                 double_well(),
          wide_double_well(),             PotentialSpec::cosine_well(1.0),
          PotentialSpec::cosine_well(0.4), PotentialSpec::cos_of_square(),
          PotentialSpec::glued_exp(1.0),  PotentialSpec::abs()};
}
}  // namespace builtin

}  // namespace gibbsdyn
