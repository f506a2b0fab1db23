#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "errors.hpp"
#include "kernels.hpp"
#include "numeric.hpp"
#include "parallel.hpp"
#include "potential.hpp"
#include "quadrature.hpp"

namespace gibbsdyn {

/// How the time-0 magnetisation of each replica is drawn.
enum class Proposal {
  prior,       ///< from its Gibbs law; every accepted sample has weight 1
  bin_tilted,  ///< from the Gibbs law times the chance of landing in the bin, then steered into the bin
};

inline const char* to_string(Proposal p) { return p == Proposal::prior ? "prior" : "bin_tilted"; }

struct SimConfig {
  std::size_t n = 16;
  double t = 1.0;
  std::size_t replicas = 100000;
  std::uint64_t seed = 0;
  double bin_halfwidth = 0.05;
  double alpha_target = 0.0;
  Proposal proposal = Proposal::prior;

  void validate() const {
    if (n < 2) throw ConfigError("SimConfig: n must be >= 2");
    if (!(t > 0.0) || !std::isfinite(t)) throw DomainError("SimConfig: t must be positive and finite");
    if (!(bin_halfwidth > 0.0)) throw ConfigError("SimConfig: bin half-width must be positive");
    if (!std::isfinite(alpha_target)) throw ConfigError("SimConfig: alpha_target must be finite");
    if (replicas == 0) throw ConfigError("SimConfig: replicas must be positive");
  }
};

/// Engine for one replica, derived from (seed, index) by SplitMix64 mixing.
inline std::mt19937_64 replica_engine(std::uint64_t seed, std::uint64_t index) {
  const auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return std::mt19937_64(mix(seed ^ mix(index + 0x632be59bd9b4e019ULL)));
}

template <class Rng>
double uniform01(Rng& rng) {
  const double u = std::generate_canonical<double, 53>(rng);
  if (!(u >= 0.0 && u < 1.0)) throw RngError("random engine produced a value outside [0, 1)");
  return u;
}

/// Inverse-CDF sampler for a density tabulated by a quadrature rule, linear between nodes.
class TabulatedSampler {
 public:
  explicit TabulatedSampler(const QuadratureRule& rule) : x_(rule.nodes) {
    p_.resize(x_.size());
    for (std::size_t i = 0; i < x_.size(); ++i) p_[i] = std::exp(-(rule.exponent[i] - rule.shift));
    c_ = num::cumulative_trapezoid(x_, p_);
    if (!(c_.back() > 0.0)) throw AccuracyError("TabulatedSampler: density has no mass");
  }

  template <class Rng>
  double operator()(Rng& rng) const {
    return quantile(uniform01(rng));
  }

  double quantile(double u) const {
    const double target = u * c_.back();
    std::size_t j = static_cast<std::size_t>(std::upper_bound(c_.begin(), c_.end(), target) - c_.begin());
    j = std::clamp<std::size_t>(j, 1, x_.size() - 1);
    const double r = target - c_[j - 1];
    const double width = x_[j] - x_[j - 1];
    const double p0 = p_[j - 1], p1 = p_[j];
    const double a = (p1 - p0) / (2.0 * width);
    double tau;
    const double disc = p0 * p0 + 4.0 * a * r;
    if (std::abs(a) * width < 1e-14 * std::max(p0, 1e-300)) {
      tau = p0 > 0.0 ? r / p0 : 0.5 * width;
    } else {
      tau = 2.0 * r / (p0 + std::sqrt(std::max(0.0, disc)));
    }
    return x_[j - 1] + std::clamp(tau, 0.0, width);
  }

  /// Probability of [a, b] under the tabulated (piecewise-linear) density.
  double probability(double a, double b) const { return (cdf(b) - cdf(a)) / c_.back(); }

  const std::vector<double>& nodes() const { return x_; }

 private:
  double cdf(double q) const {
    if (q <= x_.front()) return 0.0;
    if (q >= x_.back()) return c_.back();
    const std::size_t j = static_cast<std::size_t>(std::upper_bound(x_.begin(), x_.end(), q) - x_.begin());
    const double w = x_[j] - x_[j - 1], tau = q - x_[j - 1];
    const double p0 = p_[j - 1], p1 = p_[j];
    return c_[j - 1] + p0 * tau + (p1 - p0) * tau * tau / (2.0 * w);
  }

  std::vector<double> x_, p_, c_;
};

/// Sampler of the time-0 magnetisation, density proportional to exp(-n [V(s) + s^2/2]).
class InitialMagnetisationSampler {
 public:
  InitialMagnetisationSampler(const PotentialSpec& v, std::size_t n, const QuadratureConfig& cfg = {})
      : sampler_(build(v, n, cfg)) {}

  template <class Rng>
  double operator()(Rng& rng) const {
    return sampler_(rng);
  }
  const TabulatedSampler& table() const { return sampler_; }

 private:
  static QuadratureRule build(const PotentialSpec& v, std::size_t n, const QuadratureConfig& cfg) {
    if (n < 1) throw DomainError("initial magnetisation: n must be >= 1");
    const double nn = static_cast<double>(n);
    const auto e = [&](double s) { return nn * (v.eval(s) + 0.5 * s * s); };
    return integrate_dominated(e, {0.5 * nn, 0.0, nn * v.lower_bound()}, cfg);
  }
  TabulatedSampler sampler_;
};

template <class Rng>
double sample_initial_magnetisation(const PotentialSpec& v, std::size_t n, Rng& rng) {
  return InitialMagnetisationSampler(v, n)(rng);
}

/// Standard Gaussian vector conditioned on its mean being s.
template <class Rng>
std::vector<double> sample_spins_given_magnetisation(std::size_t n, double s, Rng& rng) {
  if (n < 2) throw DomainError("sample_spins_given_magnetisation: n must be >= 2");
  std::normal_distribution<double> normal;
  std::vector<double> z(n);
  double mean = 0.0;
  for (double& v : z) {
    v = normal(rng);
    mean += v;
  }
  mean /= static_cast<double>(n);
  for (double& v : z) v = s + (v - mean);
  return z;
}

/// Normal(mean, sd^2) conditioned on [lo, hi], by inverting the log CDF; accurate far in the tails.
template <class Rng>
double sample_truncated_normal(double mean, double sd, double lo, double hi, Rng& rng) {
  if (!(sd > 0.0) || !(lo < hi)) throw DomainError("sample_truncated_normal: need sd > 0 and lo < hi");
  double a = (lo - mean) / sd, b = (hi - mean) / sd;
  const bool mirrored = a > 0.0;
  if (mirrored) {
    const double tmp = a;
    a = -b;
    b = -tmp;
  }
  const double la = num::log_normal_cdf(a);
  const double lu = std::log(uniform01(rng)) + num::log_normal_interval(a, b);
  const double top = std::max(la, lu);
  const double target = top + std::log(std::exp(la - top) + std::exp(lu - top));
  double x_lo = a, x_hi = b;
  for (int it = 0; it < 200 && x_hi - x_lo > 1e-13 * std::max(1.0, std::abs(x_lo)); ++it) {
    const double mid = 0.5 * (x_lo + x_hi);
    (num::log_normal_cdf(mid) < target ? x_lo : x_hi) = mid;
  }
  const double z = 0.5 * (x_lo + x_hi);
  return mean + sd * (mirrored ? -z : z);
}

/// Adds an independent N(0, t) increment to every spin.
template <class Rng>
void evolve_spins(std::vector<double>& x, double t, Rng& rng) {
  std::normal_distribution<double> normal;
  const double sd = std::sqrt(t);
  for (double& v : x) v += sd * normal(rng);
}

/// Record of a Kolmogorov-Smirnov comparison.
struct KsRecord {
  double statistic;
  std::string reference;
};

/// First-spin values of the accepted replicas with their sample weights.
struct EmpiricalKernel {
  std::vector<double> samples;
  std::vector<double> weights;
  std::size_t accepted_count = 0;
  std::size_t replicas = 0;
  double acceptance_rate = 0.0;
  Proposal proposal = Proposal::prior;
  std::optional<KsRecord> ks_vs;

  double effective_sample_size() const {
    double s = 0.0, s2 = 0.0;
    for (double w : weights) {
      s += w;
      s2 += w * w;
    }
    return s2 > 0.0 ? s * s / s2 : 0.0;
  }

  double mean() const {
    double s = 0.0, m = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
      s += weights[i];
      m += weights[i] * samples[i];
    }
    return m / s;
  }

  double variance() const {
    const double m = mean();
    double s = 0.0, v = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
      s += weights[i];
      v += weights[i] * (samples[i] - m) * (samples[i] - m);
    }
    return v / s;
  }

  /// Standard error of the weighted mean.
  double standard_error() const {
    const double m = mean();
    double s = 0.0, acc = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
      s += weights[i];
      acc += weights[i] * weights[i] * (samples[i] - m) * (samples[i] - m);
    }
    return std::sqrt(acc) / s;
  }
};

inline constexpr std::size_t kMinAccepted = 100;

/// Simulates replicas from the initial Gibbs law, runs independent Brownian motions for time t,
/// and keeps the first spin whenever the mean of the other n-1 spins lands in the bin.
///
/// With the bin_tilted proposal the time-0 magnetisation is drawn from its law given that the
/// other spins end in the bin, the other spins' mean is drawn from its truncated normal law, and
/// the Gaussian spin vector is moved onto that mean along its regression line. Every replica is
/// then an exact draw of the conditioned system.
inline EmpiricalKernel evolve_and_condition(const SimConfig& cfg, const PotentialSpec& v, const QuadratureConfig& qcfg = {}) {
  cfg.validate();
  const double nn = static_cast<double>(cfg.n);
  const double var_other = (cfg.t + 1.0 / nn) / (nn - 1.0);
  const double sd_other = std::sqrt(var_other);
  const double lo = cfg.alpha_target - cfg.bin_halfwidth, hi = cfg.alpha_target + cfg.bin_halfwidth;
  const auto log_bin = [&](double s) { return num::log_normal_interval((lo - s) / sd_other, (hi - s) / sd_other); };

  QuadratureRule rule;
  if (cfg.proposal == Proposal::prior) {
    rule = integrate_dominated([&](double s) { return nn * (v.eval(s) + 0.5 * s * s); }, {0.5 * nn, 0.0, nn * v.lower_bound()}, qcfg);
  } else {
    rule = integrate_dominated([&](double s) { return nn * (v.eval(s) + 0.5 * s * s) - log_bin(s); }, {0.5 * nn, 0.0, nn * v.lower_bound()},
                               qcfg);
  }
  const TabulatedSampler sampler(rule);

  constexpr std::size_t block = 4096;
  const std::size_t blocks = (cfg.replicas + block - 1) / block;
  std::vector<std::vector<double>> bs(blocks), bw(blocks);
  parallel_for(blocks, [&](std::size_t b) {
    std::vector<double> x(cfg.n);
    std::normal_distribution<double> normal;
    const double sdt = std::sqrt(cfg.t);
    const std::size_t end = std::min(cfg.replicas, (b + 1) * block);
    for (std::size_t i = b * block; i < end; ++i) {
      auto rng = replica_engine(cfg.seed, i);
      const double s0 = sampler(rng);
      double zbar = 0.0;
      for (double& z : x) {
        z = normal(rng);
        zbar += z;
      }
      zbar /= nn;
      double other = 0.0;
      for (std::size_t j = 0; j < cfg.n; ++j) {
        x[j] = s0 + (x[j] - zbar) + sdt * normal(rng);
        if (j > 0) other += x[j];
      }
      other /= nn - 1.0;
      if (cfg.proposal == Proposal::bin_tilted) {
        const double target = sample_truncated_normal(s0, sd_other, lo, hi, rng);
        x[0] -= (target - other) / (nn * var_other);
        other = target;
      }
      if (other < lo || other > hi) continue;
      bs[b].push_back(x[0]);
      bw[b].push_back(1.0);
    }
  });

  EmpiricalKernel out;
  out.proposal = cfg.proposal;
  out.replicas = cfg.replicas;
  for (std::size_t b = 0; b < blocks; ++b) {
    out.samples.insert(out.samples.end(), bs[b].begin(), bs[b].end());
    out.weights.insert(out.weights.end(), bw[b].begin(), bw[b].end());
  }
  out.accepted_count = out.samples.size();
  out.acceptance_rate = static_cast<double>(out.accepted_count) / static_cast<double>(cfg.replicas);
  if (out.accepted_count < kMinAccepted)
    throw InsufficientStatisticsError("evolve_and_condition: only " + std::to_string(out.accepted_count) + " of " +
                                      std::to_string(cfg.replicas) +
                                      " replicas landed in the bin; increase the bin half-width or the replica count, "
                                      "or use the bin_tilted proposal");
  if (out.weights.size() > 0) {
    double mx = *std::max_element(out.weights.begin(), out.weights.end());
    for (double& w : out.weights) w /= mx;
  }
  return out;
}

/// Two-sided Kolmogorov-Smirnov statistic between the weighted empirical CDF and the reference CDF.
inline double ks_distance(const EmpiricalKernel& emp, const KernelEstimate& ref) {
  if (emp.samples.size() < kMinAccepted)
    throw InsufficientStatisticsError("ks_distance: at least " + std::to_string(kMinAccepted) + " samples are required");
  std::vector<std::size_t> order(emp.samples.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return emp.samples[a] < emp.samples[b]; });
  const bool weighted = emp.weights.size() == emp.samples.size();
  double total = 0.0;
  for (std::size_t i = 0; i < order.size(); ++i) total += weighted ? emp.weights[order[i]] : 1.0;
  double cum = 0.0, d = 0.0;
  for (std::size_t i = 0; i < order.size(); ++i) {
    const double x = emp.samples[order[i]];
    const double f = ref.cdf(x);
    d = std::max(d, std::abs(f - cum / total));
    cum += weighted ? emp.weights[order[i]] : 1.0;
    d = std::max(d, std::abs(cum / total - f));
  }
  return d;
}

/// Empirical kernel with unit weights from plain samples.
inline EmpiricalKernel empirical_from_samples(std::vector<double> samples) {
  EmpiricalKernel e;
  e.samples = std::move(samples);
  e.weights.assign(e.samples.size(), 1.0);
  e.accepted_count = e.samples.size();
  e.replicas = e.samples.size();
  e.acceptance_rate = 1.0;
  return e;
}

}  // namespace gibbsdyn
