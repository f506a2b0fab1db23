#include <gtest/gtest.h>

#include <cmath>

#include "gibbsdyn/kernels.hpp"
#include "oracles.hpp"

using namespace gibbsdyn;

namespace {
std::function<double(double)> as_function(const PotentialSpec& v) {
  return [v](double x) { return v.eval(x); };
}
}  // namespace

TEST(InitialKernel, ZeroPotentialIsStandardNormal) {
  for (std::size_t n : {2u, 10u, 1000u}) {
    const auto k = initial_kernel(PotentialSpec::zero(), n, 1.7);
    EXPECT_NEAR(k.mean, 0.0, 1e-10);
    EXPECT_NEAR(k.variance, 1.0, 1e-10);
  }
}

TEST(InitialKernel, QuadraticMatchesGaussianAlgebra) {
  for (std::size_t n : {3u, 25u, 400u}) {
    const auto ref = oracle::quadratic_conditional(1.0, n, 0.0, 0.8);
    const auto k = initial_kernel(builtin::quadratic(), n, 0.8);
    EXPECT_NEAR(k.mean, ref.mean, 1e-9) << n;
    EXPECT_NEAR(k.variance, ref.variance, 1e-9) << n;
  }
}

TEST(InitialKernel, ConvergesToShiftedStandardNormal) {
  const auto v = builtin::double_well();
  const auto k = initial_kernel(v, 10000, 0.5);
  EXPECT_NEAR(k.mean, -v.d1(0.5), 2e-3);
  EXPECT_NEAR(k.variance, 1.0, 2e-3);
}

TEST(InitialKernel, AbsoluteValueSelectsBySide) {
  const std::size_t n = 10000;
  const double s = 1.0 / std::sqrt(static_cast<double>(n - 1));
  const auto below = initial_kernel(PotentialSpec::abs(), n, -s);
  const auto above = initial_kernel(PotentialSpec::abs(), n, s);
  EXPECT_NEAR(below.mean, 1.0, 0.05);
  EXPECT_NEAR(above.mean, -1.0, 0.05);
  EXPECT_NEAR(below.variance, 1.0, 0.05);
  EXPECT_NEAR(above.variance, 1.0, 0.05);
}

TEST(EtaKernel, QuadraticIsGaussian) {
  // exp(-n [3 s^2 / 2 + (s - alpha)^2 / (2t)]): mean alpha / (3t + 1), variance t / (n (3t + 1)).
  const double t = 0.5, alpha = 1.2;
  const std::size_t n = 40;
  const auto k = eta_kernel(builtin::quadratic(), n, t, alpha);
  EXPECT_NEAR(k.mean, alpha / (3.0 * t + 1.0), 1e-10);
  EXPECT_NEAR(k.variance, t / (static_cast<double>(n) * (3.0 * t + 1.0)), 1e-10);
}

TEST(EvolvedKernel, ZeroPotentialExactAtAllSizes) {
  for (std::size_t n : {2u, 7u, 100u, 1600u}) {
    const auto k = evolved_kernel(PotentialSpec::zero(), n, 1.0, 3.0);
    EXPECT_NEAR(k.mean, 0.0, 1e-10) << n;
    EXPECT_NEAR(k.variance, 2.0, 1e-10) << n;
  }
}

TEST(EvolvedKernel, QuadraticMatchesGaussianAlgebra) {
  for (auto [n, t, a] : {std::tuple{5u, 0.3, -1.0}, std::tuple{50u, 1.0, 1.0}, std::tuple{1600u, 1.0, 4.0}}) {
    const auto ref = oracle::quadratic_conditional(1.0, n, t, a);
    const auto k = evolved_kernel(builtin::quadratic(), n, t, a);
    EXPECT_NEAR(k.mean, ref.mean, 1e-8) << n;
    EXPECT_NEAR(k.variance, ref.variance, 1e-8) << n;
  }
}

TEST(EvolvedKernel, DoubleWellMatchesSpinMixtureOracle) {
  const auto v = builtin::double_well();
  for (auto [n, t, a] : {std::tuple{16u, 1.0, 0.5}, std::tuple{64u, 0.1, 0.3}}) {
    const oracle::SpinMixture sm(as_function(v), n, t);
    const auto mix = sm.mixture(a);
    const auto k = evolved_kernel(v, n, t, a);
    const auto ref = mix.moments();
    EXPECT_NEAR(k.mean, ref.mean, 1e-8);
    EXPECT_NEAR(k.variance, ref.variance, 1e-8);
    double ks = 0.0;
    for (double x = -6.0; x <= 8.0; x += 0.05) ks = std::max(ks, std::abs(k.cdf(x) - mix.cdf(x)));
    EXPECT_LT(ks, 1e-5);
  }
}

TEST(EvolvedKernel, FrozenDoubleWellValues) {
  const auto k = evolved_kernel(builtin::double_well(), 64, 0.1, 0.3);
  EXPECT_NEAR(k.mean, 4.2384553565, 1e-9);
  EXPECT_NEAR(k.variance, 1.1370340069, 1e-9);
}

TEST(EvolvedKernel, MassDefectWithinBudget) {
  for (const auto& v : builtin::all()) {
    const auto k = evolved_kernel(v, 32, 0.7, 0.4);
    EXPECT_LE(k.total_mass_defect, 1e-8) << v.name();
    EXPECT_NEAR(k.mass(), 1.0, 1e-8) << v.name();
  }
}

TEST(EvolvedKernel, ArgumentValidation) {
  EXPECT_THROW(evolved_kernel(builtin::quadratic(), 1, 1.0, 0.0), DomainError);
  EXPECT_THROW(evolved_kernel(builtin::quadratic(), 10, 0.0, 0.0), DomainError);
  EXPECT_THROW(evolved_kernel(builtin::quadratic(), 10, 1.0, INFINITY), DomainError);
}

TEST(EvolvedKernel, MarginalMatchesOracleShape) {
  const auto v = builtin::double_well();
  const oracle::SpinMixture sm(as_function(v), 64, 0.1);
  const double base_lib = evolved_kernel_details(v, 64, 0.1, 0.0).log_marginal;
  const double base_ref = sm.log_marginal(0.0);
  for (double a : {-0.4, 0.1, 0.3}) {
    const double lib = evolved_kernel_details(v, 64, 0.1, a).log_marginal - base_lib;
    EXPECT_NEAR(lib, sm.log_marginal(a) - base_ref, 1e-7) << a;
  }
}

TEST(BinnedEvolvedKernel, MatchesBinnedOracle) {
  const auto v = builtin::double_well();
  const oracle::SpinMixture sm(as_function(v), 64, 0.1, -8.0, 8.0, 40001);
  const auto parts = sm.binned(0.0, 0.05, 41);
  const auto k = binned_evolved_kernel(v, 64, 0.1, 0.0, 0.05);
  double ks = 0.0;
  for (double x = -4.0; x <= 4.0; x += 0.1) ks = std::max(ks, std::abs(k.cdf(x) - oracle::SpinMixture::binned_cdf(parts, x)));
  EXPECT_LT(ks, 2e-3);
}

TEST(GFactor, LimitIsExponentialOfTheMinimiserSlope) {
  // V = r^2, t = 1, alpha = 4: minimiser q = 1, V'(q) = 2; g(s) -> exp((q - s) V'(q)).
  const auto v = builtin::quadratic();
  EXPECT_NEAR(g_factor(v, 500, 1.0, 4.0, 1.0), 1.0, 1e-2);
  const double ratio = g_factor(v, 500, 1.0, 4.0, 0.5) / g_factor(v, 500, 1.0, 4.0, 1.5);
  EXPECT_NEAR(std::log(ratio), 2.0, 1e-2);
}

TEST(GFactor, ZeroPotentialIsOne) { EXPECT_NEAR(g_factor(PotentialSpec::zero(), 30, 0.4, 2.0, -1.3), 1.0, 1e-12); }

TEST(LimitKernel, GoodMagnetisationIsGaussian) {
  const auto k = limit_kernel(builtin::quadratic(), 1.0, 4.0);
  EXPECT_NEAR(k.mean, -2.0, 1e-9);
  EXPECT_NEAR(k.variance, 2.0, 1e-9);
}

TEST(LimitKernel, BadMagnetisationCarriesBothSelections) {
  try {
    (void)limit_kernel(builtin::double_well(), 1.0, 0.0);
    FAIL() << "expected BadMagnetisationError";
  } catch (const BadMagnetisationError& e) {
    EXPECT_NEAR(e.kernel_min.mean, -e.kernel_max.mean, 1e-9);
    EXPECT_GT(e.kernel_max.mean - e.kernel_min.mean, 1.0);
  }
}

TEST(Distances, GaussianClosedForms) {
  EXPECT_NEAR(w1_distance(gaussian_kernel(0.0, 1.0), gaussian_kernel(1.0, 1.0)), 1.0, 1e-6);
  // Reference supremum from a fine grid.
  double ref = 0.0;
  for (double x = 0.0; x < 4.0; x += 1e-4)
    ref = std::max(ref, std::abs(0.5 * std::erfc(-x / std::sqrt(2.0)) - 0.5 * std::erfc(-x / 2.0)));
  EXPECT_NEAR(ks_between(gaussian_kernel(0.0, 1.0), gaussian_kernel(0.0, 2.0)), ref, 1e-5);
}

TEST(ConvergenceExperiment, QuadraticApproachesLimit) {
  const auto rows = convergence_experiment(builtin::quadratic(), 1.0, 4.0, {50, 200, 800}, Sequence::constant);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_GT(rows[0].w1, rows[1].w1);
  EXPECT_GT(rows[1].w1, rows[2].w1);
  EXPECT_LT(rows[2].w1, 0.01);
}

TEST(GBoundDiagnostic, DivergentRegimeIsDomainError) {
  EXPECT_THROW(g_bound_diagnostic(builtin::double_well(), 5, 0.1, 0.0), DomainError);
}

TEST(GBoundDiagnostic, ApproachesOneAtRateOneOverN) {
  const auto v = builtin::double_well();
  const double d1 = g_bound_diagnostic(v, 1000, 0.1, 0.0) - 1.0;
  const double d2 = g_bound_diagnostic(v, 10000, 0.1, 0.0) - 1.0;
  EXPECT_LT(std::abs(d2), 0.02);
  EXPECT_NEAR(d1 / d2, 10.0, 1.0);
}
