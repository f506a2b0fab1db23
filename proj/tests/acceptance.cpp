// Acceptance run: one line per criterion, tolerances and budgets pinned below.
//
// Criteria listed in kKnownFailures are checked exactly as stated and are expected to fail. If one
// of them passes, the run reports it as unexpected so the list gets revisited.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "gibbsdyn/gibbsdyn.hpp"
#include "oracles.hpp"

using namespace gibbsdyn;

namespace {

const std::set<std::string> kKnownFailures{"1", "6"};

struct Check {
  bool ok = true;
  std::ostringstream detail;

  void expect(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      detail << " [x] " << what;
    }
  }
  template <class T>
  void note(const std::string& key, const T& value) {
    detail << ' ' << key << '=' << value;
  }
};

struct Outcome {
  std::string id;
  bool pass;
};

std::vector<Outcome> outcomes;

void run(const std::string& id, const std::string& title, double budget_s, const std::function<void(Check&)>& body) {
  Check c;
  const auto start = std::chrono::steady_clock::now();
  try {
    body(c);
  } catch (const std::exception& e) {
    c.ok = false;
    c.detail << " exception: " << e.what();
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (budget_s > 0.0 && secs > budget_s) {
    c.ok = false;
    c.detail << " [x] runtime " << secs << " s over budget " << budget_s << " s";
  }
  const bool known = kKnownFailures.count(id) > 0;
  const char* tag = c.ok ? (known ? "PASS (unexpected)" : "PASS") : (known ? "FAIL (known)" : "FAIL");
  std::printf("%-18s %-4s %s [%.1f s]%s\n", tag, id.c_str(), title.c_str(), secs, c.detail.str().c_str());
  std::fflush(stdout);
  outcomes.push_back({id, c.ok});
}

std::string fmt(double x) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.9g", x);
  return buf;
}

double tc_of(const PotentialSpec& v) {
  ClassifyConfig cfg;
  cfg.find_witness = false;
  return crossover_time(v, Method::automatic, cfg).t_c;
}

double worst_mass_defect = 0.0;
void track(const KernelEstimate& k) { worst_mass_defect = std::max(worst_mass_defect, k.total_mass_defect); }

}  // namespace

int main() {
  std::printf("gibbs-dyn %s acceptance\n", kVersion);

  run("1", "crossover gallery", 30.0, [](Check& c) {
    const auto cos1 = crossover_time(PotentialSpec::cosine_well(1.0));
    c.note("cosine1.t_c", fmt(cos1.t_c));
    c.expect(std::abs(cos1.t_c - 2.0) <= 1e-6, "cosine_well(1) t_c = 2 +- 1e-6");
    c.expect(cos1.gibbs_at_tc == GibbsAtTc::gibbs, "cosine_well(1) gibbs at t_c");
    c.expect(std::isinf(tc_of(PotentialSpec::cosine_well(0.4))), "cosine_well(0.4) t_c = inf");

    const auto glued = crossover_time(PotentialSpec::glued_exp(1.0));
    c.note("glued.t_c", fmt(glued.t_c));
    c.expect(std::abs(glued.t_c - 2.0) <= 1e-3, "glued_exp(1) t_c = 2 +- 1e-3");
    c.expect(glued.gibbs_at_tc == GibbsAtTc::non_gibbs, "glued_exp(1) non_gibbs at t_c");

    c.expect(tc_of(PotentialSpec::cos_of_square()) == 0.0, "cos_of_square t_c = 0");
    for (const auto& v : {PotentialSpec::zero(), builtin::quadratic(), builtin::soft_quartic()})
      c.expect(std::isinf(tc_of(v)), v.name() + " t_c = inf");

    const auto dw = builtin::double_well();
    const double tc = tc_of(dw);
    c.note("double_well.t_c", fmt(tc));
    c.expect(std::abs(tc - 2.0 / 7.0) <= 1e-6, "double well t_c = 2/7 +- 1e-6");
    const auto early = bad_set_scan(dw, 0.27, -5.0, 5.0, 2001);
    const auto late = bad_set_scan(dw, 0.30, -5.0, 5.0, 2001);
    c.note("bad_intervals@0.27", early.intervals.size());
    c.note("bad_intervals@0.30", late.intervals.size());
    c.expect(early.empty(), "bad_set_scan empty at t = 0.27");
    c.expect(!late.empty(), "bad_set_scan non-empty at t = 0.30");
  });

  run("1*", "crossover gallery with t_c = 1/(2 beta - 1)", 30.0, [](Check& c) {
    const auto cos1 = crossover_time(PotentialSpec::cosine_well(1.0));
    c.expect(std::abs(cos1.t_c - 1.0) <= 1e-6, "cosine_well(1) t_c = 1");
    c.expect(cos1.gibbs_at_tc == GibbsAtTc::gibbs, "cosine_well(1) gibbs at t_c");
    const auto glued = crossover_time(PotentialSpec::glued_exp(1.0));
    c.expect(std::abs(glued.t_c - 1.0) <= 1e-3, "glued_exp(1) t_c = 1");
    c.expect(glued.gibbs_at_tc == GibbsAtTc::non_gibbs, "glued_exp(1) non_gibbs at t_c");
    const auto dw = builtin::double_well();
    const double tc = tc_of(dw);
    c.expect(std::abs(tc - 1.0 / 7.0) <= 1e-6, "double well t_c = 1/7");
    const auto below = bad_set_scan(dw, 0.95 * tc, -5.0, 5.0, 2001);
    const auto above = bad_set_scan(dw, 1.05 * tc, -5.0, 5.0, 2001);
    c.note("bad_intervals@0.95tc", below.intervals.size());
    c.note("bad_intervals@1.05tc", above.intervals.size());
    c.expect(below.empty(), "no bad magnetisation at 0.95 t_c");
    c.expect(!above.empty(), "bad magnetisation at 1.05 t_c");
  });

  run("2", "two-layer / trajectory equivalence", 10.0, [](Check& c) {
    std::mt19937_64 rng(2026);
    const auto pots = builtin::all();
    std::uniform_int_distribution<std::size_t> pick(0, pots.size() - 1);
    std::uniform_real_distribution<double> tdist(0.05, 2.0), adist(-2.0, 2.0), rdist(-2.5, 2.5);
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
      const auto& v = pots[pick(rng)];
      const double t = tdist(rng), alpha = adist(rng);
      const TiltedRate f(v, t, alpha);
      const MinimiserSet ms = global_minimisers(f);
      const auto paths = minimising_trajectories(v, t, alpha, 512);
      c.expect(paths.size() == ms.locations.size(), v.name() + " trajectory count");
      for (std::size_t i = 0; i < paths.size(); ++i)
        worst = std::max(worst, std::abs(path_rate(v, t, alpha, paths[i]) - (f.eval_rate(ms.locations[i]) - ms.value)));
      const double r = rdist(rng);
      worst = std::max(worst, std::abs(path_rate(v, t, alpha, optimal_path(r, alpha, t, 512)) - (f.eval_rate(r) - ms.value)));
    }
    c.note("max_rate_gap", fmt(worst));
    c.expect(worst <= 2e-6, "path rate equals tilted rate within 2e-6");
  });

  run("3", "kernel limit for a good magnetisation", 60.0, [](Check& c) {
    const auto k = evolved_kernel(builtin::quadratic(), 1600, 1.0, 4.0);
    track(k);
    c.note("mean", fmt(k.mean));
    c.note("var", fmt(k.variance));
    c.expect(std::abs(k.mean + 2.0) <= 0.02, "mean within 0.02 of -2");
    c.expect(std::abs(k.variance - 2.0) <= 0.05, "variance within 0.05 of 2");
    double worst = 0.0;
    for (std::size_t n : {2u, 3u, 10u, 100u, 1600u}) {
      const auto z = evolved_kernel(PotentialSpec::zero(), n, 1.0, 4.0);
      track(z);
      worst = std::max({worst, std::abs(z.mean), std::abs(z.variance - 2.0)});
    }
    c.note("zero_potential_err", fmt(worst));
    c.expect(worst <= 1e-10, "V = 0 exact to 1e-10");
  });

  run("4", "selection sequences at a bad magnetisation", 120.0, [](Check& c) {
    const auto v = builtin::double_well();
    const std::vector<std::size_t> ladder{50, 100, 200, 400, 800, 1600, 3200};
    const auto lower = convergence_experiment(v, 1.0, 0.0, ladder, Sequence::minus_inv_sqrt);
    const auto upper = convergence_experiment(v, 1.0, 0.0, ladder, Sequence::plus_inv_sqrt);
    for (const auto* rows : {&lower, &upper})
      for (const auto& r : *rows) worst_mass_defect = std::max(worst_mass_defect, r.mass_defect);
    const auto ms = global_minimisers(TiltedRate(v, 1.0, 0.0));
    const double lim_lo = -v.d1(ms.q_min), lim_hi = -v.d1(ms.q_max);
    c.note("w1_lower", fmt(lower.back().w1));
    c.note("w1_upper", fmt(upper.back().w1));
    c.note("limit_means", fmt(lim_lo) + "," + fmt(lim_hi));
    c.expect(ms.multiple, "alpha = 0 is bad at t = 1");
    c.expect(lower.back().w1 < 0.05, "W1 of the lower sequence at n = 3200 < 0.05");
    c.expect(upper.back().w1 < 0.05, "W1 of the upper sequence at n = 3200 < 0.05");
    c.expect(std::abs(lim_hi - lim_lo) > 1.0, "limits differ by more than 1");
  });

  run("5", "corner potential initial kernel", 0.0, [](Check& c) {
    const std::size_t n = 10000;
    const double s = 1.0 / std::sqrt(static_cast<double>(n - 1));
    for (double sign : {1.0, -1.0}) {
      const auto k = initial_kernel(PotentialSpec::abs(), n, sign * s);
      track(k);
      c.note(sign > 0 ? "mean+" : "mean-", fmt(k.mean));
      c.expect(std::abs(k.mean + sign) <= 0.05, "mean within 0.05 of " + fmt(-sign));
      c.expect(std::abs(k.variance - 1.0) <= 0.05, "variance within 0.05 of 1");
    }
  });

  // Both criterion 6 lines share one simulation.
  std::optional<EmpiricalKernel> sim;
  const auto simulate = [&sim]() -> const EmpiricalKernel& {
    if (!sim) {
      SimConfig cfg;
      cfg.n = 64;
      cfg.t = 0.1;
      cfg.alpha_target = 0.0;
      cfg.replicas = 200000;
      cfg.bin_halfwidth = 0.05;
      cfg.seed = 20240601;
      cfg.proposal = Proposal::bin_tilted;
      sim = evolve_and_condition(cfg, builtin::double_well());
    }
    return *sim;
  };

  run("6", "Monte Carlo against the evolved kernel", 180.0, [&](Check& c) {
    const auto& emp = simulate();
    const auto ref = evolved_kernel(builtin::double_well(), 64, 0.1, 0.0);
    track(ref);
    const double ks = ks_distance(emp, ref);
    c.note("accepted", emp.accepted_count);
    c.note("ess", fmt(emp.effective_sample_size()));
    c.note("ks", fmt(ks));
    c.expect(ks < 0.05, "KS to evolved_kernel(alpha = 0) < 0.05");
  });

  run("6*", "Monte Carlo against the bin-averaged kernel", 180.0, [&](Check& c) {
    const auto& emp = simulate();
    const auto ref = binned_evolved_kernel(builtin::double_well(), 64, 0.1, 0.0, 0.05);
    const double ks = ks_distance(emp, ref);
    const double bound = 1.63 / std::sqrt(emp.effective_sample_size());
    c.note("ks", fmt(ks));
    c.note("bound", fmt(bound));
    c.expect(ks < bound, "KS below the 1% critical value 1.63/sqrt(ESS)");
  });

  run("7", "property suites", 0.0, [](Check& c) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-3.0, 3.0), coef(-2.0, 2.0);

    // Second difference quotient algebra on random cubics with a cosine term.
    double worst_alg = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
      const double a = coef(rng), b = coef(rng), w = coef(rng);
      const auto f = [=](double x) { return a * x * x * x + b * std::cos(3.0 * x); };
      const auto g = [=](double x) { return w * x * x + std::sin(x); };
      std::vector<double> p{u(rng), u(rng), u(rng), u(rng)};
      std::sort(p.begin(), p.end());
      if (p[1] - p[0] < 1e-3 || p[2] - p[1] < 1e-3 || p[3] - p[2] < 1e-3) continue;
      const auto P = [&](double x, double y, double z) { return phi2(f, x, y, z); };
      const double lin = phi2([&](double x) { return 2.0 * f(x) - 3.0 * g(x); }, p[0], p[1], p[2]) -
                         (2.0 * P(p[0], p[1], p[2]) - 3.0 * phi2(g, p[0], p[1], p[2]));
      const double chain1 = (p[3] - p[0]) * P(p[0], p[1], p[3]) -
                            ((p[2] - p[0]) * P(p[0], p[1], p[2]) + (p[3] - p[2]) * P(p[1], p[2], p[3]));
      const double chain2 = (p[3] - p[0]) * P(p[0], p[2], p[3]) -
                            ((p[1] - p[0]) * P(p[0], p[1], p[2]) + (p[3] - p[1]) * P(p[1], p[2], p[3]));
      const double sym = P(p[0], p[1], p[2]) - phi2_symmetric(f, p[0], p[1], p[2]);
      worst_alg = std::max({worst_alg, std::abs(lin), std::abs(chain1), std::abs(chain2), std::abs(sym)});
    }
    c.note("phi2_algebra_err", fmt(worst_alg));
    c.expect(worst_alg < 1e-6, "second difference identities and linearity");

    // Supporting points of the double well are exactly |y| >= sqrt 2 (its convex hull touches there).
    const auto dw = [](double x) { return x * x * x * x - 4.0 * x * x + 3.0; };
    const auto grid = num::linspace(-3.0, 3.0, 241);
    bool hull_ok = true;
    for (double y = -2.4; y <= 2.4; y += 0.1) {
      if (std::abs(std::abs(y) - std::sqrt(2.0)) < 0.05) continue;
      hull_ok = hull_ok && supporting_point(dw, y, grid) == (std::abs(y) > std::sqrt(2.0));
    }
    const auto convex = [](double x) { return std::exp(x) + x * x; };
    for (double y = -2.5; y <= 2.5; y += 0.25) hull_ok = hull_ok && supporting_point(convex, y, grid);
    c.expect(hull_ok, "convexity and supporting-point correspondence");

    // Tie criterion on random piecewise quadratics with smallest curvature coefficient -4.
    int agree = 0;
    for (int trial = 0; trial < 50; ++trial) {
      std::vector<double> a(4);
      for (double& x : a) x = std::uniform_real_distribution<double>(-3.5, 3.0)(rng);
      a[std::uniform_int_distribution<int>(0, 3)(rng)] = -4.0;
      std::vector<double> v0(4, 0.0), d0(4, coef(rng));
      for (int i = 1; i < 4; ++i) {
        v0[i] = v0[i - 1] + d0[i - 1] + a[i - 1];
        d0[i] = d0[i - 1] + 2.0 * a[i - 1];
      }
      const auto f = [&](double x) {
        const int i = std::clamp(static_cast<int>(std::floor(x + 2.0)), 0, 3);
        const double s = x + 2.0 - i;
        return v0[i] + d0[i] * s + a[i] * s * s;
      };
      const auto hi = tie_criterion_check(f, 4.01, -2.0, 2.0, 161);
      const auto lo = tie_criterion_check(f, 3.99, -2.0, 2.0, 161);
      if (hi.agree() && lo.agree() && !hi.phi2_below && lo.phi2_below) ++agree;
    }
    c.note("tie_agree", std::to_string(agree) + "/50");
    c.expect(agree == 50, "tie criterion agreement on 50 random functions");

    // Kernel normalisation across a sweep of builtins plus everything computed above.
    for (const auto& v : builtin::all()) {
      track(initial_kernel(v, 64, 0.3));
      track(evolved_kernel(v, 48, 0.5, -0.2));
      track(eta_kernel(v, 48, 0.5, -0.2));
    }
    c.note("worst_mass_defect", fmt(worst_mass_defect));
    c.expect(worst_mass_defect <= 1e-8, "mass defect <= 1e-8 on all quadrature calls");

    // Seeded determinism, including across worker counts.
    SimConfig cfg;
    cfg.replicas = 30000;
    cfg.alpha_target = 1.3;
    cfg.seed = 99;
    set_max_threads(1);
    const auto one = evolve_and_condition(cfg, builtin::double_well());
    set_max_threads(3);
    const auto three = evolve_and_condition(cfg, builtin::double_well());
    set_max_threads(0);
    c.expect(one.samples == three.samples && one.weights == three.weights, "seeded determinism of the simulation");

    // Gibbs loss is monotone in time for every builtin.
    bool monotone = true;
    std::vector<double> ts;
    for (double e : num::linspace(-2.0, 1.0, 13)) ts.push_back(std::pow(10.0, e));
    for (const auto& v : builtin::all()) {
      bool lost = false;
      for (double t : ts) {
        const bool g = gibbs_at(v, t);
        if (g && lost) monotone = false;
        lost = lost || !g;
      }
    }
    c.expect(monotone, "monotone Gibbs-loss indicator over t");
  });

  int unexpected = 0;
  for (const auto& o : outcomes) {
    const bool known = kKnownFailures.count(o.id) > 0;
    if (o.pass == known) ++unexpected;
  }
  std::printf("%zu criteria, %d unexpected outcome(s); known failures: 1, 6\n", outcomes.size(), unexpected);
  return unexpected == 0 ? 0 : 1;
}
