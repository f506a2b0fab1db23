#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gibbsdyn/gibbsdyn.hpp"
#include "gibbsdyn/log.hpp"

namespace gibbsdyn::cli {

using io::json;

enum Exit : int { ok = 0, io_error = 1, domain_error = 2, numerical_error = 3 };

/// Every flag of every command; unset optional flags keep their defaults.
struct Options {
  std::string command;
  std::string potential_path;
  std::optional<double> t;
  double alpha = 0.0;
  std::size_t n = 0;
  std::string window;
  std::size_t grid = 2001;
  std::uint64_t seed = 0;
  std::size_t replicas = 100000;
  double binwidth = 0.05;
  std::string out;
  std::string format = "auto";
  unsigned threads = 0;
  std::string method = "automatic";
  std::string kind = "evolved";
  std::string proposal = "prior";
  std::string reference = "evolved";
  double beta = 1.0;
  std::size_t path_grid = 1024;
  ToleranceConfig tol;
  QuadratureConfig quad;
  std::string report_path;
};

inline json options_to_json(const Options& o) {
  json j{{"command", o.command},     {"alpha", io::number(o.alpha)},
         {"n", o.n},                 {"window", o.window},
         {"grid", o.grid},           {"seed", o.seed},
         {"replicas", o.replicas},   {"binwidth", io::number(o.binwidth)},
         {"format", o.format},       {"method", o.method},
         {"kind", o.kind},           {"proposal", o.proposal},
         {"reference", o.reference}, {"beta", io::number(o.beta)},
         {"path_grid", o.path_grid}, {"tolerances", io::to_json(o.tol)},
         {"quadrature", io::to_json(o.quad)}};
  j["t"] = o.t ? io::number(*o.t) : json(nullptr);
  return j;
}

inline Options options_from_json(const json& j) {
  try {
    Options o;
    o.command = j.at("command").get<std::string>();
    if (!j.at("t").is_null()) o.t = io::to_number(j.at("t"));
    o.alpha = io::to_number(j.at("alpha"));
    o.n = j.at("n").get<std::size_t>();
    o.window = j.at("window").get<std::string>();
    o.grid = j.at("grid").get<std::size_t>();
    o.seed = j.at("seed").get<std::uint64_t>();
    o.replicas = j.at("replicas").get<std::size_t>();
    o.binwidth = io::to_number(j.at("binwidth"));
    o.format = j.at("format").get<std::string>();
    o.method = j.at("method").get<std::string>();
    o.kind = j.at("kind").get<std::string>();
    o.proposal = j.at("proposal").get<std::string>();
    o.reference = j.at("reference").get<std::string>();
    o.beta = io::to_number(j.at("beta"));
    o.path_grid = j.at("path_grid").get<std::size_t>();
    const json& tol = j.at("tolerances");
    o.tol.eps_val_rel = io::to_number(tol.at("eps_val_rel"));
    o.tol.delta_cluster = io::to_number(tol.at("delta_cluster"));
    o.tol.coarse_n = tol.at("coarse_n").get<std::size_t>();
    o.tol.window_margin = io::to_number(tol.at("window_margin"));
    o.tol.indeterminate_factor = io::to_number(tol.at("indeterminate_factor"));
    o.tol.foc_tol = io::to_number(tol.at("foc_tol"));
    const json& q = j.at("quadrature");
    o.quad.truncation_mass = io::to_number(q.at("truncation_mass"));
    o.quad.grid_n = q.at("grid_n").get<std::size_t>();
    o.quad.log_space = q.at("log_space").get<bool>();
    o.quad.rel_tol = io::to_number(q.at("rel_tol"));
    o.quad.max_depth = q.at("max_depth").get<int>();
    o.quad.scan_n = q.at("scan_n").get<std::size_t>();
    return o;
  } catch (const json::exception& e) {
    throw ParseError(std::string("report config is incomplete: ") + e.what());
  }
}

/// Report plus named CSV tables; the first table is the primary one.
struct Output {
  json report;
  std::vector<std::pair<std::string, std::string>> tables;
};

namespace detail {

inline double require_t(const Options& o) {
  if (!o.t) throw ConfigError(o.command + ": --t is required");
  if (!(*o.t > 0.0) || !std::isfinite(*o.t)) throw DomainError(o.command + ": t must be positive and finite");
  return *o.t;
}

inline std::size_t require_n(const Options& o) {
  if (o.n == 0) throw ConfigError(o.command + ": --n is required");
  return o.n;
}

inline std::pair<double, double> parse_window(const std::string& text, double lo, double hi) {
  if (text.empty()) return {lo, hi};
  const auto comma = text.find(',');
  if (comma == std::string::npos) throw ConfigError("--window expects 'a,b'");
  try {
    std::size_t used = 0;
    const std::string a = text.substr(0, comma), b = text.substr(comma + 1);
    const double x = std::stod(a, &used);
    if (used != a.size()) throw ConfigError("--window: trailing characters in '" + a + "'");
    const double y = std::stod(b, &used);
    if (used != b.size()) throw ConfigError("--window: trailing characters in '" + b + "'");
    if (!(x < y)) throw ConfigError("--window: need a < b");
    return {x, y};
  } catch (const std::logic_error&) {
    throw ConfigError("--window: '" + text + "' is not a pair of numbers");
  }
}

template <class Fn>
std::string table(Fn&& write) {
  std::ostringstream s;
  write(s);
  return s.str();
}

inline Method parse_method(const std::string& m) {
  if (m == "automatic") return Method::automatic;
  if (m == "second_derivative") return Method::second_derivative;
  if (m == "phi2_scan") return Method::phi2_scan;
  throw ConfigError("--method must be automatic, second_derivative or phi2_scan");
}

inline json kernel_json(const KernelEstimate& k) { return io::moments(k); }

}  // namespace detail

/// Runs one command on an already-loaded potential.
inline Output execute(const Options& o, const PotentialSpec& v) {
  o.tol.validate();
  o.quad.validate();
  Output out;
  json result;
  const std::string& c = o.command;
  if (c == "tc") {
    const ClassificationReport r = crossover_time(v, detail::parse_method(o.method), ClassifyConfig{.tol = o.tol});
    result = io::to_json(r);
    if (o.t) result["gibbs_at_t"] = {{"t", io::number(*o.t)}, {"gibbs", gibbs_at(v, *o.t, ClassifyConfig{.tol = o.tol})}};
  } else if (c == "bad-scan") {
    const double t = detail::require_t(o);
    const auto [lo, hi] = detail::parse_window(o.window, -5.0, 5.0);
    const BadSetScan s = bad_set_scan(v, t, lo, hi, o.grid, o.tol);
    result = io::to_json(s);
    out.tables.emplace_back("bad-scan.csv", detail::table([&](std::ostream& os) { io::write_intervals_csv(os, s); }));
    out.tables.emplace_back("bad-scan_rows.csv", detail::table([&](std::ostream& os) { io::write_scan_rows_csv(os, s); }));
  } else if (c == "kernel") {
    const std::size_t n = o.kind == "limit" ? 0 : detail::require_n(o);
    KernelEstimate k;
    if (o.kind == "initial") {
      k = initial_kernel(v, n, o.alpha, o.quad);
    } else if (o.kind == "evolved") {
      k = evolved_kernel(v, n, detail::require_t(o), o.alpha, o.quad);
    } else if (o.kind == "binned") {
      k = binned_evolved_kernel(v, n, detail::require_t(o), o.alpha, o.binwidth, 33, o.quad);
    } else if (o.kind == "limit") {
      k = limit_kernel(v, detail::require_t(o), o.alpha, o.tol);
    } else {
      throw ConfigError("--kind must be initial, evolved, binned or limit");
    }
    result = detail::kernel_json(k);
    result["kind"] = o.kind;
    out.tables.emplace_back("kernel.csv", detail::table([&](std::ostream& os) { io::write_kernel_csv(os, k); }));
  } else if (c == "eta") {
    const KernelEstimate k = eta_kernel(v, detail::require_n(o), detail::require_t(o), o.alpha, o.quad);
    result = detail::kernel_json(k);
    out.tables.emplace_back("eta.csv", detail::table([&](std::ostream& os) { io::write_kernel_csv(os, k); }));
  } else if (c == "traj") {
    const double t = detail::require_t(o);
    const auto paths = minimising_trajectories(v, t, o.alpha, o.path_grid, o.tol);
    const TiltedRate tr(v, t, o.alpha);
    const MinimiserSet ms = global_minimisers(tr, o.tol);
    json arr = json::array();
    for (const auto& p : paths)
      arr.push_back({{"start", io::number(p.values.front())},
                     {"path_rate", io::number(path_rate(v, t, o.alpha, p, o.tol))},
                     {"tilted_rate", io::number(tr.eval_rate(p.values.front()) - ms.value)},
                     {"kinetic_energy", io::number(kinetic_energy(p))}});
    result = {{"count", paths.size()}, {"minimisers", io::to_json(ms)}, {"paths", arr}};
    out.tables.emplace_back("traj.csv", detail::table([&](std::ostream& os) { io::write_paths_csv(os, paths); }));
  } else if (c == "limitpot") {
    const double t = detail::require_t(o);
    const auto [lo, hi] = detail::parse_window(o.window, -5.0, 5.0);
    const auto rs = num::linspace(lo, hi, o.grid);
    std::vector<double> vals(rs.size());
    parallel_for(rs.size(), [&](std::size_t i) { vals[i] = limiting_potential(v, t, rs[i], o.tol); });
    result = {{"t", io::number(t)}, {"points", rs.size()}};
    out.tables.emplace_back("limitpot.csv", detail::table([&](std::ostream& os) {
      io::CsvWriter w(os, {"r", "V_t"});
      for (std::size_t i = 0; i < rs.size(); ++i) w.row(rs[i], vals[i]);
    }));
  } else if (c == "simulate") {
    SimConfig sc;
    sc.n = detail::require_n(o);
    sc.t = detail::require_t(o);
    sc.replicas = o.replicas;
    sc.seed = o.seed;
    sc.bin_halfwidth = o.binwidth;
    sc.alpha_target = o.alpha;
    if (o.proposal == "prior")
      sc.proposal = Proposal::prior;
    else if (o.proposal == "bin_tilted")
      sc.proposal = Proposal::bin_tilted;
    else
      throw ConfigError("--proposal must be prior or bin_tilted");
    EmpiricalKernel e = evolve_and_condition(sc, v, o.quad);
    if (o.reference == "evolved") {
      e.ks_vs = KsRecord{ks_distance(e, evolved_kernel(v, sc.n, sc.t, sc.alpha_target, o.quad)), "evolved_kernel"};
    } else if (o.reference == "binned") {
      e.ks_vs = KsRecord{ks_distance(e, binned_evolved_kernel(v, sc.n, sc.t, sc.alpha_target, sc.bin_halfwidth, 33, o.quad)),
                         "binned_evolved_kernel"};
    } else if (o.reference != "none") {
      throw ConfigError("--reference must be evolved, binned or none");
    }
    result = io::summary(e);
    out.tables.emplace_back("samples.csv", detail::table([&](std::ostream& os) { io::write_samples_csv(os, e); }));
  } else if (c == "oracle") {
    const auto [lo, hi] = detail::parse_window(o.window, -3.0, 3.0);
    const auto f = [&v](double x) { return v.eval(x); };
    const std::size_t grid = std::min<std::size_t>(o.grid, 401);
    const TieCriterionResult r = tie_criterion_check(f, o.beta, lo, hi, grid);
    result = {{"beta", io::number(o.beta)},
              {"window", {lo, hi}},
              {"grid", grid},
              {"multiple_minimisers", r.multiple_minimisers},
              {"phi2_below", r.phi2_below},
              {"agree", r.agree()}};
  } else {
    throw ConfigError("unknown command '" + c + "'");
  }
  json config = options_to_json(o);
  config["seed_used"] = c == "simulate";
  out.report = io::envelope(c, config, &v, result);
  return out;
}

inline std::string default_format(const std::string& command) {
  return command == "bad-scan" || command == "traj" || command == "limitpot" ? "csv" : "json";
}

/// Prints or writes the output according to --format and --out.
inline void emit(const Options& o, const Output& result, std::ostream& out) {
  std::string format = o.format == "auto" ? default_format(o.command) : o.format;
  if (format != "json" && format != "csv" && format != "both") throw ConfigError("--format must be csv, json or both");
  if (format != "json" && result.tables.empty()) format = "json";
  if (o.out.empty()) {
    if (format != "csv") out << result.report.dump(2) << '\n';
    if (format == "both") out << '\n';
    if (format != "json") out << result.tables.front().second;
    return;
  }
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(o.out, ec);
  if (ec) throw ParseError("cannot create output directory '" + o.out + "': " + ec.message());
  const auto write = [&](const std::string& name, const std::string& text) {
    const fs::path p = fs::path(o.out) / name;
    std::ofstream f(p, std::ios::binary);
    if (!f || !(f << text)) throw ParseError("cannot write '" + p.string() + "'");
    out << p.string() << '\n';
  };
  write(o.command + ".json", result.report.dump(2) + "\n");
  if (format != "json")
    for (const auto& [name, text] : result.tables) write(name, text);
}

namespace detail {

inline void add_tolerances(CLI::App* app, Options& o) {
  app->add_option("--eps-val-rel", o.tol.eps_val_rel, "Relative tolerance for tied minimum values")->capture_default_str();
  app->add_option("--delta-cluster", o.tol.delta_cluster, "Minimisers closer than this are merged")->capture_default_str();
  app->add_option("--coarse-n", o.tol.coarse_n, "Coarse grid size of the global minimiser search")->capture_default_str();
  app->add_option("--truncation-mass", o.quad.truncation_mass, "Mass allowed outside the quadrature window")
      ->capture_default_str();
  app->add_option("--quad-grid", o.quad.grid_n, "Output grid size of quadrature kernels")->capture_default_str();
  app->add_option("--rel-tol", o.quad.rel_tol, "Relative tolerance of adaptive Simpson panels")->capture_default_str();
  app->add_option("--scan-n", o.quad.scan_n, "Points in the quadrature window scan")->capture_default_str();
}

inline CLI::App* add_command(CLI::App& app, const std::string& name, const std::string& help, Options& o,
                             bool needs_potential = true) {
  CLI::App* sub = app.add_subcommand(name, help);
  if (needs_potential)
    sub->add_option("--potential", o.potential_path, "Potential description (JSON file)")->required()->check(CLI::ExistingFile);
  sub->add_option("--out", o.out, "Output directory; without it the report is printed");
  sub->add_option("--format", o.format, "csv, json or both (default depends on the command)")
      ->check(CLI::IsMember({"auto", "csv", "json", "both"}));
  sub->add_option("--threads", o.threads, "Cap on worker threads (0 = hardware)")->capture_default_str();
  add_tolerances(sub, o);
  return sub;
}

}  // namespace detail

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  double t_value = 0.0;
  CLI::App app{"Dynamical Gibbs-non-Gibbs transitions for mean-field Brownian spins", "gibbs-dyn"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));

  auto* tc = detail::add_command(app, "tc", "Crossover time and Gibbs status at t_c", o);
  tc->add_option("--method", o.method, "automatic, second_derivative or phi2_scan")->capture_default_str();
  tc->add_option("--t", t_value, "Also report whether the potential is Gibbs at this time");

  auto* scan = detail::add_command(app, "bad-scan", "Bad magnetisations at time t", o);
  scan->add_option("--t", t_value, "Time")->required();
  scan->add_option("--window", o.window, "Magnetisation range 'a,b' (default -5,5)");
  scan->add_option("--grid", o.grid, "Grid points")->capture_default_str();

  auto* kernel = detail::add_command(app, "kernel", "Single-spin conditional kernel", o);
  kernel->add_option("--kind", o.kind, "initial, evolved, binned or limit")->capture_default_str();
  kernel->add_option("--n", o.n, "System size");
  kernel->add_option("--t", t_value, "Time");
  kernel->add_option("--alpha", o.alpha, "Magnetisation of the other spins")->capture_default_str();
  kernel->add_option("--binwidth", o.binwidth, "Bin half-width for --kind binned")->capture_default_str();

  auto* eta = detail::add_command(app, "eta", "Law of the time-0 magnetisation given the time-t magnetisation", o);
  eta->add_option("--n", o.n, "System size")->required();
  eta->add_option("--t", t_value, "Time")->required();
  eta->add_option("--alpha", o.alpha, "Time-t magnetisation")->capture_default_str();

  auto* traj = detail::add_command(app, "traj", "Optimal magnetisation trajectories ending at alpha", o);
  traj->add_option("--t", t_value, "Time horizon")->required();
  traj->add_option("--alpha", o.alpha, "End point")->capture_default_str();
  traj->add_option("--grid", o.path_grid, "Time samples per path")->capture_default_str();

  auto* sim = detail::add_command(app, "simulate", "Monte Carlo estimate of the conditional kernel", o);
  sim->add_option("--n", o.n, "System size")->required();
  sim->add_option("--t", t_value, "Time")->required();
  sim->add_option("--alpha", o.alpha, "Target magnetisation of the other spins")->capture_default_str();
  sim->add_option("--seed", o.seed, "Random seed")->capture_default_str();
  sim->add_option("--replicas", o.replicas, "Number of replicas")->capture_default_str();
  sim->add_option("--binwidth", o.binwidth, "Bin half-width")->capture_default_str();
  sim->add_option("--proposal", o.proposal, "prior or bin_tilted")->capture_default_str();
  sim->add_option("--reference", o.reference, "evolved, binned or none")->capture_default_str();

  auto* lp = detail::add_command(app, "limitpot", "Limiting potential V_t on a grid", o);
  lp->add_option("--t", t_value, "Time")->required();
  lp->add_option("--window", o.window, "Range 'a,b' (default -5,5)");
  lp->add_option("--grid", o.grid, "Grid points")->capture_default_str();

  auto* oracle = detail::add_command(app, "oracle", "Brute-force supporting-point check of multiple minimisers", o);
  oracle->add_option("--beta", o.beta, "Tilt curvature")->capture_default_str();
  oracle->add_option("--window", o.window, "Range 'a,b' (default -3,3)");
  oracle->add_option("--grid", o.grid, "Grid points (capped at 401)")->capture_default_str();

  auto* rerun = app.add_subcommand("rerun", "Re-run the configuration embedded in a report");
  rerun->add_option("--report", o.report_path, "Report JSON file")->required()->check(CLI::ExistingFile);
  rerun->add_option("--out", o.out, "Output directory; without it the report is printed");
  rerun->add_option("--format", o.format, "Override the recorded format")->check(CLI::IsMember({"auto", "csv", "json", "both"}));

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return ok;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return ok;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << '\n';
    return ok;
  } catch (const CLI::ParseError& e) {
    std::string help;
    for (auto* sub : app.get_subcommands())
      if (sub->get_help_ptr() && sub->get_help_ptr()->count()) help = sub->help();
    if (!help.empty()) {
      out << help;
      return ok;
    }
    err << "gibbs-dyn: " << e.what() << '\n';
    return io_error;
  }

  try {
    CLI::App* chosen = app.get_subcommands().front();
    if (chosen == rerun) {
      const json report = io::read_json_file(o.report_path);
      if (!report.contains("config") || !report.contains("potential"))
        throw ParseError("'" + o.report_path + "' is not a gibbs-dyn report");
      Options again = options_from_json(report.at("config"));
      again.out = o.out;
      if (rerun->get_option("--format")->count() > 0) again.format = o.format;
      const PotentialSpec v = io::potential_from_json(report.at("potential"));
      emit(again, execute(again, v), out);
      return ok;
    }
    o.command = chosen->get_name();
    if (const auto* opt = chosen->get_option_no_throw("--t"); opt && opt->count() > 0) o.t = t_value;
    if (o.threads > 0) set_max_threads(o.threads);
    const PotentialSpec v = io::load_potential(o.potential_path);
    emit(o, execute(o, v), out);
    return ok;
  } catch (const DomainError& e) {
    err << "gibbs-dyn: domain error: " << e.what() << '\n';
    return domain_error;
  } catch (const ParseError& e) {
    err << "gibbs-dyn: " << e.what() << '\n';
    return io_error;
  } catch (const ConfigError& e) {
    err << "gibbs-dyn: invalid configuration: " << e.what() << '\n';
    return io_error;
  } catch (const Error& e) {
    err << "gibbs-dyn: numerical failure: " << e.what() << '\n';
    return numerical_error;
  } catch (const std::exception& e) {
    err << "gibbs-dyn: " << e.what() << '\n';
    return io_error;
  }
}

}  // namespace gibbsdyn::cli
