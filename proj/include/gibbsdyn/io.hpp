#pragma once

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <type_traits>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "classify.hpp"
#include "errors.hpp"
#include "kernels.hpp"
#include "mc_sim.hpp"
#include "optimize.hpp"
#include "paths.hpp"
#include "potential.hpp"
#include "quadrature.hpp"
#include "tilted.hpp"
#include "version.hpp"

namespace gibbsdyn::io {

using json = nlohmann::json;

/// JSON has no infinities or NaN; those are written as the strings "inf", "-inf" and "nan".
inline json number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

inline double to_number(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return num::kInf;
    if (s == "-inf") return -num::kInf;
    if (s == "nan") return num::kNaN;
  }
  throw ParseError("expected a number, got " + j.dump());
}

/// Shortest decimal text that reads back to the same double.
inline std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  for (int prec = 15; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, x);
    if (std::strtod(buf, nullptr) == x) break;
  }
  return buf;
}

// ---- potentials -------------------------------------------------------------------------

inline json to_json(const PotentialSpec& p) {
  json params = json::object();
  switch (p.family()) {
    case Family::polynomial:
      params["coefficients"] = p.raw_coefficients();
      params["normalize"] = p.normalized();
      break;
    case Family::cosine_well:
    case Family::glued_exp:
      params["beta"] = p.beta();
      break;
    case Family::custom_table:
      params["r"] = p.table_r();
      params["v"] = p.table_v();
      params["interpolation"] = p.interpolation() == Interpolation::cubic ? "cubic" : "linear";
      break;
    default:
      break;
  }
  json j{{"family", to_string(p.family())}, {"params", params}, {"window", p.window()}};
  if (p.family() == Family::glued_exp) j["c_beta"] = p.c_beta();
  j["smoothness"] = to_string(p.smoothness());
  return j;
}

namespace detail {

inline void only_keys(const json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || it.key() == a;
    if (!ok) throw ParseError(where + ": unknown key '" + it.key() + "'");
  }
}

inline std::vector<double> number_array(const json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_array()) throw ParseError(std::string("potential: '") + key + "' must be an array");
  std::vector<double> out;
  for (const auto& x : j.at(key)) out.push_back(to_number(x));
  return out;
}

inline double positive(const json& params, const char* key) {
  if (!params.contains(key)) throw ParseError(std::string("potential: missing parameter '") + key + "'");
  return to_number(params.at(key));
}

}  // namespace detail

/// Parses {"family": ..., "params": {...}, "window": R}. Derived fields written by to_json
/// (smoothness, c_beta) are accepted and ignored.
inline PotentialSpec potential_from_json(const json& j) {
  if (!j.is_object()) throw ParseError("potential: expected a JSON object");
  detail::only_keys(j, {"family", "params", "window", "smoothness", "c_beta"}, "potential");
  if (!j.contains("family") || !j.at("family").is_string()) throw ParseError("potential: missing string 'family'");
  const std::string family = j.at("family").get<std::string>();
  const json params = j.value("params", json::object());
  if (!params.is_object()) throw ParseError("potential: 'params' must be an object");

  PotentialSpec p = PotentialSpec::zero();
  if (family == "zero") {
    detail::only_keys(params, {}, "zero");
  } else if (family == "polynomial") {
    detail::only_keys(params, {"coefficients", "normalize"}, "polynomial");
    const bool normalize = params.value("normalize", false);
    p = PotentialSpec::polynomial(detail::number_array(params, "coefficients"), normalize);
  } else if (family == "cosine_well") {
    detail::only_keys(params, {"beta"}, "cosine_well");
    p = PotentialSpec::cosine_well(detail::positive(params, "beta"));
  } else if (family == "cos_of_square") {
    detail::only_keys(params, {}, "cos_of_square");
    p = PotentialSpec::cos_of_square();
  } else if (family == "glued_exp") {
    detail::only_keys(params, {"beta"}, "glued_exp");
    p = PotentialSpec::glued_exp(detail::positive(params, "beta"));
  } else if (family == "abs") {
    detail::only_keys(params, {}, "abs");
    p = PotentialSpec::abs();
  } else if (family == "custom_table") {
    detail::only_keys(params, {"r", "v", "interpolation"}, "custom_table");
    const std::string rule = params.value("interpolation", std::string("cubic"));
    if (rule != "cubic" && rule != "linear") throw ParseError("custom_table: interpolation must be 'cubic' or 'linear'");
    p = PotentialSpec::custom_table(detail::number_array(params, "r"), detail::number_array(params, "v"),
                                    rule == "cubic" ? Interpolation::cubic : Interpolation::linear);
  } else {
    throw ParseError("potential: unknown family '" + family + "'");
  }
  if (j.contains("window")) p = p.with_window(to_number(j.at("window")));
  return p;
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError("'" + path + "' is not valid JSON: " + e.what());
  }
}

inline PotentialSpec load_potential(const std::string& path) { return potential_from_json(read_json_file(path)); }

// ---- configs ----------------------------------------------------------------------------

inline json to_json(const ToleranceConfig& t) {
  return {{"eps_val_rel", t.eps_val_rel},   {"delta_cluster", t.delta_cluster},
          {"coarse_n", t.coarse_n},         {"window_margin", t.window_margin},
          {"indeterminate_factor", t.indeterminate_factor}, {"foc_tol", t.foc_tol}};
}

inline json to_json(const QuadratureConfig& q) {
  return {{"truncation_mass", q.truncation_mass}, {"grid_n", q.grid_n},       {"log_space", q.log_space},
          {"rel_tol", q.rel_tol},                 {"max_depth", q.max_depth}, {"scan_n", q.scan_n}};
}

// ---- results ----------------------------------------------------------------------------

inline json to_json(const MinimiserSet& m) {
  json locs = json::array();
  for (double q : m.locations) locs.push_back(number(q));
  return {{"locations", locs},
          {"value", number(m.value)},
          {"multiple", m.multiple},
          {"indeterminate", m.indeterminate},
          {"runner_up_value", number(m.runner_up_value)},
          {"window", {number(m.window_lo), number(m.window_hi)}},
          {"max_foc_residual", number(m.max_foc_residual)}};
}

inline json to_json(const ClassificationReport& r) {
  json j{{"beta", number(r.beta)},
         {"t_c", number(r.t_c)},
         {"gibbs_at_tc", r.gibbs_at_tc ? json(to_string(*r.gibbs_at_tc)) : json(nullptr)},
         {"method", to_string(r.method)},
         {"curvature_argmin", number(r.argmin)},
         {"infimum_at_window_edge", r.infimum_at_window_edge}};
  if (r.witness)
    j["witness"] = {{"t", number(r.witness->t_probe)},
                    {"alpha", number(r.witness->alpha)},
                    {"minimisers", to_json(r.witness->minimisers)}};
  else
    j["witness"] = nullptr;
  return j;
}

inline json to_json(const BadInterval& b) {
  return {{"lo", number(b.lo)},         {"hi", number(b.hi)},           {"degenerate", b.degenerate},
          {"q_left", number(b.q_left)}, {"q_right", number(b.q_right)}, {"from_jump", b.from_jump}};
}

inline json to_json(const BadSetScan& s) {
  json iv = json::array();
  for (const auto& b : s.intervals) iv.push_back(to_json(b));
  return {{"t", number(s.t)}, {"empty", s.empty()}, {"intervals", iv}, {"grid_points", s.rows.size()}};
}

inline json moments(const KernelEstimate& k) {
  return {{"mean", number(k.mean)},
          {"variance", number(k.variance)},
          {"total_mass_defect", number(k.total_mass_defect)},
          {"mass", number(k.mass())},
          {"grid_points", k.grid.size()},
          {"modes", k.mode_count()}};
}

inline json summary(const EmpiricalKernel& e) {
  json j{{"accepted_count", e.accepted_count},
         {"replicas", e.replicas},
         {"acceptance_rate", number(e.acceptance_rate)},
         {"proposal", to_string(e.proposal)},
         {"effective_sample_size", number(e.effective_sample_size())},
         {"mean", number(e.mean())},
         {"variance", number(e.variance())},
         {"mean_standard_error", number(e.standard_error())}};
  if (e.ks_vs) j["ks"] = {{"statistic", number(e.ks_vs->statistic)}, {"reference", e.ks_vs->reference}};
  return j;
}

/// Report envelope shared by all commands.
inline json envelope(const std::string& command, const json& config, const PotentialSpec* potential, const json& result) {
  json j{{"tool", "gibbs-dyn"}, {"version", kVersion}, {"command", command}, {"config", config}, {"result", result}};
  j["potential"] = potential ? to_json(*potential) : json(nullptr);
  return j;
}

// ---- CSV --------------------------------------------------------------------------------

/// Minimal CSV writer: header row, '.' decimal separator, LF line endings, round-trip precision.
class CsvWriter {
 public:
  CsvWriter(std::ostream& out, const std::vector<std::string>& header) : out_(out), width_(header.size()) {
    write_row_text(header);
  }

  template <class... T>
  void row(const T&... cells) {
    static_assert(sizeof...(T) > 0);
    if (sizeof...(T) != width_) throw ShapeError("CsvWriter: row width does not match the header");
    std::vector<std::string> text{cell(cells)...};
    write_row_text(text);
  }

 private:
  static std::string cell(double x) { return format_double(x); }
  static std::string cell(bool b) { return b ? "true" : "false"; }
  static std::string cell(const std::string& s) { return s; }
  static std::string cell(const char* s) { return s; }
  template <class I>
    requires std::is_integral_v<I>
  static std::string cell(I i) {
    return std::to_string(i);
  }

  void write_row_text(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out_ << ',';
      out_ << cells[i];
    }
    out_ << '\n';
  }

  std::ostream& out_;
  std::size_t width_;
};

inline void write_intervals_csv(std::ostream& out, const BadSetScan& s) {
  CsvWriter w(out, {"t", "lo", "hi", "degenerate", "q_left", "q_right", "from_jump"});
  for (const auto& b : s.intervals) w.row(s.t, b.lo, b.hi, b.degenerate, b.q_left, b.q_right, b.from_jump);
}

inline void write_scan_rows_csv(std::ostream& out, const BadSetScan& s) {
  CsvWriter w(out, {"alpha", "n_minimisers", "q_min", "q_max", "value", "verdict"});
  for (const auto& r : s.rows) w.row(r.alpha, r.n_minimisers, r.q_min, r.q_max, r.value, to_string(r.verdict));
}

inline void write_kernel_csv(std::ostream& out, const KernelEstimate& k) {
  CsvWriter w(out, {"x", "density", "cdf"});
  for (std::size_t i = 0; i < k.grid.size(); ++i) w.row(k.grid[i], k.density[i], k.cumulative[i]);
}

inline void write_paths_csv(std::ostream& out, const std::vector<PathOnGrid>& paths) {
  CsvWriter w(out, {"path", "s", "value"});
  for (std::size_t p = 0; p < paths.size(); ++p) {
    for (std::size_t i = 0; i < paths[p].t_grid.size(); ++i) w.row(p, paths[p].t_grid[i], paths[p].values[i]);
    w.row(p, paths[p].horizon, paths[p].endpoint_alpha);
  }
}

inline void write_samples_csv(std::ostream& out, const EmpiricalKernel& e) {
  if (e.proposal == Proposal::prior) {
    CsvWriter w(out, {"y1"});
    for (double x : e.samples) w.row(x);
  } else {
    CsvWriter w(out, {"y1", "weight"});
    for (std::size_t i = 0; i < e.samples.size(); ++i) w.row(e.samples[i], e.weights[i]);
  }
}

}  // namespace gibbsdyn::io
