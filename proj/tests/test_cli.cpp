#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"

using namespace gibbsdyn;
using io::json;

namespace {
struct Result {
  int code;
  std::string out, err;
};

Result call(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string potential(const char* name) { return std::string(GIBBSDYN_POTENTIALS_DIR) + "/" + name + ".json"; }

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

std::filesystem::path scratch(const std::string& name) {
  const auto p = std::filesystem::temp_directory_path() / ("gibbs_dyn_cli_" + name);
  std::filesystem::remove_all(p);
  return p;
}
}  // namespace

TEST(Cli, CrossoverReport) {
  const auto r = call({"tc", "--potential", potential("cosine_well_beta1")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = json::parse(r.out);
  EXPECT_NEAR(j.at("result").at("t_c").get<double>(), 1.0, 1e-9);
  EXPECT_EQ(j.at("result").at("gibbs_at_tc"), "gibbs");
  EXPECT_EQ(j.at("command"), "tc");
}

TEST(Cli, BadScanCsvFindsTheOrigin) {
  const auto r = call({"bad-scan", "--potential", potential("doublewell"), "--t", "1"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.rfind("t,lo,hi,degenerate", 0), 0u);
  EXPECT_NE(r.out.find("\n1,0,0,true,"), std::string::npos);
}

TEST(Cli, KernelMomentsForZeroPotential) {
  const auto r = call({"kernel", "--potential", potential("zero"), "--n", "20", "--t", "1", "--alpha", "0.4"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto m = json::parse(r.out).at("result");
  EXPECT_NEAR(m.at("mean").get<double>(), 0.0, 1e-9);
  EXPECT_NEAR(m.at("variance").get<double>(), 2.0, 1e-9);
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(call({"kernel", "--potential", potential("doublewell"), "--kind", "limit", "--t", "1", "--alpha", "0"}).code,
            cli::domain_error);
  EXPECT_EQ(call({"tc", "--potential", potential("zero"), "--bogus"}).code, cli::io_error);
  EXPECT_EQ(call({"tc", "--potential", "/nonexistent.json"}).code, cli::io_error);
  EXPECT_EQ(call({"kernel", "--potential", potential("zero"), "--n", "1", "--t", "1"}).code, cli::domain_error);
  EXPECT_EQ(call({"simulate", "--potential", potential("doublewell"), "--n", "16", "--t", "1", "--replicas", "500",
                  "--binwidth", "0.0001", "--reference", "none"})
                .code,
            cli::numerical_error);
}

TEST(Cli, TieOracleCommand) {
  const auto below = call({"oracle", "--potential", potential("doublewell"), "--beta", "3.99", "--grid", "121"});
  ASSERT_EQ(below.code, 0) << below.err;
  const auto r = json::parse(below.out).at("result");
  EXPECT_EQ(r.at("multiple_minimisers"), true);
  EXPECT_EQ(r.at("phi2_below"), true);
  const auto above = call({"oracle", "--potential", potential("doublewell"), "--beta", "4.01", "--grid", "121"});
  ASSERT_EQ(above.code, 0) << above.err;
  EXPECT_EQ(json::parse(above.out).at("result").at("multiple_minimisers"), false);
}

TEST(Cli, EveryCommandRuns) {
  const auto dw = potential("doublewell");
  for (const auto& args : std::vector<std::vector<std::string>>{
           {"eta", "--potential", dw, "--n", "16", "--t", "0.5"},
           {"traj", "--potential", dw, "--t", "1", "--grid", "16"},
           {"limitpot", "--potential", dw, "--t", "1", "--grid", "11"},
           {"kernel", "--potential", dw, "--kind", "initial", "--n", "16", "--alpha", "0.2"},
           {"kernel", "--potential", dw, "--kind", "limit", "--t", "1", "--alpha", "0.5"}}) {
    const auto r = call(args);
    EXPECT_EQ(r.code, 0) << args.front() << ": " << r.err;
  }
}

TEST(Cli, RerunReproducesOutputs) {
  const auto first = scratch("first"), second = scratch("second");
  ASSERT_EQ(call({"bad-scan", "--potential", potential("doublewell"), "--t", "0.5", "--format", "both", "--out",
                  first.string()})
                .code,
            0);
  ASSERT_EQ(call({"rerun", "--report", (first / "bad-scan.json").string(), "--out", second.string()}).code, 0);
  std::size_t files = 0;
  for (const auto& e : std::filesystem::directory_iterator(first)) {
    ++files;
    EXPECT_EQ(slurp(e.path()), slurp(second / e.path().filename())) << e.path();
  }
  EXPECT_GE(files, 2u);
  std::filesystem::remove_all(first);
  std::filesystem::remove_all(second);
}

TEST(Cli, OptionsRoundTripThroughJson) {
  cli::Options o;
  o.command = "simulate";
  o.n = 32;
  o.t = 0.25;
  o.seed = 99;
  o.proposal = "bin_tilted";
  const auto back = cli::options_from_json(cli::options_to_json(o));
  EXPECT_EQ(cli::options_to_json(back), cli::options_to_json(o));
}

TEST(Cli, SimulateIsSeeded) {
  const std::vector<std::string> args{"simulate", "--potential", potential("zero"), "--n", "8", "--t", "1",
                                      "--replicas", "5000", "--binwidth", "0.2", "--seed", "3"};
  const auto a = call(args), b = call(args);
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
}

TEST(Cli, BinaryRunsStandalone) {
  const std::string cmd = std::string(GIBBSDYN_CLI_PATH) + " tc --potential " + potential("doublewell") + " > /dev/null 2>&1";
  EXPECT_EQ(std::system(cmd.c_str()), 0);
  const std::string bad = std::string(GIBBSDYN_CLI_PATH) + " nosuchcommand > /dev/null 2>&1";
  EXPECT_NE(std::system(bad.c_str()), 0);
}
