#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "symlind/symlind.hpp"

using namespace symlind;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "symlind_cli_tests";
  fs::create_directories(dir);
  return dir / name;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write(const fs::path& p, const json& j) { std::ofstream(p) << j.dump(1); }

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

json rho_json(const Operator& rho) { return io::matrix_to_json(rho); }

json lambda_config(int n, double n0) {
  Operator rho = Operator::Zero(3, 3);
  rho(2, 2) = 0.6;
  rho(1, 1) = 0.3;
  rho(0, 0) = 0.1;
  rho(2, 1) = rho(1, 2) = 0.1;
  return {{"mode", "lambda-analytic"},
          {"N", n},
          {"model", {{"type", "lambda"}, {"gamma20", 0.6}, {"gamma21", 1.1}, {"N0", n0}, {"E", {0.0, 0.5, 1.3}}}},
          {"initial_state", {{"product", rho_json(rho)}}},
          {"t_grid", {{"start", 0.0}, {"stop", 3.0}, {"count", 7}}},
          {"observables", {{{"name", "p2"}, {"dyad", {2, 2}}}, {{"name", "c21"}, {"dyad", {2, 1}}}}}};
}

json unitary_config() {
  Operator h = Operator::Zero(2, 2);
  h(0, 1) = h(1, 0) = 0.0;
  h(0, 0) = 0.5;
  h(1, 1) = -0.5;
  Operator rho(2, 2);
  rho << 0.5, 0.5, 0.5, 0.5;
  return {{"mode", "simulate"},
          {"N", 3},
          {"model", {{"type", "sindip"}, {"M", 2}, {"hamiltonian", rho_json(h)}, {"jumps", json::array()}}},
          {"initial_state", {{"product", rho_json(rho)}}},
          {"t_grid", {{"start", 0.0}, {"stop", 6.0}, {"count", 13}}},
          {"observables",
           {{{"name", "p0"}, {"dyad", {0, 0}}}, {{"name", "p1"}, {"dyad", {1, 1}}}, {{"name", "c"}, {"dyad", {0, 1}}}}}};
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(SYMLIND_CLI_PATH) + " " + args + " 2>/dev/null";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

} // namespace

TEST(Config, RoundTripIsIdempotent) {
  for (const json& j : {lambda_config(3, 0.4), unitary_config()}) {
    const RunConfig a = config_from_json(j);
    const json once = config_to_json(a);
    const json twice = config_to_json(config_from_json(once));
    EXPECT_EQ(once, twice);
  }
  json basis_state = unitary_config();
  basis_state["initial_state"] = {{"basis", {{{"n", {3, 0, 0, 0}}, {"c", 1.0}}}}};
  const json once = config_to_json(config_from_json(basis_state));
  EXPECT_EQ(once, config_to_json(config_from_json(once)));
}

TEST(Config, MissingFieldsAreConfigErrors) {
  json j = unitary_config();
  j.erase("t_grid");
  EXPECT_THROW(config_from_json(j), ConfigError);
  j = unitary_config();
  j["mode"] = "benchmark";
  EXPECT_THROW(config_from_json(j), ConfigError);
  j = unitary_config();
  j["model"]["type"] = "lambda";
  EXPECT_THROW(config_from_json(j), ConfigError);
}

TEST(RunModes, DimsTableMatchesFormula) {
  RunConfig c = config_from_json({{"mode", "dims"}, {"M", 3}, {"N_max", 10}});
  const fs::path out = scratch("dims.csv");
  ASSERT_EQ(run(c, out.string()).exit_code, kExitOk);
  const auto rows = read_csv(out);
  ASSERT_EQ(rows.size(), 11u);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"N", "full_dimension", "symmetric_dimension"}));
  for (int n = 1; n <= 10; ++n) {
    EXPECT_EQ(std::stoll(rows[static_cast<std::size_t>(n)][2]), sym_dimension(3, n));
    std::int64_t full = 1;
    for (int k = 0; k < n; ++k) full *= 9;
    EXPECT_EQ(rows[static_cast<std::size_t>(n)][1], std::to_string(full));
  }
}

TEST(RunModes, UnitarySimulationKeepsPopulations) {
  const fs::path out = scratch("unitary.csv");
  const RunReport rep = run(config_from_json(unitary_config()), out.string());
  ASSERT_EQ(rep.exit_code, kExitOk) << rep.message;
  EXPECT_EQ(rep.sym_size, 20);
  const auto rows = read_csv(out);
  ASSERT_EQ(rows.size(), 14u);
  EXPECT_EQ(rows[0].size(), 7u);
  for (std::size_t k = 1; k < rows.size(); ++k) {
    EXPECT_NEAR(std::stod(rows[k][1]), 1.5, 1e-10);
    EXPECT_NEAR(std::stod(rows[k][3]), 1.5, 1e-10);
    const double re = std::stod(rows[k][5]), im = std::stod(rows[k][6]);
    EXPECT_NEAR(std::hypot(re, im), 1.5, 1e-10);
  }
  // The coherence actually rotates.
  EXPECT_GT(std::abs(std::stod(rows[3][6])), 0.1);
}

TEST(RunModes, LambdaAnalyticDeviationColumnIsSmall) {
  const fs::path out = scratch("lambda.csv");
  const RunReport rep = run(config_from_json(lambda_config(3, 0.0)), out.string());
  ASSERT_EQ(rep.exit_code, kExitOk) << rep.message;
  EXPECT_LE(rep.max_deviation, 1e-8);
  const auto rows = read_csv(out);
  ASSERT_EQ(rows.size(), 8u);
  EXPECT_EQ(rows[0].back(), "max_deviation");
  for (std::size_t k = 1; k < rows.size(); ++k) EXPECT_LE(std::stod(rows[k].back()), 1e-8);
}

TEST(RunModes, JsonOutput) {
  json j = unitary_config();
  j["output"] = {{"format", "json"}};
  const fs::path out = scratch("unitary.json");
  ASSERT_EQ(run(config_from_json(j), out.string()).exit_code, kExitOk);
  const json r = json::parse(slurp(out));
  EXPECT_EQ(r.at("time").size(), 13u);
  EXPECT_EQ(r.at("observables").at("p0").size(), 13u);
}

TEST(RunModes, ValidateReportsAllSuites) {
  const fs::path out = scratch("validate.json");
  const RunReport rep = run(config_from_json({{"mode", "validate"}, {"seed", 5}}), out.string());
  EXPECT_EQ(rep.exit_code, kExitOk) << rep.message;
  const json r = json::parse(slurp(out));
  EXPECT_TRUE(r.at("passed").get<bool>());
  EXPECT_EQ(r.at("checks").size(), 8u);
}

TEST(RunModes, NumericalFailureMapsToExitTwo) {
  json j = unitary_config();
  j["method"] = "krylov";
  j["krylov_dim"] = 2;
  j["tol"] = 1e-14;
  j["N"] = 8;
  j["t_grid"] = {{"start", 0.0}, {"stop", 5000.0}, {"count", 2}};
  const RunReport rep = run(config_from_json(j), scratch("fail.csv").string());
  EXPECT_EQ(rep.exit_code, kExitNumerical) << rep.message;
}

TEST(RunModes, BadInitialStateMapsToExitOne) {
  json j = unitary_config();
  j["initial_state"] = {{"basis", {{{"n", {1, 0, 0, 2}}, {"c", 2.0}}}}};
  const RunReport rep = run(config_from_json(j), scratch("bad.csv").string());
  EXPECT_EQ(rep.exit_code, kExitConfig);
}

TEST(Binary, IdenticalConfigGivesIdenticalOutput) {
  json j = lambda_config(3, 0.5);
  j["seed"] = 11;
  const fs::path cfg = scratch("repeat.json");
  write(cfg, j);
  const fs::path a = scratch("repeat_a.csv"), b = scratch("repeat_b.csv");
  ASSERT_EQ(run_cli("lambda-analytic --config " + cfg.string() + " --out " + a.string()), 0);
  ASSERT_EQ(run_cli("lambda-analytic --config " + cfg.string() + " --out " + b.string()), 0);
  EXPECT_EQ(slurp(a), slurp(b));
  EXPECT_FALSE(slurp(a).empty());
}

TEST(Binary, ExitCodes) {
  const fs::path cfg = scratch("codes.json");
  write(cfg, unitary_config());
  EXPECT_EQ(run_cli("simulate --config " + cfg.string() + " --out " + scratch("codes.csv").string()), 0);
  EXPECT_EQ(run_cli("simulate --config /nonexistent.json --out x.csv"), 1);
  EXPECT_EQ(run_cli("simulate --config " + cfg.string() + " --out x.csv --method rk4"), 1);
  EXPECT_EQ(run_cli("simulate --config " + cfg.string() + " --out x.csv --tol 0.5"), 1);
  EXPECT_EQ(run_cli("simulate --config " + cfg.string() + " --out /nonexistent/dir/x.csv"), 1);
  std::ofstream(scratch("broken.json")) << "{ not json";
  EXPECT_EQ(run_cli("simulate --config " + scratch("broken.json").string() + " --out x.csv"), 1);
  json j = unitary_config();
  j["method"] = "krylov";
  j["krylov_dim"] = 2;
  j["tol"] = 1e-14;
  j["N"] = 8;
  j["t_grid"] = {{"start", 0.0}, {"stop", 5000.0}, {"count", 2}};
  write(scratch("numerical.json"), j);
  EXPECT_EQ(run_cli("simulate --config " + scratch("numerical.json").string() + " --out " + scratch("n.csv").string()), 2);
}
