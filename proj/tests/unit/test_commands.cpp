// Copyright 2026 cevnorm developers
// SPDX-License-Identifier: Apache-2.0
#include "cevnorm/commands.hpp"

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cevnorm/error.hpp"
#include "cevnorm/limits.hpp"
#include "cevnorm/sample_io.hpp"
#include "cevnorm/simulate.hpp"
#include "cevnorm/stats.hpp"
#include "doctest.h"

using namespace cevnorm;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "cevnorm_test_commands" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

ExperimentConfig config(json doc, const fs::path& out) {
  doc["io"]["out_dir"] = out.string();
  return resolve_config(doc, {});
}

struct CliRun {
  int exit_code;
  std::string output;
};

// Runs the cevnorm binary with `args`, capturing stdout and stderr.
CliRun cli(const std::string& args) {
  const auto log = fs::temp_directory_path() / "cevnorm_test_commands" / "cli.log";
  fs::create_directories(log.parent_path());
  const std::string cmd = std::string("\"") + CEVNORM_CLI_PATH + "\" " + args + " > \"" + log.string() + "\" 2>&1";
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(log)};
}

}  // namespace

TEST_CASE("simulate writes byte-identical samples") {
  const auto a = scratch("sim");
  const json doc = {{"run", {{"n", 10}, {"seed", 1}}}};
  const auto ra = run_command("simulate", config(doc, a));
  const std::string first = slurp(ra.files[0]);
  const auto rb = run_command("simulate", config(doc, a));
  REQUIRE(ra.files.size() == 1);
  CHECK(ra.files[0].filename() == "sample_t50.csv");
  const std::string text = slurp(rb.files[0]);
  CHECK(text == first);
  CHECK(std::count(text.begin(), text.end(), '\n') == 11);
  CHECK(ra.report.determinism_hash() == rb.report.determinism_hash());
  CHECK(ra.exit_code() == kExitPass);
  CHECK(fs::exists(a / "simulate_report.json"));

  const auto many = run_command("simulate", config({{"run", {{"n", 10}, {"t_list", {2, 20.5, 300}}}},
                                                    {"io", {{"formats", {"csv", "bin"}}}}},
                                                   scratch("sim_many")));
  CHECK(many.files.size() == 6);
  CHECK(many.report.metrics["samples"].size() == 3);
  CHECK(fs::exists(many.files[0].parent_path() / "sample_t20.5.bin"));
}

TEST_CASE("verify-rn passes on the model and fails on the coupled control") {
  const json th = {{"max_delta", 0.012}, {"min_p_value", 0.01}, {"max_ks", 0.01}};
  json doc = {{"run", {{"n", 100000}, {"seed", 3}}}, {"analysis", {{"b", 199}, {"thresholds", th}}}};
  const auto pass = run_command("verify-rn", config(doc, scratch("rn_pass")));
  CHECK(pass.exit_code() == kExitPass);
  const auto& row = pass.report.metrics["rows"][0];
  CHECK(row["delta"].get<double>() < 0.012);
  CHECK(row["ks1"].get<double>() < 0.01);

  doc["model"]["coupled_noise"] = true;
  doc["run"]["n"] = 2000;
  const auto fail = run_command("verify-rn", config(doc, scratch("rn_fail")));
  CHECK(fail.exit_code() == kExitVerdictFail);
  CHECK(fail.report.metrics["rows"][0]["p_value"].get<double>() == doctest::Approx(1.0 / 200.0));
  CHECK_FALSE(fail.report.verdicts.at("independence_not_rejected"));
}

TEST_CASE("random and deterministic norming coincide for constant normings") {
  const json flat = {{"a", 1.0}, {"rho", 0.0}, {"kappa", 0.0}};
  const json doc = {{"model", {{"erv1", flat}, {"erv2", flat}}},
                    {"run", {{"n", 3000}, {"t_list", {5, 50}}}},
                    {"analysis", {{"b", 99}, {"grid_levels", {0.25, 0.5, 0.75}}}}};
  const auto rn = run_command("verify-rn", config(doc, scratch("flat_rn")));
  const auto dn = run_command("verify-dn", config(doc, scratch("flat_dn")));
  for (std::size_t k = 0; k < 2; ++k) {
    CHECK(rn.report.metrics["rows"][k]["delta"] == dn.report.metrics["rows"][k]["delta"]);
    CHECK(rn.report.metrics["rows"][k]["p_value"] == dn.report.metrics["rows"][k]["p_value"]);
  }
}

TEST_CASE("verify-dn matches the mixture law and rejects factorization") {
  const json th = {{"max_sup_h", 0.01}, {"min_p_value", 0.01}, {"gap_tol", 1e-8}};
  const json doc = {{"run", {{"n", 100000}, {"seed", 5}}}, {"analysis", {{"b", 199}, {"thresholds", th}}}};
  const auto r = run_command("verify-dn", config(doc, scratch("dn")));
  const auto& row = r.report.metrics["rows"][0];
  CHECK(row["sup_ecdf_h"].get<double>() < 0.01);
  CHECK(row["p_value"].get<double>() < 0.01);
  CHECK(r.report.metrics["limit"]["gap"].get<double>() > 0.05);
  CHECK(r.exit_code() == kExitPass);
}

TEST_CASE("verify-dn keeps size when one coordinate has constant normings") {
  json doc = {{"model", {{"erv1", {{"rho", 0.0}, {"kappa", 0.0}}}}},
              {"run", {{"n", 2000}}},
              {"analysis", {{"b", 199}, {"grid_levels", {0.25, 0.5, 0.75}}, {"thresholds", {{"min_p_value", 0.01}}}}}};
  const auto out = scratch("dn_size");
  int not_rejected = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    doc["run"]["seed"] = seed;
    const auto r = run_command("verify-dn", config(doc, out));
    not_rejected += r.report.verdicts.at("independence_not_rejected") ? 1 : 0;
  }
  CHECK(not_rejected >= 95);
}

TEST_CASE("limit-h surface") {
  const auto out = scratch("limit_h");
  const std::vector<double> xs{-1.0, 0.0, 1.0, 2.0, 3.0};
  const auto r = run_command("limit-h", config({{"analysis", {{"h_grid", {{"x1", xs}, {"x2", xs}}}}}}, out));
  CHECK(r.report.metrics["monotone"] == true);
  CHECK(r.report.metrics["rows"] == 5);
  CHECK(r.report.verdicts.empty());

  // Spot values against the ECDF of a large deterministic-normed sample.
  const CiModel model = ExperimentConfig::default_model();
  const auto normed = apply_deterministic_norming(draw_exceedances(model, 50.0, 1000000, 77), model);
  const auto ecdf = bivariate_ecdf_grid(normed.w1, normed.w2, xs, xs);
  std::ifstream in(out / "limit_h.csv");
  std::string line;
  std::getline(in, line);
  CHECK(line == "x1,x2,H,H1H2,diff");
  double worst = 0.0;
  for (std::size_t i = 0; std::getline(in, line); ++i) {
    std::stringstream row(line);
    std::string cell;
    for (int k = 0; k < 3; ++k) std::getline(row, cell, ',');
    worst = std::max(worst, std::abs(std::stod(cell) - ecdf.at(i)));
  }
  CHECK(worst < 0.003);

  const auto corner = run_command(
      "limit-h", config({{"analysis", {{"h_grid", {{"x1", {0.0, 1e4}}, {"x2", {0.0, 1e4}}}}}}}, scratch("corner")));
  CHECK(corner.report.metrics["corner_h"].get<double>() == doctest::Approx(1.0).epsilon(1e-6));

  const auto quantile = run_command("limit-h", config(json(), scratch("limit_q")));
  CHECK(quantile.report.metrics["rows"] == 19);
  CHECK(quantile.report.metrics["monotone"] == true);
}

TEST_CASE("gap command") {
  const json degenerate = {{"erv2", {{"rho", 0.0}, {"kappa", 0.0}}}};
  const json th = {{"gap_tol", 1e-8}};
  const auto flat = run_command("gap", config({{"model", degenerate}, {"analysis", {{"thresholds", th}}}}, scratch("g0")));
  CHECK(flat.report.metrics["gap"].get<double>() <= 1e-8);
  CHECK(flat.report.metrics["factorizes_exactly"] == true);
  CHECK(flat.exit_code() == kExitPass);

  const json doc = {{"analysis", {{"thresholds", th}}}};
  const auto out = scratch("g1");
  const auto a = run_command("gap", config(doc, out));
  const std::string surface = slurp(a.files[0]);
  const auto b = run_command("gap", config(doc, out));
  CHECK(a.report.metrics["gap"].get<double>() > 0.01);
  CHECK(a.exit_code() == kExitPass);
  CHECK(a.report.metrics["surface_hash"] == b.report.metrics["surface_hash"]);
  CHECK(a.report.determinism_hash() == b.report.determinism_hash());
  CHECK(slurp(b.files[0]) == surface);
}

TEST_CASE("chi command") {
  json doc = {{"run", {{"n", 200000}}}, {"analysis", {{"chi_source", "comonotone"}}}};
  const auto co = run_command("chi", config(doc, scratch("chi")));
  for (const auto& level : co.report.metrics["chi"]) CHECK(level["chi"] == 1.0);

  doc["analysis"]["chi_source"] = "independent";
  doc["analysis"]["chi_levels"] = {0.9, 0.95};
  const auto ind = run_command("chi", config(doc, scratch("chi")));
  for (const auto& level : ind.report.metrics["chi"]) {
    const double q = 1.0 - level["p"].get<double>();
    CHECK(std::abs(level["chi"].get<double>() - q * q) < 0.003);
  }
  CHECK(ind.report.metrics["strictly_decreasing"] == true);
}

TEST_CASE("diagnose on simulated data") {
  const auto out = scratch("diagnose");
  const auto sim = run_command("simulate", config({{"run", {{"n", 20000}, {"t", 1}, {"seed", 11}}}}, out));
  json doc = {{"data", {{"path", sim.files[0].string()}}},
              {"analysis", {{"b", 199}, {"thresholds", {{"min_p_value", 0.01}}}}}};
  const auto r = run_command("diagnose", config(doc, out));
  CHECK(r.exit_code() == kExitPass);
  CHECK(r.report.metrics["exceedances"] == 1000);
  CHECK(r.report.metrics["dropped_rows"] == 0);
  CHECK(std::abs(r.report.metrics["fits"]["coordinate1"]["erv"]["rho"].get<double>() - 0.5) < 0.15);
  CHECK(fs::exists(out / "fits.json"));
  CHECK(fs::exists(out / "residuals.csv"));

  std::ofstream(out / "small.csv") << "x0,x1,x2\n1,2,3\n";
  doc["data"]["path"] = (out / "small.csv").string();
  CHECK_THROWS_AS(run_command("diagnose", config(doc, out)), PreconditionError);
  CHECK_THROWS_AS(run_command("diagnose", config(json(), out)), ConfigError);
}

TEST_CASE("exit codes through the CLI") {
  const auto out = scratch("cli");
  const std::string o = " --out \"" + out.string() + "\"";

  auto r = cli("simulate --run.n 10" + o);
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("sample_t50.csv") != std::string::npos);

  r = cli("simulate --model.erv1.rho x" + o);
  CHECK(r.exit_code == 2);
  CHECK(r.output.find("model.erv1.rho") != std::string::npos);

  std::ofstream(out / "bad.json") << R"({"schema": 1, "model": {"erv1": {"rho": "x"}}})";
  r = cli("simulate --config \"" + (out / "bad.json").string() + "\"" + o);
  CHECK(r.exit_code == 2);
  CHECK(r.output.find("model.erv1.rho") != std::string::npos);

  r = cli("verify-dn --run.n 100 --analysis.grid_levels \"\"" + o);
  CHECK(r.exit_code == 2);
  CHECK(r.output.find("analysis.grid_levels") != std::string::npos);

  r = cli("verify-rn --run.n 500 --analysis.b 199 --model.coupled_noise true --analysis.thresholds.min_p_value 0.01" + o);
  CHECK(r.exit_code == 1);
  CHECK(r.output.find("FAIL independence_not_rejected") != std::string::npos);

  r = cli("diagnose --data.path \"" + (out / "absent.csv").string() + "\"" + o);
  CHECK(r.exit_code == 3);

  std::ofstream(out / "tiny.csv") << "x0,x1,x2\n1,2,3\n2,3,4\n";
  r = cli("diagnose --data.path \"" + (out / "tiny.csv").string() + "\"" + o);
  CHECK(r.exit_code == 2);

  r = cli("simulate --run.n 10 --no-such-flag 1" + o);
  CHECK(r.exit_code == 2);
  r = cli("");
  CHECK(r.exit_code == 2);
}

TEST_CASE("--help lists every flag") {
  for (const auto& name : command_names()) {
    const auto r = cli(name + " --help");
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("--config") != std::string::npos);
    for (const auto& key : config_keys()) {
      INFO(name, " --", key.flag);
      const bool listed = r.output.find("--" + key.flag + " ") != std::string::npos ||
                          r.output.find("--" + key.flag + "\n") != std::string::npos;
      CHECK(listed);
    }
  }
}

TEST_CASE("thread count does not change reports") {
  const auto out = scratch("threads");
  const json doc = {{"run", {{"n", 5000}}}, {"analysis", {{"b", 99}, {"chi_levels", {0.5, 0.9}}}}};
  for (const auto& name : {"simulate", "verify-rn", "chi"}) {
    json d1 = doc, d4 = doc;
    d1["run"]["threads"] = 1;
    d4["run"]["threads"] = 4;
    const auto a = run_command(name, config(d1, out));
    const auto b = run_command(name, config(d4, out));
    CHECK(a.report.deterministic_part().dump() == b.report.deterministic_part().dump());
  }
}

TEST_CASE("error mapping") {
  CHECK(exit_code_for(ConfigError("x", "y")) == kExitUsage);
  CHECK(exit_code_for(DomainError("x")) == kExitUsage);
  CHECK(exit_code_for(PreconditionError("x")) == kExitUsage);
  CHECK(exit_code_for(IoError("x")) == kExitData);
  CHECK(exit_code_for(DataError("x")) == kExitData);
  CHECK(exit_code_for(ConvergenceError("x", 0.0, 0.0)) == kExitNonConvergence);
  CHECK_THROWS_AS(run_command("frobnicate", resolve_config(json(), {})), ConfigError);
}
