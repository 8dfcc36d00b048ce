// Copyright 2026 cevnorm developers
// SPDX-License-Identifier: Apache-2.0
#include "cevnorm/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "cevnorm/data.hpp"
#include "cevnorm/error.hpp"
#include "cevnorm/limits.hpp"
#include "cevnorm/parallel.hpp"
#include "cevnorm/rng.hpp"
#include "cevnorm/sample_io.hpp"
#include "cevnorm/simulate.hpp"
#include "cevnorm/stats.hpp"

namespace cevnorm {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

struct Context {
  const ExperimentConfig& cfg;
  Report& report;
  std::vector<fs::path>& files;
};

std::string text_hash(const std::string& text) { return json_hash(json(text)); }

bool wants(const ExperimentConfig& cfg, const std::string& format) {
  return std::find(cfg.formats.begin(), cfg.formats.end(), format) != cfg.formats.end();
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

std::string t_stem(const std::string& prefix, double t) { return prefix + "_t" + format_double(t); }

QuadOptions quad_options(const ExperimentConfig& cfg) {
  QuadOptions q;
  q.abs_tol = cfg.quad_abs_tol;
  return q;
}

ExceedanceSample draw(const ExperimentConfig& cfg, double t) {
  SimulationOptions opts;
  opts.threads = cfg.threads;
  return draw_exceedances(cfg.model, t, cfg.n, cfg.seed, opts);
}

void cmd_simulate(Context& ctx) {
  const auto& cfg = ctx.cfg;
  json samples = json::array();
  for (const double t : cfg.t_list) {
    const auto sample = draw(cfg, t);
    std::ostringstream csv;
    write_csv(csv, sample);
    const std::string stem = t_stem("sample", t);
    json files = json::array();
    if (wants(cfg, "csv")) {
      write_text(cfg.out_dir / (stem + ".csv"), csv.str());
      ctx.files.push_back(cfg.out_dir / (stem + ".csv"));
      files.push_back(stem + ".csv");
    }
    if (wants(cfg, "bin")) {
      write_binary(cfg.out_dir / (stem + ".bin"), sample);
      ctx.files.push_back(cfg.out_dir / (stem + ".bin"));
      files.push_back(stem + ".bin");
    }
    samples.push_back({{"t", t},
                       {"n", sample.size()},
                       {"model_id", sample.model_id},
                       {"files", files},
                       {"csv_hash", text_hash(csv.str())}});
  }
  ctx.report.metrics["samples"] = samples;
}

double ks_margin(const std::vector<double>& w, const NoiseLaw& law) {
  return ks_distance(Ecdf(w), [&](double x) { return noise_cdf(law, x); });
}

void cmd_verify_rn(Context& ctx) {
  const auto& cfg = ctx.cfg;
  json rows = json::array();
  bool delta_ok = true, p_ok = true, ks_ok = true;
  for (const double t : cfg.t_list) {
    const auto normed = apply_random_norming(draw(cfg, t), cfg.model);
    const auto test = permutation_independence_test(normed, cfg.levels, cfg.b, cfg.seed, cfg.threads);
    const double ks1 = ks_margin(normed.w1, cfg.model.noise[0]);
    const double ks2 = ks_margin(normed.w2, cfg.model.noise[1]);
    rows.push_back({{"t", t}, {"n", test.n}, {"delta", test.statistic}, {"p_value", test.p_value},
                    {"ks1", ks1}, {"ks2", ks2}});
    const auto& th = cfg.thresholds;
    if (th.max_delta) delta_ok = delta_ok && test.statistic < *th.max_delta;
    if (th.min_p_value) p_ok = p_ok && test.p_value >= *th.min_p_value;
    if (th.max_ks) ks_ok = ks_ok && ks1 < *th.max_ks && ks2 < *th.max_ks;
  }
  ctx.report.metrics["rows"] = rows;
  ctx.report.metrics["b"] = cfg.b;
  const auto& th = cfg.thresholds;
  if (th.max_delta) ctx.report.verdicts["delta_below_threshold"] = delta_ok;
  if (th.min_p_value) ctx.report.verdicts["independence_not_rejected"] = p_ok;
  if (th.max_ks) ctx.report.verdicts["ks_below_threshold"] = ks_ok;
}

json gap_metrics(const GapResult& gap, const CiModel& model) {
  const auto& cell = gap.cells.at(gap.argmax);
  return {{"gap", gap.gap},
          {"argmax_x1", cell.x1},
          {"argmax_x2", cell.x2},
          {"cells", gap.cells.size()},
          {"factorizes_exactly", factorizes_exactly(model)}};
}

void cmd_verify_dn(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const auto gap = factorization_gap(cfg.model, GridSpec{cfg.grid_levels}, quad_options(cfg), cfg.threads);
  json rows = json::array();
  bool sup_ok = true, consistent = true, p_ok = true;
  const auto& th = cfg.thresholds;
  for (const double t : cfg.t_list) {
    const auto normed = apply_deterministic_norming(draw(cfg, t), cfg.model);
    const auto test = permutation_independence_test(normed, cfg.levels, cfg.b, cfg.seed, cfg.threads);
    const auto ecdf = bivariate_ecdf_grid(normed.w1, normed.w2, gap.x1, gap.x2);
    double sup = 0.0;
    for (std::size_t i = 0; i < ecdf.size(); ++i) sup = std::max(sup, std::abs(ecdf[i] - gap.cells[i].h));
    rows.push_back({{"t", t}, {"n", test.n}, {"delta", test.statistic}, {"p_value", test.p_value},
                    {"sup_ecdf_h", sup}});
    if (th.max_sup_h) sup_ok = sup_ok && sup < *th.max_sup_h;
    if (th.min_p_value) {
      const bool rejected = test.p_value < *th.min_p_value;
      p_ok = p_ok && !rejected;
      if (th.gap_tol) consistent = consistent && rejected == (gap.gap > *th.gap_tol);
    }
  }
  ctx.report.metrics["rows"] = rows;
  ctx.report.metrics["b"] = cfg.b;
  ctx.report.metrics["limit"] = gap_metrics(gap, cfg.model);
  if (th.max_sup_h) ctx.report.verdicts["mixture_law"] = sup_ok;
  if (th.min_p_value && th.gap_tol) {
    ctx.report.verdicts["factorization_consistent_with_gap"] = consistent;
  } else if (th.min_p_value) {
    ctx.report.verdicts["independence_not_rejected"] = p_ok;
  }
}

std::vector<double> quantile_grid(const ExperimentConfig& cfg, Coordinate c) {
  const auto q = quad_options(cfg);
  return parallel_map<double>(cfg.grid_levels.size(), cfg.threads, [&](std::size_t j) {
    return marginal_H_quantile(cfg.model, c, cfg.grid_levels[j], q);
  });
}

std::string surface_text(const std::vector<SurfaceCell>& cells) {
  std::ostringstream out;
  write_surface_csv(out, cells);
  return out.str();
}

void cmd_limit_h(Context& ctx) {
  const auto& cfg = ctx.cfg;
  auto xs1 = cfg.h_x1;
  auto xs2 = cfg.h_x2;
  if (xs1.empty()) {
    xs1 = quantile_grid(cfg, Coordinate::kFirst);
    xs2 = quantile_grid(cfg, Coordinate::kSecond);
  }
  const auto cells = evaluate_surface(cfg.model, xs1, xs2, quad_options(cfg), cfg.threads);
  const std::string text = surface_text(cells);
  write_text(cfg.out_dir / "limit_h.csv", text);
  ctx.files.push_back(cfg.out_dir / "limit_h.csv");

  // Monotone along sorted rows and columns, up to quadrature noise.
  const double slack = 10.0 * cfg.quad_abs_tol;
  const bool sorted = std::is_sorted(xs1.begin(), xs1.end()) && std::is_sorted(xs2.begin(), xs2.end());
  bool monotone = sorted;
  double max_diff = 0.0;
  const std::size_t cols = xs2.size();
  for (std::size_t i = 0; i < cells.size(); ++i) {
    max_diff = std::max(max_diff, std::abs(cells[i].diff));
    if (!sorted) continue;
    if (i % cols > 0 && cells[i].h < cells[i - 1].h - slack) monotone = false;
    if (i >= cols && cells[i].h < cells[i - cols].h - slack) monotone = false;
  }
  ctx.report.metrics["rows"] = xs1.size();
  ctx.report.metrics["columns"] = cols;
  ctx.report.metrics["monotone"] = monotone;
  ctx.report.metrics["max_abs_diff"] = max_diff;
  ctx.report.metrics["corner_h"] = cells.back().h;
  ctx.report.metrics["surface_hash"] = text_hash(text);
  ctx.report.metrics["file"] = "limit_h.csv";
}

void cmd_gap(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const auto gap = factorization_gap(cfg.model, GridSpec{cfg.grid_levels}, quad_options(cfg), cfg.threads);
  const std::string text = surface_text(gap.cells);
  write_text(cfg.out_dir / "gap_surface.csv", text);
  ctx.files.push_back(cfg.out_dir / "gap_surface.csv");
  ctx.report.metrics = gap_metrics(gap, cfg.model);
  ctx.report.metrics["surface_hash"] = text_hash(text);
  if (cfg.thresholds.gap_tol) {
    ctx.report.verdicts["gap_iff_condition"] = (gap.gap <= *cfg.thresholds.gap_tol) == factorizes_exactly(cfg.model);
  }
}

std::array<std::vector<double>, 3> chi_columns(const ExperimentConfig& cfg) {
  const std::size_t n = cfg.n;
  std::array<std::vector<double>, 3> u;
  if (cfg.chi_source == "data") {
    if (cfg.data_path.empty()) throw ConfigError("data.path", "required when analysis.chi_source is data");
    const auto ds = load_csv(cfg.data_path, cfg.conditioning_column, cfg.value_columns, cfg.delimiter);
    return {pseudo_observations(ds.x0), pseudo_observations(ds.x1), pseudo_observations(ds.x2)};
  }
  if (cfg.chi_source == "model") {
    const auto sample = draw(cfg, cfg.t_list.front());
    return {pseudo_observations(sample.x0), pseudo_observations(sample.x1), pseudo_observations(sample.x2)};
  }
  for (auto& col : u) col.resize(n);
  const bool comonotone = cfg.chi_source == "comonotone";
  parallel_ranges(n, cfg.threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      CounterStream rng(cfg.seed, StreamId::kSynthetic, i);
      u[0][i] = rng.next_uniform();
      u[1][i] = comonotone ? u[0][i] : rng.next_uniform();
      u[2][i] = comonotone ? u[0][i] : rng.next_uniform();
    }
  });
  return u;
}

void cmd_chi(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const auto u = chi_columns(cfg);
  json ladder = json::array();
  bool decreasing = true;
  double previous = HUGE_VAL;
  for (const double p : cfg.chi_levels) {
    const double chi = chi_hat(u[0], u[1], u[2], p);
    ladder.push_back({{"p", p}, {"chi", chi}});
    decreasing = decreasing && chi < previous;
    previous = chi;
  }
  ctx.report.metrics["source"] = cfg.chi_source;
  ctx.report.metrics["n"] = u[0].size();
  ctx.report.metrics["chi"] = ladder;
  ctx.report.metrics["strictly_decreasing"] = decreasing;
  if (cfg.thresholds.chi_decreasing) {
    ctx.report.verdicts["chi_decreasing"] = decreasing == *cfg.thresholds.chi_decreasing;
  }
}

void cmd_diagnose(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const auto ds = load_csv(cfg.data_path, cfg.conditioning_column, cfg.value_columns, cfg.delimiter);
  const auto fits = fit_dataset(ds, cfg.family, cfg.p_t, cfg.threads);
  const auto ex = select_exceedances(ds, cfg.p_t);
  const auto residuals = fitted_residuals(ex, fits);
  const auto test = permutation_independence_test(residuals[0], residuals[1], cfg.levels, cfg.b, cfg.seed, cfg.threads);

  write_fits_json(cfg.out_dir / "fits.json", fits);
  write_residuals_csv(cfg.out_dir / "residuals.csv", residuals);
  ctx.files.push_back(cfg.out_dir / "fits.json");
  ctx.files.push_back(cfg.out_dir / "residuals.csv");

  auto& m = ctx.report.metrics;
  m["rows"] = ds.size();
  m["dropped_rows"] = ds.dropped_rows;
  m["exceedances"] = ex.x0.size();
  m["fits"] = json::parse(fits_to_json(fits, -1));
  m["statistic"] = test.statistic;
  m["p_value"] = test.p_value;
  m["b"] = test.b;
  if (cfg.thresholds.min_p_value) {
    ctx.report.verdicts["conditional_independence_not_rejected"] = test.p_value >= *cfg.thresholds.min_p_value;
  }
}

// Preconditions that need no computation, checked before any output is written.
void precheck(const std::string& name, const ExperimentConfig& cfg) {
  if (name == "diagnose" && cfg.data_path.empty()) throw ConfigError("data.path", "required by diagnose");
  if (name == "chi" && cfg.chi_source == "data" && cfg.data_path.empty()) {
    throw ConfigError("data.path", "required when analysis.chi_source is data");
  }
  if ((name == "simulate" || name == "verify-rn" || name == "verify-dn" ||
       (name == "chi" && cfg.chi_source == "model"))) {
    const std::size_t need = cfg.n * 3 * sizeof(double);
    if (need > SimulationOptions{}.memory_budget_bytes) {
      throw CapacityError("run.n = " + std::to_string(cfg.n) + " exceeds the simulation memory budget");
    }
  }
  if ((name == "verify-rn" || name == "verify-dn") && cfg.n < 10) {
    throw ConfigError("run.n", "the factorization statistic needs n >= 10");
  }
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"simulate", "verify-rn", "verify-dn", "limit-h", "gap", "chi", "diagnose"};
  return names;
}

std::string command_summary(const std::string& name) {
  if (name == "simulate") return "Draw threshold exceedances (X0, X1, X2) given X0 > t and write CSV/binary samples";
  if (name == "verify-rn") return "Random norming: factorization statistic, permutation p-value, margin KS distances";
  if (name == "verify-dn") return "Deterministic norming: ECDF versus quadrature mixture law and factorization test";
  if (name == "limit-h") return "Export the mixture limit law H on a grid";
  if (name == "gap") return "Factorization gap sup |H - H1 H2| on the quantile grid";
  if (name == "chi") return "Empirical chi coefficient over a probability ladder";
  if (name == "diagnose") return "Fit normings to a CSV and test conditional independence of the residuals";
  return {};
}

CommandResult run_command(const std::string& name, const ExperimentConfig& config) {
  using Handler = void (*)(Context&);
  Handler handler = nullptr;
  if (name == "simulate") handler = cmd_simulate;
  if (name == "verify-rn") handler = cmd_verify_rn;
  if (name == "verify-dn") handler = cmd_verify_dn;
  if (name == "limit-h") handler = cmd_limit_h;
  if (name == "gap") handler = cmd_gap;
  if (name == "chi") handler = cmd_chi;
  if (name == "diagnose") handler = cmd_diagnose;
  if (handler == nullptr) throw ConfigError("command", "unknown command '" + name + "'");

  precheck(name, config);
  std::error_code ec;
  fs::create_directories(config.out_dir, ec);
  if (ec) throw IoError("cannot create output directory '" + config.out_dir.string() + "': " + ec.message());

  CommandResult result;
  result.report = make_report(name, config);
  const auto start = std::chrono::steady_clock::now();
  Context ctx{config, result.report, result.files};
  handler(ctx);
  result.report.wall_clock_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  result.report_path = write_report(config.out_dir, result.report);
  return result;
}

int exit_code_for(const std::exception& error) {
  if (dynamic_cast<const ConvergenceError*>(&error) != nullptr) return kExitNonConvergence;
  if (dynamic_cast<const IoError*>(&error) != nullptr) return kExitData;
  if (dynamic_cast<const DataError*>(&error) != nullptr) return kExitData;
  return kExitUsage;
}

}  // namespace cevnorm
