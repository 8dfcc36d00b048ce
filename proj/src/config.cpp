// Copyright 2026 cevnorm developers
// SPDX-License-Identifier: Apache-2.0
#include "cevnorm/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

#include "cevnorm/error.hpp"
#include "cevnorm/limits.hpp"
#include "cevnorm/quadrature.hpp"

namespace cevnorm {
namespace {

using nlohmann::json;
using Overrides = std::map<std::string, json>;

std::vector<ConfigKey> build_keys() {
  std::vector<ConfigKey> keys;
  auto add = [&](std::string path, KeyType type, std::string help, std::string flag = {}) {
    if (flag.empty()) flag = path;
    keys.push_back({std::move(path), type, std::move(flag), std::move(help)});
  };
  add("schema", KeyType::kInteger, "config schema version (must be 1)");
  for (const char* coord : {"1", "2"}) {
    const std::string erv = std::string("model.erv") + coord;
    add(erv + ".a", KeyType::kNumber, "alpha scale a > 0, coordinate " + std::string(coord));
    add(erv + ".rho", KeyType::kNumber, "regular-variation index rho, coordinate " + std::string(coord));
    add(erv + ".kappa", KeyType::kNumber, "beta slope kappa, coordinate " + std::string(coord));
  }
  for (const char* coord : {"1", "2"}) {
    const std::string noise = std::string("model.noise") + coord;
    add(noise + ".family", KeyType::kString, "gaussian|gumbel|logistic|uniform, coordinate " + std::string(coord));
    add(noise + ".location", KeyType::kNumber, "noise location, coordinate " + std::string(coord));
    add(noise + ".scale", KeyType::kNumber, "noise scale > 0, coordinate " + std::string(coord));
  }
  add("model.perturbation", KeyType::kNumber, "finite-threshold perturbation eps_p >= 0");
  add("model.coupled_noise", KeyType::kBool, "negative control: drive Z2 by the uniform of Z1");
  add("run.t", KeyType::kNumber, "threshold t >= 1 (exclusive with run.t_list)");
  add("run.t_list", KeyType::kNumberList, "comma-separated thresholds (exclusive with run.t)");
  add("run.n", KeyType::kInteger, "exceedances per threshold");
  add("run.seed", KeyType::kInteger, "64-bit seed", "seed");
  add("run.threads", KeyType::kInteger, "worker cap; never changes results (default $CEVNORM_THREADS or 1)",
      "threads");
  add("analysis.levels", KeyType::kNumberList, "probability levels of the factorization-statistic grid");
  add("analysis.b", KeyType::kInteger, "permutation replicates (>= 99)");
  add("analysis.quad_abs_tol", KeyType::kNumber, "quadrature absolute tolerance");
  add("analysis.grid_levels", KeyType::kNumberList, "probability levels of the quadrature quantile grid");
  add("analysis.chi_levels", KeyType::kNumberList, "chi probability ladder");
  add("analysis.chi_source", KeyType::kString, "model|comonotone|independent|data");
  add("analysis.h_grid.x1", KeyType::kNumberList, "explicit limit-h grid, coordinate 1");
  add("analysis.h_grid.x2", KeyType::kNumberList, "explicit limit-h grid, coordinate 2");
  add("analysis.thresholds.max_delta", KeyType::kNumber, "pass requires factorization statistic below this");
  add("analysis.thresholds.min_p_value", KeyType::kNumber, "test level; pass requires p-value at or above it");
  add("analysis.thresholds.max_ks", KeyType::kNumber, "pass requires both margin KS distances below this");
  add("analysis.thresholds.max_sup_h", KeyType::kNumber, "pass requires sup |ECDF - H| below this");
  add("analysis.thresholds.gap_tol", KeyType::kNumber, "gaps above this count as non-factorizing");
  add("analysis.thresholds.chi_decreasing", KeyType::kBool, "pass requires chi strictly decreasing");
  add("data.path", KeyType::kString, "input CSV");
  add("data.conditioning_column", KeyType::kString, "conditioning column name");
  add("data.value_columns", KeyType::kStringList, "two response column names");
  add("data.delimiter", KeyType::kString, "single-character field delimiter, or 'tab'");
  add("data.p_t", KeyType::kNumber, "threshold quantile in (0,1)");
  add("data.family", KeyType::kString, "noise family used by the fit");
  add("io.out_dir", KeyType::kString, "output directory", "out");
  add("io.formats", KeyType::kStringList, "sample formats: csv, bin");
  return keys;
}

const ConfigKey* find_key(const std::string& path) {
  for (const auto& key : config_keys()) {
    if (key.path == path) return &key;
  }
  return nullptr;
}

void flatten(const json& node, const std::string& prefix, Overrides& out) {
  if (!node.is_object()) throw ConfigError(prefix, "expected an object");
  for (const auto& [name, value] : node.items()) {
    const std::string path = prefix.empty() ? name : prefix + "." + name;
    if (value.is_object()) {
      const bool is_block = std::any_of(config_keys().begin(), config_keys().end(),
                                        [&](const ConfigKey& k) { return k.path.rfind(path + ".", 0) == 0; });
      if (!is_block) throw ConfigError(path, "unknown key");
      flatten(value, path, out);
      continue;
    }
    if (find_key(path) == nullptr) throw ConfigError(path, "unknown key");
    out[path] = value;
  }
}

class Reader {
 public:
  explicit Reader(Overrides values) : values_(std::move(values)) {}

  bool has(const std::string& path) const { return values_.count(path) != 0; }

  double number(const std::string& path, double fallback) const {
    const json* v = get(path);
    if (v == nullptr) return fallback;
    return as_number(*v, path);
  }

  std::optional<double> optional_number(const std::string& path) const {
    const json* v = get(path);
    if (v == nullptr) return std::nullopt;
    return as_number(*v, path);
  }

  std::uint64_t integer(const std::string& path, std::uint64_t fallback) const {
    const json* v = get(path);
    if (v == nullptr) return fallback;
    // Parsed documents store non-negative integers as unsigned; built ones may not.
    if (!v->is_number_integer()) throw ConfigError(path, "expected an integer");
    if (!v->is_number_unsigned() && v->get<std::int64_t>() < 0) {
      throw ConfigError(path, "expected a non-negative integer");
    }
    return v->get<std::uint64_t>();
  }

  std::optional<bool> optional_boolean(const std::string& path) const {
    const json* v = get(path);
    if (v == nullptr) return std::nullopt;
    if (!v->is_boolean()) throw ConfigError(path, "expected true or false");
    return v->get<bool>();
  }

  std::string string(const std::string& path, const std::string& fallback) const {
    const json* v = get(path);
    if (v == nullptr) return fallback;
    if (!v->is_string()) throw ConfigError(path, "expected a string");
    return v->get<std::string>();
  }

  std::vector<double> numbers(const std::string& path, std::vector<double> fallback) const {
    const json* v = get(path);
    if (v == nullptr) return fallback;
    if (!v->is_array()) throw ConfigError(path, "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v->size(); ++i) out.push_back(as_number((*v)[i], path + "[" + std::to_string(i) + "]"));
    return out;
  }

  std::vector<std::string> strings(const std::string& path, std::vector<std::string> fallback) const {
    const json* v = get(path);
    if (v == nullptr) return fallback;
    if (!v->is_array()) throw ConfigError(path, "expected an array of strings");
    std::vector<std::string> out;
    for (std::size_t i = 0; i < v->size(); ++i) {
      if (!(*v)[i].is_string()) throw ConfigError(path + "[" + std::to_string(i) + "]", "expected a string");
      out.push_back((*v)[i].get<std::string>());
    }
    return out;
  }

 private:
  const json* get(const std::string& path) const {
    const auto it = values_.find(path);
    return it == values_.end() ? nullptr : &it->second;
  }

  static double as_number(const json& v, const std::string& path) {
    if (!v.is_number()) throw ConfigError(path, "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw ConfigError(path, "expected a finite number");
    return x;
  }

  Overrides values_;
};

// Runs a module validator and re-raises its message under a config path.
template <class Fn>
void check_at(const std::string& path, Fn&& fn) {
  try {
    fn();
  } catch (const DomainError& e) {
    throw ConfigError(path, e.what());
  }
}

void check_levels(const std::string& path, const std::vector<double>& levels) {
  check_at(path, [&] { GridSpec{levels}.validate(); });
}

unsigned default_threads() {
  const char* env = std::getenv("CEVNORM_THREADS");
  if (env == nullptr || *env == '\0') return 1;
  unsigned value = 0;
  const char* end = env + std::char_traits<char>::length(env);
  const auto res = std::from_chars(env, end, value);
  if (res.ec != std::errc{} || res.ptr != end || value == 0) {
    throw ConfigError("CEVNORM_THREADS", "expected a positive integer");
  }
  return value;
}

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (const unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

json thresholds_to_json(const Thresholds& th) {
  json out = json::object();
  if (th.max_delta) out["max_delta"] = *th.max_delta;
  if (th.min_p_value) out["min_p_value"] = *th.min_p_value;
  if (th.max_ks) out["max_ks"] = *th.max_ks;
  if (th.max_sup_h) out["max_sup_h"] = *th.max_sup_h;
  if (th.gap_tol) out["gap_tol"] = *th.gap_tol;
  if (th.chi_decreasing) out["chi_decreasing"] = *th.chi_decreasing;
  return out;
}

std::string delimiter_name(char d) { return d == '\t' ? "tab" : std::string(1, d); }

}  // namespace

const std::vector<ConfigKey>& config_keys() {
  static const std::vector<ConfigKey> keys = build_keys();
  return keys;
}

CiModel ExperimentConfig::default_model() {
  CiModel model;
  model.erv = {ErvParams{1.0, 0.5, 1.0}, ErvParams{1.0, 0.5, 1.0}};
  return model;
}

json parse_flag_value(const ConfigKey& key, std::string_view text) {
  auto parse_number = [&](std::string_view s) -> double {
    double x = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), x);
    if (s.empty() || res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
      throw ConfigError(key.path, "expected a number, got '" + std::string(s) + "'");
    }
    return x;
  };
  auto split = [](std::string_view s) {
    std::vector<std::string_view> parts;
    if (s.empty()) return parts;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = s.find(',', start);
      parts.push_back(s.substr(start, comma - start));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    return parts;
  };
  switch (key.type) {
    case KeyType::kNumber:
      return parse_number(text);
    case KeyType::kInteger: {
      std::uint64_t v = 0;
      const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
      if (text.empty() || res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
        throw ConfigError(key.path, "expected a non-negative integer, got '" + std::string(text) + "'");
      }
      return v;
    }
    case KeyType::kBool:
      if (text == "true" || text == "1") return true;
      if (text == "false" || text == "0") return false;
      throw ConfigError(key.path, "expected true or false, got '" + std::string(text) + "'");
    case KeyType::kString:
      return std::string(text);
    case KeyType::kNumberList: {
      json arr = json::array();
      for (const auto part : split(text)) arr.push_back(parse_number(part));
      return arr;
    }
    case KeyType::kStringList: {
      json arr = json::array();
      for (const auto part : split(text)) arr.push_back(std::string(part));
      return arr;
    }
  }
  throw ConfigError(key.path, "unsupported key type");
}

nlohmann::json read_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("--config", "cannot open config file " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("--config", std::string("invalid JSON: ") + e.what());
  }
}

ExperimentConfig resolve_config(const nlohmann::json& file_doc, const std::map<std::string, nlohmann::json>& overrides) {
  Overrides merged;
  if (!file_doc.is_null()) flatten(file_doc, "", merged);
  for (const auto& [path, value] : overrides) {
    if (find_key(path) == nullptr) throw ConfigError(path, "unknown key");
    // run.t and run.t_list are alternatives; a flag for one displaces the other.
    if (path == "run.t") merged.erase("run.t_list");
    if (path == "run.t_list") merged.erase("run.t");
    merged[path] = value;
  }
  const Reader r(std::move(merged));

  const std::uint64_t schema = r.integer("schema", kConfigSchemaVersion);
  if (schema != static_cast<std::uint64_t>(kConfigSchemaVersion)) {
    throw ConfigError("schema", "unsupported schema version " + std::to_string(schema));
  }

  ExperimentConfig cfg;
  const CiModel defaults = ExperimentConfig::default_model();
  for (std::size_t i = 0; i < 2; ++i) {
    const std::string erv = "model.erv" + std::to_string(i + 1);
    cfg.model.erv[i].a = r.number(erv + ".a", defaults.erv[i].a);
    cfg.model.erv[i].rho = r.number(erv + ".rho", defaults.erv[i].rho);
    cfg.model.erv[i].kappa = r.number(erv + ".kappa", defaults.erv[i].kappa);
    check_at(erv, [&] { cfg.model.erv[i].validate(); });

    const std::string noise = "model.noise" + std::to_string(i + 1);
    const std::string family = r.string(noise + ".family", std::string(to_string(defaults.noise[i].family)));
    check_at(noise + ".family", [&] { cfg.model.noise[i].family = parse_noise_family(family); });
    cfg.model.noise[i].location = r.number(noise + ".location", defaults.noise[i].location);
    cfg.model.noise[i].scale = r.number(noise + ".scale", defaults.noise[i].scale);
    check_at(noise, [&] { cfg.model.noise[i].validate(); });
  }
  cfg.model.perturbation = r.number("model.perturbation", 0.0);
  cfg.model.coupled_noise = r.optional_boolean("model.coupled_noise").value_or(false);
  check_at("model.perturbation", [&] { cfg.model.validate(); });

  if (r.has("run.t") && r.has("run.t_list")) throw ConfigError("run", "give either t or t_list, not both");
  if (r.has("run.t_list")) {
    cfg.t_list = r.numbers("run.t_list", {});
    if (cfg.t_list.empty()) throw ConfigError("run.t_list", "must not be empty");
  } else {
    cfg.t_list = {r.number("run.t", 50.0)};
  }
  for (const double t : cfg.t_list) {
    if (!(t >= 1.0)) throw ConfigError(r.has("run.t_list") ? "run.t_list" : "run.t", "thresholds must be >= 1");
  }
  cfg.n = static_cast<std::size_t>(r.integer("run.n", 10000));
  if (cfg.n == 0) throw ConfigError("run.n", "must be >= 1");
  cfg.seed = r.integer("run.seed", 1);
  const std::uint64_t threads = r.integer("run.threads", default_threads());
  if (threads == 0 || threads > 4096) throw ConfigError("run.threads", "must lie in [1, 4096]");
  cfg.threads = static_cast<unsigned>(threads);

  cfg.levels = r.numbers("analysis.levels", GridSpec::default_levels());
  check_levels("analysis.levels", cfg.levels);
  cfg.b = static_cast<std::size_t>(r.integer("analysis.b", 999));
  if (cfg.b < 99) throw ConfigError("analysis.b", "need at least 99 permutations");
  cfg.quad_abs_tol = r.number("analysis.quad_abs_tol", 1e-9);
  check_at("analysis.quad_abs_tol", [&] { QuadOptions{cfg.quad_abs_tol}.validate(); });
  cfg.grid_levels = r.numbers("analysis.grid_levels", GridSpec::default_levels());
  check_levels("analysis.grid_levels", cfg.grid_levels);
  cfg.chi_levels = r.numbers("analysis.chi_levels", cfg.chi_levels);
  if (cfg.chi_levels.empty()) throw ConfigError("analysis.chi_levels", "must not be empty");
  for (const double p : cfg.chi_levels) {
    if (!(p > 0.0 && p < 1.0)) throw ConfigError("analysis.chi_levels", "levels must lie in (0,1)");
  }
  cfg.chi_source = r.string("analysis.chi_source", cfg.chi_source);
  static const std::set<std::string> kSources{"model", "comonotone", "independent", "data"};
  if (kSources.count(cfg.chi_source) == 0) {
    throw ConfigError("analysis.chi_source", "expected model, comonotone, independent or data");
  }
  cfg.h_x1 = r.numbers("analysis.h_grid.x1", {});
  cfg.h_x2 = r.numbers("analysis.h_grid.x2", {});
  if (cfg.h_x1.empty() != cfg.h_x2.empty()) throw ConfigError("analysis.h_grid", "give both x1 and x2 or neither");

  Thresholds& th = cfg.thresholds;
  th.max_delta = r.optional_number("analysis.thresholds.max_delta");
  th.min_p_value = r.optional_number("analysis.thresholds.min_p_value");
  th.max_ks = r.optional_number("analysis.thresholds.max_ks");
  th.max_sup_h = r.optional_number("analysis.thresholds.max_sup_h");
  th.gap_tol = r.optional_number("analysis.thresholds.gap_tol");
  th.chi_decreasing = r.optional_boolean("analysis.thresholds.chi_decreasing");
  if (th.min_p_value && !(*th.min_p_value > 0.0 && *th.min_p_value < 1.0)) {
    throw ConfigError("analysis.thresholds.min_p_value", "must lie in (0,1)");
  }
  for (const auto& [name, value] : {std::pair{"max_delta", th.max_delta}, std::pair{"max_ks", th.max_ks},
                                    std::pair{"max_sup_h", th.max_sup_h}, std::pair{"gap_tol", th.gap_tol}}) {
    if (value && !(*value >= 0.0)) throw ConfigError(std::string("analysis.thresholds.") + name, "must be >= 0");
  }

  cfg.data_path = r.string("data.path", "");
  cfg.conditioning_column = r.string("data.conditioning_column", cfg.conditioning_column);
  const auto value_columns = r.strings("data.value_columns", {cfg.value_columns[0], cfg.value_columns[1]});
  if (value_columns.size() != 2) throw ConfigError("data.value_columns", "expected exactly two column names");
  cfg.value_columns = {value_columns[0], value_columns[1]};
  const std::string delimiter = r.string("data.delimiter", ",");
  if (delimiter == "tab") {
    cfg.delimiter = '\t';
  } else if (delimiter.size() == 1 && delimiter != "\"" && delimiter != "." && delimiter != "\n") {
    cfg.delimiter = delimiter[0];
  } else {
    throw ConfigError("data.delimiter", "expected a single character or 'tab'");
  }
  cfg.p_t = r.number("data.p_t", cfg.p_t);
  if (!(cfg.p_t > 0.0 && cfg.p_t < 1.0)) throw ConfigError("data.p_t", "must lie in (0,1)");
  const std::string family = r.string("data.family", "gaussian");
  check_at("data.family", [&] { cfg.family = parse_noise_family(family); });

  cfg.out_dir = r.string("io.out_dir", ".");
  if (cfg.out_dir.empty()) throw ConfigError("io.out_dir", "must not be empty");
  cfg.formats = r.strings("io.formats", cfg.formats);
  for (const auto& f : cfg.formats) {
    if (f != "csv" && f != "bin") throw ConfigError("io.formats", "unknown format '" + f + "' (csv, bin)");
  }

  json echo;
  echo["schema"] = kConfigSchemaVersion;
  echo["model"] = model_to_json(cfg.model);
  echo["run"] = {{"t_list", cfg.t_list}, {"n", cfg.n}, {"seed", cfg.seed}};
  echo["analysis"] = {{"levels", cfg.levels},
                      {"b", cfg.b},
                      {"quad_abs_tol", cfg.quad_abs_tol},
                      {"grid_levels", cfg.grid_levels},
                      {"chi_levels", cfg.chi_levels},
                      {"chi_source", cfg.chi_source},
                      {"h_grid", {{"x1", cfg.h_x1}, {"x2", cfg.h_x2}}},
                      {"thresholds", thresholds_to_json(th)}};
  echo["data"] = {{"path", cfg.data_path},
                  {"conditioning_column", cfg.conditioning_column},
                  {"value_columns", value_columns},
                  {"delimiter", delimiter_name(cfg.delimiter)},
                  {"p_t", cfg.p_t},
                  {"family", std::string(to_string(cfg.family))}};
  echo["io"] = {{"out_dir", cfg.out_dir.generic_string()}, {"formats", cfg.formats}};
  cfg.echo = std::move(echo);
  return cfg;
}

nlohmann::json model_to_json(const CiModel& model) {
  json out;
  for (std::size_t i = 0; i < 2; ++i) {
    const auto& e = model.erv[i];
    const auto& z = model.noise[i];
    out["erv" + std::to_string(i + 1)] = {{"a", e.a}, {"rho", e.rho}, {"kappa", e.kappa}};
    out["noise" + std::to_string(i + 1)] = {
        {"family", std::string(to_string(z.family))}, {"location", z.location}, {"scale", z.scale}};
  }
  out["perturbation"] = model.perturbation;
  out["coupled_noise"] = model.coupled_noise;
  return out;
}

CiModel model_from_json(const nlohmann::json& j) {
  return resolve_config(json{{"model", j}}, {}).model;
}

std::string json_hash(const nlohmann::json& j) {
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(fnv1a(j.dump())));
  return hex;
}

}  // namespace cevnorm
