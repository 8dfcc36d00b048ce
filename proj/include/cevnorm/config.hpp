// Copyright 2026 cevnorm developers
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cevnorm/models.hpp"
#include "json.hpp"

namespace cevnorm {

inline constexpr int kConfigSchemaVersion = 1;

enum class KeyType { kNumber, kInteger, kBool, kString, kNumberList, kStringList };

/// One leaf of the configuration schema. Every key has exactly one CLI flag.
struct ConfigKey {
  std::string path;  // dotted, e.g. "model.erv1.rho"
  KeyType type;
  std::string flag;  // without leading dashes
  std::string help;
};

/// The full schema, in a fixed order.
const std::vector<ConfigKey>& config_keys();

struct Thresholds {
  std::optional<double> max_delta;
  std::optional<double> min_p_value;
  std::optional<double> max_ks;
  std::optional<double> max_sup_h;
  std::optional<double> gap_tol;
  std::optional<bool> chi_decreasing;
};

struct ExperimentConfig {
  CiModel model = default_model();

  // run
  std::vector<double> t_list;  // resolved from run.t or run.t_list
  std::size_t n = 10000;
  std::uint64_t seed = 1;
  unsigned threads = 1;

  // analysis
  std::vector<double> levels;       // factorization-statistic grid
  std::size_t b = 999;              // permutations
  double quad_abs_tol = 1e-9;
  std::vector<double> grid_levels;  // quadrature (marginal-H quantile) grid
  std::vector<double> chi_levels{0.9, 0.99, 0.999};
  std::string chi_source = "model";  // model | comonotone | independent | data
  std::vector<double> h_x1;          // explicit limit-h grid; empty -> quantile grid
  std::vector<double> h_x2;
  Thresholds thresholds;

  // data
  std::string data_path;
  std::string conditioning_column = "x0";
  std::array<std::string, 2> value_columns{"x1", "x2"};
  char delimiter = ',';
  double p_t = 0.95;
  NoiseFamily family = NoiseFamily::kGaussian;

  // io
  std::filesystem::path out_dir = ".";
  std::vector<std::string> formats{"csv"};

  /// Fully resolved settings as JSON (all defaults filled, sorted keys). The
  /// thread count is left out: it never changes results.
  nlohmann::json echo;

  static CiModel default_model();
};

/// Parses one flag value according to its key type; throws ConfigError naming `path`.
nlohmann::json parse_flag_value(const ConfigKey& key, std::string_view text);

/// Builds a config from an optional JSON document plus flag overrides (dotted
/// path -> value), flags winning. Unknown keys, type errors and violated
/// preconditions throw ConfigError carrying the key path.
ExperimentConfig resolve_config(const nlohmann::json& file_doc, const std::map<std::string, nlohmann::json>& overrides);

/// Reads and parses a JSON config file (ConfigError on failure).
nlohmann::json read_config_file(const std::filesystem::path& path);

/// Round-trip of the model block of the schema.
nlohmann::json model_to_json(const CiModel& model);
CiModel model_from_json(const nlohmann::json& j);

/// 16-hex FNV-1a of the canonical dump of `j`.
std::string json_hash(const nlohmann::json& j);

}  // namespace cevnorm
