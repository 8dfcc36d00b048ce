// Copyright 2026 cevnorm developers
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>

#include "cevnorm/config.hpp"
#include "json.hpp"

namespace cevnorm {

std::string_view library_version();

/// Machine-readable outcome of one command. Keys serialize sorted.
struct Report {
  std::string command;
  nlohmann::json config;   // resolved echo
  nlohmann::json metrics = nlohmann::json::object();
  std::map<std::string, bool> verdicts;  // empty unless thresholds were configured
  double wall_clock_seconds = 0.0;

  bool passed() const;

  /// Everything except the wall clock and the hash itself.
  nlohmann::json deterministic_part() const;
  std::string determinism_hash() const;
  nlohmann::json to_json() const;
};

Report make_report(std::string command, const ExperimentConfig& config);

/// Writes `<dir>/<command>_report.json` (2-space indent, trailing newline) and returns the path.
std::filesystem::path write_report(const std::filesystem::path& dir, const Report& report);

}  // namespace cevnorm
