// Copyright 2026 cevnorm developers
// SPDX-License-Identifier: Apache-2.0
#include "cevnorm/report.hpp"

#include <fstream>

#include "cevnorm/error.hpp"

#ifndef CEVNORM_VERSION
#define CEVNORM_VERSION "0.0.0"
#endif

namespace cevnorm {

std::string_view library_version() { return CEVNORM_VERSION; }

bool Report::passed() const {
  for (const auto& [name, ok] : verdicts) {
    if (!ok) return false;
  }
  return true;
}

nlohmann::json Report::deterministic_part() const {
  nlohmann::json out;
  out["command"] = command;
  out["config"] = config;
  out["config_hash"] = json_hash(config);
  out["metrics"] = metrics;
  if (!verdicts.empty()) {
    out["verdicts"] = verdicts;
    out["passed"] = passed();
  }
  out["version"] = std::string(library_version());
  return out;
}

std::string Report::determinism_hash() const { return json_hash(deterministic_part()); }

nlohmann::json Report::to_json() const {
  nlohmann::json out = deterministic_part();
  out["determinism_hash"] = determinism_hash();
  out["wall_clock_seconds"] = wall_clock_seconds;
  return out;
}

Report make_report(std::string command, const ExperimentConfig& config) {
  Report report;
  report.command = std::move(command);
  report.config = config.echo;
  return report;
}

std::filesystem::path write_report(const std::filesystem::path& dir, const Report& report) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  const auto path = dir / (report.command + "_report.json");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write report " + path.string());
  out << report.to_json().dump(2) << '\n';
  if (!out) throw IoError("failed writing report " + path.string());
  return path;
}

}  // namespace cevnorm
