// Copyright 2026 cevnorm developers
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <exception>
#include <filesystem>
#include <string>
#include <vector>

#include "cevnorm/config.hpp"
#include "cevnorm/report.hpp"

namespace cevnorm {

enum ExitCode : int {
  kExitPass = 0,
  kExitVerdictFail = 1,
  kExitUsage = 2,
  kExitData = 3,
  kExitNonConvergence = 4,
};

/// simulate, verify-rn, verify-dn, limit-h, gap, chi, diagnose.
const std::vector<std::string>& command_names();
std::string command_summary(const std::string& name);

struct CommandResult {
  Report report;
  std::filesystem::path report_path;
  std::vector<std::filesystem::path> files;  // data products besides the report

  int exit_code() const { return report.passed() ? kExitPass : kExitVerdictFail; }
};

/// Runs one command and writes its outputs and report under config.out_dir.
/// Library errors propagate; map them with exit_code_for.
CommandResult run_command(const std::string& name, const ExperimentConfig& config);

/// Exit code for an exception escaping run_command or config resolution.
int exit_code_for(const std::exception& error);

}  // namespace cevnorm
