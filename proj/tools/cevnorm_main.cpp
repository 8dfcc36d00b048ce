// Copyright 2026 cevnorm developers
// SPDX-License-Identifier: Apache-2.0
#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "cevnorm/commands.hpp"
#include "cevnorm/config.hpp"
#include "cevnorm/error.hpp"

namespace {

struct Subcommand {
  CLI::App* app = nullptr;
  std::string config_path;
  std::map<std::string, std::string> raw;  // key path -> flag text
};

void add_schema_flags(Subcommand& sub) {
  for (const auto& key : cevnorm::config_keys()) {
    sub.app->add_option("--" + key.flag, sub.raw[key.path], key.help + " [" + key.path + "]");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cevnorm: conditional extreme value norming experiments"};
  app.set_version_flag("--version", std::string(cevnorm::library_version()));
  app.require_subcommand(1);

  std::map<std::string, Subcommand> subs;
  for (const auto& name : cevnorm::command_names()) {
    auto& sub = subs[name];
    sub.app = app.add_subcommand(name, cevnorm::command_summary(name));
    sub.app->add_option("--config", sub.config_path, "JSON config file (schema 1)");
    add_schema_flags(sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cevnorm::kExitUsage;
  }

  for (auto& [name, sub] : subs) {
    if (!sub.app->parsed()) continue;
    try {
      std::map<std::string, nlohmann::json> overrides;
      for (const auto& key : cevnorm::config_keys()) {
        if (sub.app->get_option("--" + key.flag)->count() == 0) continue;
        overrides[key.path] = cevnorm::parse_flag_value(key, sub.raw[key.path]);
      }
      const nlohmann::json doc =
          sub.config_path.empty() ? nlohmann::json() : cevnorm::read_config_file(sub.config_path);
      const auto config = cevnorm::resolve_config(doc, overrides);
      const auto result = cevnorm::run_command(name, config);
      std::cout << "report: " << result.report_path.string() << '\n';
      for (const auto& f : result.files) std::cout << "wrote: " << f.string() << '\n';
      for (const auto& [verdict, ok] : result.report.verdicts) {
        std::cout << (ok ? "PASS " : "FAIL ") << verdict << '\n';
      }
      return result.exit_code();
    } catch (const std::exception& e) {
      std::cerr << "cevnorm " << name << ": " << e.what() << '\n';
      return cevnorm::exit_code_for(e);
    }
  }
  return cevnorm::kExitUsage;
}
