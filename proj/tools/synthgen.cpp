// Copyright 2026 The synthgen Authors
// SPDX-License-Identifier: Apache-2.0

// synthgen run <config> [args...] [--seed N] [--export-png] [--dry-run] [--threads N]

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "synthgen/run.hpp"

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Config-driven synthetic image generator"};
  app.require_subcommand(1);
  std::string log_level = "warn";
  app.add_option("--log-level", log_level, "trace, debug, info, warn, error or off")
      ->check(CLI::IsMember({"trace", "debug", "info", "warn", "error", "off"}));

  CLI::App* run = app.add_subcommand("run", "Run the pipeline described by a config file");
  std::string config_path;
  std::vector<std::string> args;
  std::optional<std::uint64_t> seed;
  synthgen::RunOptions options;
  run->add_option("config", config_path, "Config file (.json or .yaml with JSON content)")->required();
  run->add_option("args", args, "Positional values substituted for <args:N> placeholders");
  run->add_option("--seed", seed, "Override the config seed");
  run->add_flag("--export-png", options.export_png, "Also write 8-bit PNG previews");
  run->add_flag("--dry-run", options.dry_run, "Skip renderers and writers, print the module order");
  run->add_option("--threads", options.threads, "Render threads (0 = all cores)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  spdlog::set_level(spdlog::level::from_str(log_level));
  options.seed = seed;
  try {
    const auto report = synthgen::run_config_file(config_path, args, options);
    std::cout << synthgen::format_report(report, options.dry_run);
  } catch (const synthgen::ModuleError& e) {
    std::cerr << "error: module " << e.module() << ": " << e.cause() << '\n';
    return kExitFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return 0;
}
