// Copyright 2026 The synthgen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "synthgen/config.hpp"
#include "synthgen/pipeline.hpp"

namespace synthgen {

struct RunOptions {
  std::optional<std::uint64_t> seed;  // replaces global.all.seed
  bool export_png = false;
  bool dry_run = false;
  unsigned threads = 0;  // 0 = all hardware threads
};

struct RunReport {
  std::vector<std::string> planned;  // module names in execution order
  std::vector<ModuleTiming> timings;
  std::size_t keyframes = 0;
  std::size_t images = 0;
  std::vector<std::filesystem::path> containers;
  std::uint64_t bvh_builds = 0;
};

/// Name of the module that writes containers; appended to pipelines that
/// lack one so every keyframe ends up on disk.
inline constexpr std::string_view kWriterModule = "writer.ContainerWriter";

/// Returns `doc` with global.all.seed set to `seed`.
ConfigDocument with_seed(ConfigDocument doc, std::uint64_t seed);

/// Builds and runs an argument-substituted document. Throws on any failure,
/// including a run that leaves fewer containers than keyframes.
RunReport run_document(ConfigDocument doc, const RunOptions& options,
                       const ModuleRegistry& registry = builtin_registry());

/// load_config + substitute_args + run_document.
RunReport run_config_file(const std::filesystem::path& config_path, std::span<const std::string> args,
                          const RunOptions& options);

/// Human-readable per-module timing table and totals.
std::string format_report(const RunReport& report, bool dry_run);

}  // namespace synthgen
