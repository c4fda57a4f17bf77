// Copyright 2026 The synthgen Authors
// SPDX-License-Identifier: Apache-2.0

#include "synthgen/run.hpp"

#include <algorithm>
#include <sstream>

#include <fmt/format.h>

namespace synthgen {

ConfigDocument with_seed(ConfigDocument doc, std::uint64_t seed) {
  Json all = doc.global_settings.contains("all") ? doc.global_settings.at("all").json() : Json::object();
  all["seed"] = seed;
  doc.global_settings.insert_or_assign("all", SettingsTree(std::move(all), "global.all"));
  return doc;
}

RunReport run_document(ConfigDocument doc, const RunOptions& options, const ModuleRegistry& registry) {
  if (options.seed) doc = with_seed(std::move(doc), *options.seed);
  const bool has_writer = std::ranges::any_of(doc.modules, [](const auto& m) { return m.name == kWriterModule; });
  if (!has_writer && !options.dry_run) doc.modules.push_back({std::string(kWriterModule), SettingsTree()});

  const auto modules = build_pipeline(doc, registry);

  PipelineState state;
  const SettingsTree all = doc.global_settings.contains("all") ? doc.global_settings.at("all") : SettingsTree();
  state.seed = all.get_or<std::uint64_t>("seed", 42);
  state.output_dir = all.get_or<std::string>("output_dir", "");
  state.threads = options.threads;
  state.dry_run = options.dry_run;
  state.export_png = options.export_png;
  state.render_defaults.seed = state.seed;
  state.render_defaults.threads = options.threads;

  RunReport report;
  for (const auto& m : modules) report.planned.push_back(m->name());
  state = run_pipeline(modules, std::move(state), &report.timings);

  report.keyframes = state.scene.keyframes().size();
  report.images = state.frames.size();
  report.containers = state.containers;
  report.bvh_builds = state.bvh_cache.builds();
  if (!options.dry_run && report.containers.size() != report.keyframes)
    throw PipelineError(fmt::format("wrote {} container(s) for {} keyframe(s)", report.containers.size(),
                                    report.keyframes));
  return report;
}

RunReport run_config_file(const std::filesystem::path& config_path, std::span<const std::string> args,
                          const RunOptions& options) {
  return run_document(substitute_args(load_config(config_path.string()), args), options);
}

std::string format_report(const RunReport& report, bool dry_run) {
  std::ostringstream out;
  if (dry_run) {
    out << "planned module order:\n";
    for (std::size_t i = 0; i < report.planned.size(); ++i) out << fmt::format("  {}. {}\n", i + 1, report.planned[i]);
  }
  double total = 0.0;
  for (const auto& t : report.timings) {
    total += t.seconds;
    out << fmt::format("  {:<28} {}\n", t.name, t.skipped ? std::string("skipped") : fmt::format("{:9.3f} s", t.seconds));
  }
  out << fmt::format("total {:.3f} s, {} keyframe(s), {} image(s), {} container(s)\n", total, report.keyframes,
                     report.images, report.containers.size());
  return out.str();
}

}  // namespace synthgen
