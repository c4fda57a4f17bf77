// Copyright 2026 The synthgen Authors
// SPDX-License-Identifier: Apache-2.0

#include "synthgen/pipeline.hpp"

#include <chrono>

#include <spdlog/spdlog.h>

namespace synthgen {

const Bvh& BvhCache::get(const Scene& scene) {
  if (!bvh_ || bvh_->scene_version() != scene.version()) {
    bvh_ = std::make_unique<Bvh>(scene);
    ++builds_;
    spdlog::debug("built BVH over {} triangles ({} nodes)", scene.triangle_count(), bvh_->nodes().size());
  }
  return *bvh_;
}

void ModuleRegistry::add(const std::string& name, ModuleFactory factory) {
  if (!factories_.emplace(name, std::move(factory)).second)
    throw PipelineError("module '" + name + "' is registered twice");
}

ModulePtr ModuleRegistry::create(const std::string& name, SettingsTree config) const {
  auto it = factories_.find(name);
  if (it == factories_.end()) throw UnknownModuleError(name);
  return it->second(name, std::move(config));
}

std::vector<std::string> ModuleRegistry::names() const {
  std::vector<std::string> out;
  for (const auto& [name, factory] : factories_) out.push_back(name);
  return out;
}

std::vector<ModulePtr> build_pipeline(const ConfigDocument& doc, const ModuleRegistry& registry) {
  if (const auto left = find_placeholders(doc); !left.empty())
    throw ConfigError("unsubstituted placeholder at '" + left.front() + "'");
  std::vector<ModulePtr> modules;
  modules.reserve(doc.modules.size());
  for (const auto& entry : doc.modules) modules.push_back(registry.create(entry.name, resolve_module_config(doc, entry)));
  return modules;
}

PipelineState run_pipeline(std::span<const ModulePtr> modules, PipelineState state, std::vector<ModuleTiming>* timings) {
  using clock = std::chrono::steady_clock;
  for (std::size_t i = 0; i < modules.size(); ++i) {
    Module& module = *modules[i];
    state.module_index = i;
    const bool skip = state.dry_run && module.produces_output();
    const auto start = clock::now();
    if (!skip) {
      try {
        module.run(state);
      } catch (const std::exception& e) {
        for (const auto& s : state.staged) s.discard();
        state.staged.clear();
        throw ModuleError(module.name(), e.what());
      }
      state.event_log.push_back(module.name());
    }
    if (timings)
      timings->push_back({module.name(), std::chrono::duration<double>(clock::now() - start).count(), skip});
  }
  for (const auto& s : state.staged) {
    s.commit();
    state.containers.push_back(s.final_path());
  }
  state.staged.clear();
  return state;
}

}  // namespace synthgen
