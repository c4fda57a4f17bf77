// Copyright 2026 The synthgen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "synthgen/bvh.hpp"
#include "synthgen/config.hpp"
#include "synthgen/container.hpp"
#include "synthgen/render.hpp"
#include "synthgen/scene.hpp"

namespace synthgen {

SYNTHGEN_DEFINE_ERROR(PipelineError, Error);

class UnknownModuleError : public PipelineError {
 public:
  explicit UnknownModuleError(std::string name)
      : PipelineError("unknown module '" + name + "'"), name_(std::move(name)) {}
  const std::string& name() const { return name_; }

 private:
  std::string name_;
};

/// A module failed; carries the module name and the original message.
class ModuleError : public PipelineError {
 public:
  ModuleError(std::string module, std::string cause)
      : PipelineError("module '" + module + "' failed: " + cause), module_(std::move(module)), cause_(std::move(cause)) {}
  const std::string& module() const { return module_; }
  const std::string& cause() const { return cause_; }

 private:
  std::string module_;
  std::string cause_;
};

/// Builds the BVH lazily and reuses it until the scene version changes.
class BvhCache {
 public:
  const Bvh& get(const Scene& scene);
  std::uint64_t builds() const { return builds_; }

 private:
  std::unique_ptr<Bvh> bvh_;
  std::uint64_t builds_ = 0;
};

struct PipelineState {
  Scene scene;
  RenderSettings render_defaults;
  std::vector<FrameBuffer> frames;  // rendered, not yet written
  std::filesystem::path output_dir;
  std::uint64_t seed = 42;
  unsigned threads = 0;
  bool dry_run = false;
  bool export_png = false;

  std::size_t module_index = 0;  // position of the running module
  std::vector<std::string> event_log;
  std::vector<StagedContainer> staged;
  std::vector<std::filesystem::path> containers;  // committed on success
  BvhCache bvh_cache;

  const Bvh& bvh() { return bvh_cache.get(scene); }
  /// Random stream of the running module, derived from (seed, module index).
  Rng module_rng() const { return make_stream(seed, module_index); }
};

class Module {
 public:
  Module(std::string name, SettingsTree config) : name_(std::move(name)), config_(std::move(config)) {}
  virtual ~Module() = default;
  Module(const Module&) = delete;
  Module& operator=(const Module&) = delete;

  const std::string& name() const { return name_; }
  const SettingsTree& config() const { return config_; }

  virtual void run(PipelineState& state) = 0;
  /// Renderers and writers produce output and are skipped in dry runs.
  virtual bool produces_output() const { return false; }

 private:
  std::string name_;
  SettingsTree config_;
};

using ModulePtr = std::unique_ptr<Module>;
using ModuleFactory = std::function<ModulePtr(std::string name, SettingsTree config)>;

class ModuleRegistry {
 public:
  /// Throws PipelineError when the name is already registered.
  void add(const std::string& name, ModuleFactory factory);
  bool contains(const std::string& name) const { return factories_.contains(name); }
  ModulePtr create(const std::string& name, SettingsTree config) const;
  std::vector<std::string> names() const;

 private:
  std::map<std::string, ModuleFactory> factories_;
};

/// Registry with every built-in module.
const ModuleRegistry& builtin_registry();

/// One runnable per config entry, in file order, each with its resolved settings.
std::vector<ModulePtr> build_pipeline(const ConfigDocument& doc, const ModuleRegistry& registry);

struct ModuleTiming {
  std::string name;
  double seconds = 0.0;
  bool skipped = false;
};

/// Runs every module once, in order. On success staged containers are moved
/// into place; on failure they are deleted and ModuleError is thrown.
PipelineState run_pipeline(std::span<const ModulePtr> modules, PipelineState state,
                           std::vector<ModuleTiming>* timings = nullptr);

}  // namespace synthgen
