// Copyright 2026 The synthgen Authors
// SPDX-License-Identifier: Apache-2.0

// Built-in pipeline modules, registered under their dotted config names.

#include <algorithm>
#include <map>
#include <set>

#include <spdlog/spdlog.h>

#include "synthgen/loader.hpp"
#include "synthgen/pipeline.hpp"
#include "synthgen/png_export.hpp"
#include "synthgen/sampler.hpp"

namespace synthgen {

namespace {

constexpr std::string_view kPoseFormat = "location_x location_y location_z rotation_x rotation_y rotation_z";
constexpr std::string_view kLightFormat = "location_x location_y location_z intensity_r intensity_g intensity_b";

Rng module_stream(const Module& m, const PipelineState& state) {
  return make_stream(m.config().get_or<std::uint64_t>("seed", state.seed), state.module_index);
}

std::uint32_t positive_count(const SettingsTree& config, std::string_view key, std::int64_t fallback) {
  const auto n = config.get_or<std::int64_t>(key, fallback);
  if (n < 1) throw SettingsError("setting '" + std::string(key) + "' must be >= 1");
  return static_cast<std::uint32_t>(n);
}

// Only the intrinsics part of a config is applied; other render keys are
// left for the renderers.
CameraIntrinsics with_intrinsics(const PipelineState& state, const SettingsTree& config) {
  return apply_render_config(state.render_defaults, config).camera;
}

class Initializer final : public Module {
 public:
  using Module::Module;
  void run(PipelineState& state) override {
    state.scene.clear();
    state.frames.clear();
    RenderSettings defaults;
    defaults.seed = state.seed;
    defaults.threads = state.threads;
    state.render_defaults = apply_render_config(defaults, config());
  }
};

class ObjLoader final : public Module {
 public:
  using Module::Module;
  void run(PipelineState& state) override {
    ObjLoadOptions options;
    if (config().contains("category_id")) {
      options.category_id = config().get<std::int32_t>("category_id");
      if (*options.category_id < 0) throw SettingsError("category_id must be >= 0");
    }
    const auto added = load_obj(config().get<std::string>("path"), options, state.scene);
    spdlog::info("{}: loaded {} object(s)", name(), added.size());
  }
};

class CameraLoader final : public Module {
 public:
  using Module::Module;
  void run(PipelineState& state) override {
    state.render_defaults.camera = with_intrinsics(state, config());
    const auto format = config().get_or<std::string>("file_format", std::string(kPoseFormat));
    const auto n = load_camera_poses(config().get<std::string>("path"), format, state.scene);
    spdlog::info("{}: loaded {} camera pose(s)", name(), n);
  }
};

class LightLoader final : public Module {
 public:
  using Module::Module;
  void run(PipelineState& state) override {
    const auto format = config().get_or<std::string>("file_format", std::string(kLightFormat));
    const auto n = load_lights(config().get<std::string>("path"), format, state.scene);
    spdlog::info("{}: loaded {} light(s)", name(), n);
  }
};

class CameraSampler final : public Module {
 public:
  using Module::Module;
  void run(PipelineState& state) override {
    const auto& cfg = config();
    const auto count = positive_count(cfg, "number", 1);
    const auto max_attempts = positive_count(cfg, "max_attempts", 1000);
    const auto grid = positive_count(cfg, "proximity_grid", 10);
    const SamplerSpec location = resolve_sampler(cfg.subtree("location"));
    const SamplerSpec rotation = cfg.contains("rotation") ? resolve_sampler(cfg.subtree("rotation"))
                                                          : SamplerSpec{ConstantSpec{}};
    const std::optional<Vec3> look_at = cfg.contains("look_at") ? std::optional(cfg.get<Vec3>("look_at")) : std::nullopt;
    const Vec3 up = cfg.get_or("up", Vec3{0.0, 1.0, 0.0});
    const std::optional<ProximitySpec> proximity =
        cfg.contains("proximity_checks") ? std::optional(resolve_proximity(cfg.subtree("proximity_checks").json()))
                                         : std::nullopt;

    state.render_defaults.camera = with_intrinsics(state, cfg);
    const CameraIntrinsics& intrinsics = state.render_defaults.camera;
    const Bvh* bvh = proximity && state.scene.triangle_count() > 0 ? &state.bvh() : nullptr;
    Rng rng = module_stream(*this, state);

    for (std::uint32_t i = 0; i < count; ++i) {
      bool accepted = false;
      for (std::uint32_t attempt = 0; attempt < max_attempts && !accepted; ++attempt) {
        CameraPose pose;
        pose.location = sample(location, rng);
        pose.rotation = look_at ? look_at_rotation(pose.location, *look_at, up) : sample(rotation, rng);
        if (proximity) {
          const CameraKeyframe candidate{pose.location, pose.rotation, 0};
          const auto depths = bvh ? proximity_distances(candidate, intrinsics, *bvh, grid) : std::vector<double>{};
          if (!proximity_satisfied(*proximity, depths)) continue;
        }
        state.scene.add_camera_keyframe(pose);
        accepted = true;
      }
      if (!accepted) throw ExhaustedError("no camera pose passed the proximity checks", max_attempts);
    }
  }
};

class ObjectPlacer final : public Module {
 public:
  using Module::Module;
  void run(PipelineState& state) override {
    const auto spec = resolve_sampler(config().subtree("location"));
    const auto* box = std::get_if<BoxSpec>(&spec);
    if (!box) throw InvalidSpecError("object placement needs a Uniform3dSampler location");
    const auto max_attempts = positive_count(config(), "max_attempts", 1000);

    std::optional<std::set<std::string>> wanted;
    if (config().contains("objects")) wanted = config().subtree("objects").as<std::set<std::string>>();

    Rng rng = module_stream(*this, state);
    Scene& scene = state.scene;
    std::size_t placed = 0;
    for (std::size_t m = 0; m < scene.meshes().size(); ++m) {
      if (wanted && !wanted->contains(scene.meshes()[m].object_name)) continue;
      std::vector<Aabb> obstacles;
      for (std::size_t o = 0; o < scene.meshes().size(); ++o)
        if (o != m) obstacles.push_back(compute_aabb(scene.meshes()[o]));
      const Aabb target = compute_aabb(scene.meshes()[m]);
      const auto placement = sample_collision_free(*box, target, obstacles, rng, max_attempts);
      scene.translate_mesh(m, placement.center - target.center());
      ++placed;
    }
    spdlog::info("{}: placed {} object(s)", name(), placed);
  }
};

class LightSampler final : public Module {
 public:
  using Module::Module;
  void run(PipelineState& state) override {
    const auto count = positive_count(config(), "number", 1);
    const auto location = resolve_sampler(config().subtree("location"));
    const Rgb intensity = config().get_or("intensity", Rgb{10.0, 10.0, 10.0});
    if (!is_finite(intensity) || intensity.x < 0 || intensity.y < 0 || intensity.z < 0)
      throw SettingsError("light intensity must be finite and non-negative");
    Rng rng = module_stream(*this, state);
    for (std::uint32_t i = 0; i < count; ++i) state.scene.add_light({sample(location, rng), intensity});
  }
};

class PassRenderer : public Module {
 public:
  PassRenderer(std::string name, SettingsTree config, Pass pass)
      : Module(std::move(name), std::move(config)), pass_(pass) {}
  bool produces_output() const override { return true; }

  void run(PipelineState& state) override {
    RenderSettings settings = apply_render_config(state.render_defaults, config());
    if (!config().contains("threads")) settings.threads = state.threads;
    const auto keyframes = state.scene.keyframes();
    if (keyframes.empty()) {
      spdlog::warn("{}: no camera keyframes, nothing to render", name());
      return;
    }
    const Bvh& bvh = state.bvh();
    for (const auto& kf : keyframes) {
      render_into(state, bvh, kf, settings, pass_);
      if (pass_ == Pass::colors && settings.render_depth) render_into(state, bvh, kf, settings, Pass::depth);
    }
  }

 private:
  static void render_into(PipelineState& state, const Bvh& bvh, const CameraKeyframe& kf,
                          const RenderSettings& settings, Pass pass) {
    for (auto& fb : render_frame(state.scene, bvh, kf, settings, pass)) state.frames.push_back(std::move(fb));
  }

  Pass pass_;
};

class ContainerWriter final : public Module {
 public:
  using Module::Module;
  bool produces_output() const override { return true; }

  void run(PipelineState& state) override {
    if (state.scene.keyframes().empty() && state.frames.empty()) return;
    const std::filesystem::path dir = config().get_or<std::string>("output_dir", state.output_dir.string());
    if (dir.empty()) throw SettingsError("missing setting 'output_dir'");
    std::map<std::uint32_t, std::vector<FrameBuffer>> by_keyframe;
    for (const auto& kf : state.scene.keyframes()) by_keyframe[kf.frame_index];
    for (const auto& f : state.frames) by_keyframe[f.keyframe].push_back(f);
    for (const auto& [index, frames] : by_keyframe) state.staged.push_back(stage_container(index, frames, dir));
    if (state.export_png || config().get_or("export_png", false)) export_png_previews(state.frames, dir);
  }
};

template <typename T>
ModuleFactory factory() {
  return [](std::string name, SettingsTree config) { return std::make_unique<T>(std::move(name), std::move(config)); };
}

ModuleFactory renderer(Pass pass) {
  return [pass](std::string name, SettingsTree config) {
    return std::make_unique<PassRenderer>(std::move(name), std::move(config), pass);
  };
}

ModuleRegistry make_builtin_registry() {
  ModuleRegistry r;
  r.add("main.Initializer", factory<Initializer>());
  r.add("loader.ObjLoader", factory<ObjLoader>());
  r.add("loader.CameraLoader", factory<CameraLoader>());
  r.add("loader.LightLoader", factory<LightLoader>());
  r.add("sampler.CameraSampler", factory<CameraSampler>());
  r.add("sampler.ObjectPlacer", factory<ObjectPlacer>());
  r.add("sampler.LightSampler", factory<LightSampler>());
  r.add("renderer.RgbRenderer", renderer(Pass::colors));
  r.add("renderer.NormalRenderer", renderer(Pass::normals));
  r.add("renderer.SegMapRenderer", renderer(Pass::segmap));
  r.add("writer.ContainerWriter", factory<ContainerWriter>());
  return r;
}

}  // namespace

const ModuleRegistry& builtin_registry() {
  static const ModuleRegistry registry = make_builtin_registry();
  return registry;
}

}  // namespace synthgen
