// Copyright 2026 The synthgen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "synthgen/bvh.hpp"
#include "synthgen/camera.hpp"
#include "synthgen/error.hpp"
#include "synthgen/scene.hpp"
#include "synthgen/settings.hpp"

namespace synthgen {

SYNTHGEN_DEFINE_ERROR(RenderSettingsError, Error);

enum class Pass : std::uint8_t { colors, depth, normals, segmap };
enum class MapBy : std::uint8_t { class_id, instance };

std::string_view to_string(Pass pass);

struct RenderSettings {
  CameraIntrinsics camera;
  std::uint32_t samples = 32;
  std::uint32_t min_bounces = 3;
  std::uint32_t max_bounces = 8;
  std::uint32_t glossy_bounces = 4;
  bool render_depth = false;
  std::string depth_output_key = "depth";
  MapBy map_by = MapBy::class_id;
  std::uint64_t seed = 42;
  unsigned threads = 0;  // 0 = all hardware threads

  /// Throws RenderSettingsError when a field is out of range.
  void validate() const;
};

/// Returns `base` with every renderer key present in `config` applied:
/// resolution_x, resolution_y, samples, min_bounces, max_bounces,
/// glossy_bounces, render_depth, stereo, depth_output_key, map_by, plus
/// vertical_fov, interocular_distance and seed.
RenderSettings apply_render_config(RenderSettings base, const SettingsTree& config);

struct InstanceInfo {
  std::int32_t id = 0;
  std::string name;
  std::int32_t category_id = 0;

  friend bool operator==(const InstanceInfo&, const InstanceInfo&) = default;
};

/// One rendered pass of one keyframe (and eye). Pixel data is row-major,
/// channel-interleaved: colors/normals 3 x f32, depth 1 x f32, segmap 1 x i32.
struct FrameBuffer {
  Pass pass = Pass::colors;
  std::string key;  // container key before any stereo suffix
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  std::uint32_t channels = 0;
  std::variant<std::vector<float>, std::vector<std::int32_t>> data;
  std::uint32_t keyframe = 0;
  Eye eye = Eye::mono;
  std::vector<InstanceInfo> instances;  // segmap with map_by = instance only

  std::span<const float> f32() const { return std::get<std::vector<float>>(data); }
  std::span<const std::int32_t> i32() const { return std::get<std::vector<std::int32_t>>(data); }
  std::size_t index(std::uint32_t x, std::uint32_t y, std::uint32_t c = 0) const {
    return (static_cast<std::size_t>(y) * width + x) * channels + c;
  }
};

/// Monte Carlo estimate of the radiance arriving along `ray`. Emission and
/// shadow-tested point lights are gathered at every vertex; the path then
/// scatters into a cosine-weighted diffuse or a normalized-Phong glossy lobe
/// chosen in proportion to the albedos. Paths stop at max_bounces, glossy
/// events past glossy_bounces contribute nothing, and Russian roulette
/// starts after min_bounces.
Rgb trace_path(const Bvh& bvh, const Scene& scene, const Ray& ray, const RenderSettings& settings, Rng& rng);

/// Renders one pass for one keyframe; returns two buffers (left, right)
/// when the camera is stereo.
std::vector<FrameBuffer> render_frame(const Scene& scene, const Bvh& bvh, const CameraKeyframe& keyframe,
                                      const RenderSettings& settings, Pass pass);

/// Instance table for segmentation maps: one row per mesh.
std::vector<InstanceInfo> instance_table(const Scene& scene);

}  // namespace synthgen
