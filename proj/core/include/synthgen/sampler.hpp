// Copyright 2026 The synthgen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "synthgen/bvh.hpp"
#include "synthgen/error.hpp"
#include "synthgen/scene.hpp"
#include "synthgen/settings.hpp"

namespace synthgen {

SYNTHGEN_DEFINE_ERROR(SamplerError, Error);
SYNTHGEN_DEFINE_ERROR(InvalidSpecError, SamplerError);
SYNTHGEN_DEFINE_ERROR(UnknownSamplerError, SamplerError);

class ExhaustedError : public SamplerError {
 public:
  ExhaustedError(const std::string& what, std::uint32_t attempts)
      : SamplerError(what + " (gave up after " + std::to_string(attempts) + " attempts)"), attempts_(attempts) {}
  std::uint32_t attempts() const { return attempts_; }

 private:
  std::uint32_t attempts_;
};

struct ConstantSpec {
  Vec3 value;
};

// "Uniform3dSampler"
struct BoxSpec {
  Vec3 min;
  Vec3 max;
};

enum class SphereMode : std::uint8_t { surface, interior };

// "SphereSampler"
struct SphereSpec {
  Vec3 center;
  double radius = 1.0;
  SphereMode mode = SphereMode::interior;
};

using SamplerSpec = std::variant<ConstantSpec, BoxSpec, SphereSpec>;

struct AverageRange {
  double min = 0.0;
  double max = kInfinity;
};

struct ProximitySpec {
  std::optional<double> min;
  std::optional<AverageRange> avg;
};

/// Each component independently uniform on [min_i, max_i].
Vec3 sample_uniform_box(const BoxSpec& spec, Rng& rng);
/// Uniform direction on the sphere (SURFACE) or uniform by volume in the ball (INTERIOR).
Vec3 sample_sphere(const SphereSpec& spec, Rng& rng);
Vec3 sample(const SamplerSpec& spec, Rng& rng);

/// Accepts `{"name": ..., "parameters": {...}}` or a literal 3-vector.
SamplerSpec resolve_sampler(const Json& value);
inline SamplerSpec resolve_sampler(const SettingsTree& value) { return resolve_sampler(value.json()); }

/// Accepts `{"min": d, "avg": {"min": a, "max": b}}`; `avg` may also be `[a, b]`.
ProximitySpec resolve_proximity(const Json& value);

struct Placement {
  Vec3 center;  // new center of the target box
  std::uint32_t attempts = 0;
};

/// Rejection-samples a center for `target` inside `spec` so that the moved
/// box overlaps none of `obstacles`.
Placement sample_collision_free(const BoxSpec& spec, const Aabb& target, std::span<const Aabb> obstacles, Rng& rng,
                                std::uint32_t max_attempts = 1000);
/// Same, with every mesh of the scene as an obstacle.
Placement sample_collision_free(const BoxSpec& spec, const Aabb& target, const Scene& scene, Rng& rng,
                                std::uint32_t max_attempts = 1000);

/// Z-depths of the nearest hits of a grid x grid ray fan through the cell
/// centers of the image plane; misses are omitted.
std::vector<double> proximity_distances(const CameraKeyframe& pose, const CameraIntrinsics& intrinsics,
                                        const Bvh& bvh, std::uint32_t grid = 10);

/// Applies the min/avg constraints to a set of hit distances (logical AND).
bool proximity_satisfied(const ProximitySpec& spec, std::span<const double> depths);

/// True when every hit is at least `spec.min` away and the mean hit
/// distance lies in `spec.avg` (which also requires at least one hit).
bool check_proximity(const CameraKeyframe& pose, const CameraIntrinsics& intrinsics, const ProximitySpec& spec,
                     const Bvh& bvh, std::uint32_t grid = 10);

}  // namespace synthgen
