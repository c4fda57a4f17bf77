// Copyright 2026 The synthgen Authors
// SPDX-License-Identifier: Apache-2.0

#include "synthgen/sampler.hpp"

#include <numeric>

#include "synthgen/camera.hpp"

namespace synthgen {

Vec3 sample_uniform_box(const BoxSpec& spec, Rng& rng) {
  Vec3 p;
  for (int i = 0; i < 3; ++i) {
    if (spec.min[i] > spec.max[i]) throw InvalidSpecError("Uniform3dSampler: min exceeds max on an axis");
    p[i] = spec.min[i] + (spec.max[i] - spec.min[i]) * rng.uniform();
  }
  return p;
}

Vec3 sample_sphere(const SphereSpec& spec, Rng& rng) {
  if (!(spec.radius >= 0.0)) throw InvalidSpecError("SphereSampler: radius must be >= 0");
  const double z = 1.0 - 2.0 * rng.uniform();
  const double phi = 2.0 * kPi * rng.uniform();
  const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
  const Vec3 dir = normalize(Vec3{s * std::cos(phi), s * std::sin(phi), z});
  double r = spec.radius;
  if (spec.mode == SphereMode::interior) r *= std::cbrt(rng.uniform());
  return spec.center + dir * r;
}

Vec3 sample(const SamplerSpec& spec, Rng& rng) {
  return std::visit(
      [&](const auto& s) -> Vec3 {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, ConstantSpec>) {
          return s.value;
        } else if constexpr (std::is_same_v<T, BoxSpec>) {
          return sample_uniform_box(s, rng);
        } else {
          return sample_sphere(s, rng);
        }
      },
      spec);
}

namespace {

Vec3 vec3_param(const Json& params, const char* key, const std::string& sampler) {
  if (!params.contains(key)) throw InvalidSpecError(sampler + ": missing parameter '" + key + "'");
  try {
    return SettingsTree(params).get<Vec3>(key);
  } catch (const SettingsError& e) {
    throw InvalidSpecError(sampler + ": " + e.what());
  }
}

double number_param(const Json& v, const std::string& where) {
  if (!v.is_number()) throw InvalidSpecError(where + " must be a number");
  return v.get<double>();
}

}  // namespace

SamplerSpec resolve_sampler(const Json& value) {
  if (value.is_array()) {
    try {
      return ConstantSpec{SettingsTree(Json{{"v", value}}).get<Vec3>("v")};
    } catch (const SettingsError&) {
      throw InvalidSpecError("a literal location must be a list of 3 numbers");
    }
  }
  if (!value.is_object() || !value.contains("name") || !value["name"].is_string())
    throw InvalidSpecError("a sampler must be a 3-vector or an object with a 'name'");
  const auto name = value["name"].get<std::string>();
  const Json params = value.value("parameters", Json::object());
  if (!params.is_object()) throw InvalidSpecError(name + ": 'parameters' must be an object");

  if (name == "Uniform3dSampler") {
    BoxSpec box{vec3_param(params, "min", name), vec3_param(params, "max", name)};
    for (int i = 0; i < 3; ++i)
      if (box.min[i] > box.max[i]) throw InvalidSpecError(name + ": min exceeds max on an axis");
    return box;
  }
  if (name == "SphereSampler") {
    SphereSpec sphere;
    sphere.center = vec3_param(params, "center", name);
    if (!params.contains("radius")) throw InvalidSpecError(name + ": missing parameter 'radius'");
    sphere.radius = number_param(params["radius"], name + ".radius");
    if (!(sphere.radius >= 0.0)) throw InvalidSpecError(name + ": radius must be >= 0");
    const auto mode = params.value("mode", std::string("INTERIOR"));
    if (mode == "SURFACE") {
      sphere.mode = SphereMode::surface;
    } else if (mode == "INTERIOR") {
      sphere.mode = SphereMode::interior;
    } else {
      throw InvalidSpecError(name + ": unknown mode '" + mode + "'");
    }
    return sphere;
  }
  throw UnknownSamplerError("unknown sampler '" + name + "'");
}

ProximitySpec resolve_proximity(const Json& value) {
  if (!value.is_object()) throw InvalidSpecError("proximity_checks must be an object");
  ProximitySpec spec;
  if (value.contains("min")) {
    spec.min = number_param(value["min"], "proximity_checks.min");
    if (!(*spec.min > 0.0)) throw InvalidSpecError("proximity_checks.min must be > 0");
  }
  if (value.contains("avg")) {
    const Json& avg = value["avg"];
    AverageRange range;
    if (avg.is_array() && avg.size() == 2) {
      range = {number_param(avg[0], "proximity_checks.avg[0]"), number_param(avg[1], "proximity_checks.avg[1]")};
    } else if (avg.is_object()) {
      if (avg.contains("min")) range.min = number_param(avg["min"], "proximity_checks.avg.min");
      if (avg.contains("max")) range.max = number_param(avg["max"], "proximity_checks.avg.max");
    } else {
      throw InvalidSpecError("proximity_checks.avg must be {min, max} or [min, max]");
    }
    if (range.min > range.max) throw InvalidSpecError("proximity_checks.avg.min exceeds avg.max");
    spec.avg = range;
  }
  return spec;
}

Placement sample_collision_free(const BoxSpec& spec, const Aabb& target, std::span<const Aabb> obstacles, Rng& rng,
                                std::uint32_t max_attempts) {
  if (max_attempts < 1) throw InvalidSpecError("max_attempts must be at least 1");
  const Vec3 center = target.center();
  for (std::uint32_t attempt = 1; attempt <= max_attempts; ++attempt) {
    const Vec3 p = sample_uniform_box(spec, rng);
    const Aabb moved = target.translated(p - center);
    const bool collides = std::ranges::any_of(obstacles, [&](const Aabb& o) { return moved.overlaps(o); });
    if (!collides) return {p, attempt};
  }
  throw ExhaustedError("no collision-free placement found", max_attempts);
}

Placement sample_collision_free(const BoxSpec& spec, const Aabb& target, const Scene& scene, Rng& rng,
                                std::uint32_t max_attempts) {
  std::vector<Aabb> obstacles;
  for (const auto& mesh : scene.meshes()) obstacles.push_back(compute_aabb(mesh));
  return sample_collision_free(spec, target, obstacles, rng, max_attempts);
}

std::vector<double> proximity_distances(const CameraKeyframe& pose, const CameraIntrinsics& intrinsics,
                                        const Bvh& bvh, std::uint32_t grid) {
  if (grid < 1) throw InvalidSpecError("proximity grid must be at least 1");
  const Vec3 forward = camera_forward(pose);
  std::vector<double> depths;
  depths.reserve(static_cast<std::size_t>(grid) * grid);
  for (std::uint32_t j = 0; j < grid; ++j) {
    for (std::uint32_t i = 0; i < grid; ++i) {
      const double ndc_x = 2.0 * (i + 0.5) / grid - 1.0;
      const double ndc_y = 1.0 - 2.0 * (j + 0.5) / grid;
      const Ray ray = camera_ray_ndc(intrinsics, pose, ndc_x, ndc_y);
      if (const auto hit = bvh.intersect_nearest(ray)) depths.push_back(hit->t * dot(ray.direction, forward));
    }
  }
  return depths;
}

bool proximity_satisfied(const ProximitySpec& spec, std::span<const double> depths) {
  if (spec.min && std::ranges::any_of(depths, [&](double d) { return d < *spec.min; })) return false;
  if (spec.avg) {
    if (depths.empty()) return false;
    const double mean = std::accumulate(depths.begin(), depths.end(), 0.0) / static_cast<double>(depths.size());
    if (mean < spec.avg->min || mean > spec.avg->max) return false;
  }
  return true;
}

bool check_proximity(const CameraKeyframe& pose, const CameraIntrinsics& intrinsics, const ProximitySpec& spec,
                     const Bvh& bvh, std::uint32_t grid) {
  if (!spec.min && !spec.avg) return true;
  return proximity_satisfied(spec, proximity_distances(pose, intrinsics, bvh, grid));
}

}  // namespace synthgen
