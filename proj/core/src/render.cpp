// Copyright 2026 The synthgen Authors
// SPDX-License-Identifier: Apache-2.0

#include "synthgen/render.hpp"

#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

#include <spdlog/spdlog.h>

namespace synthgen {

std::string_view to_string(Pass pass) {
  switch (pass) {
    case Pass::colors:
      return "colors";
    case Pass::depth:
      return "depth";
    case Pass::normals:
      return "normals";
    case Pass::segmap:
      return "segmap";
  }
  return "unknown";
}

void RenderSettings::validate() const {
  if (camera.resolution_x < 1 || camera.resolution_y < 1)
    throw RenderSettingsError("resolution must be at least 1x1");
  if (!(camera.vertical_fov > 0.0 && camera.vertical_fov < kPi))
    throw RenderSettingsError("vertical_fov must lie in (0, pi)");
  if (!(camera.interocular_distance >= 0.0)) throw RenderSettingsError("interocular_distance must be >= 0");
  if (samples < 1) throw RenderSettingsError("samples must be at least 1");
  if (max_bounces < min_bounces) throw RenderSettingsError("max_bounces must be >= min_bounces");
  if (depth_output_key.empty()) throw RenderSettingsError("depth_output_key must not be empty");
}

namespace {

template <typename T>
T non_negative(const SettingsTree& config, std::string_view key, T fallback) {
  if (!config.contains(key)) return fallback;
  const auto v = config.get<std::int64_t>(key);
  if (v < 0) throw RenderSettingsError("'" + std::string(key) + "' must be non-negative");
  return static_cast<T>(v);
}

}  // namespace

RenderSettings apply_render_config(RenderSettings s, const SettingsTree& config) {
  s.camera.resolution_x = non_negative(config, "resolution_x", s.camera.resolution_x);
  s.camera.resolution_y = non_negative(config, "resolution_y", s.camera.resolution_y);
  s.camera.vertical_fov = config.get_or("vertical_fov", s.camera.vertical_fov);
  s.camera.stereo = config.get_or("stereo", s.camera.stereo);
  s.camera.interocular_distance = config.get_or("interocular_distance", s.camera.interocular_distance);
  s.samples = non_negative(config, "samples", s.samples);
  s.min_bounces = non_negative(config, "min_bounces", s.min_bounces);
  s.max_bounces = non_negative(config, "max_bounces", s.max_bounces);
  s.glossy_bounces = non_negative(config, "glossy_bounces", s.glossy_bounces);
  s.render_depth = config.get_or("render_depth", s.render_depth);
  s.depth_output_key = config.get_or("depth_output_key", s.depth_output_key);
  s.seed = non_negative(config, "seed", s.seed);
  if (config.contains("map_by")) {
    const auto by = config.get<std::string>("map_by");
    if (by == "class") {
      s.map_by = MapBy::class_id;
    } else if (by == "instance") {
      s.map_by = MapBy::instance;
    } else {
      throw RenderSettingsError("map_by must be 'class' or 'instance', got '" + by + "'");
    }
  }
  s.validate();
  return s;
}

std::vector<InstanceInfo> instance_table(const Scene& scene) {
  std::vector<InstanceInfo> table;
  for (const auto& mesh : scene.meshes()) table.push_back({mesh.instance_id, mesh.object_name, mesh.category_id});
  return table;
}

// ---------------------------------------------------------------------------
// Sampling helpers

namespace {

// Orthonormal basis with `n` as the third axis (Duff et al. 2017).
void make_basis(const Vec3& n, Vec3& t, Vec3& b) {
  const double sign = std::copysign(1.0, n.z);
  const double a = -1.0 / (sign + n.z);
  const double c = n.x * n.y * a;
  t = {1.0 + sign * n.x * n.x * a, sign * c, -sign * n.x};
  b = {c, sign + n.y * n.y * a, -n.y};
}

Vec3 sample_cosine_hemisphere(const Vec3& n, double u1, double u2) {
  Vec3 t, b;
  make_basis(n, t, b);
  const double r = std::sqrt(u1);
  const double phi = 2.0 * kPi * u2;
  return normalize(t * (r * std::cos(phi)) + b * (r * std::sin(phi)) + n * std::sqrt(std::max(0.0, 1.0 - u1)));
}

// Direction distributed as cos^exponent around `axis`.
Vec3 sample_phong_lobe(const Vec3& axis, double exponent, double u1, double u2) {
  Vec3 t, b;
  make_basis(axis, t, b);
  const double cos_a = std::pow(u1, 1.0 / (exponent + 1.0));
  const double sin_a = std::sqrt(std::max(0.0, 1.0 - cos_a * cos_a));
  const double phi = 2.0 * kPi * u2;
  return normalize(t * (sin_a * std::cos(phi)) + b * (sin_a * std::sin(phi)) + axis * cos_a);
}

Vec3 reflect(const Vec3& wo, const Vec3& n) { return n * (2.0 * dot(n, wo)) - wo; }

// Diffuse plus normalized Phong.
Rgb eval_brdf(const Material& m, const Vec3& n, const Vec3& wo, const Vec3& wi) {
  Rgb f = m.diffuse_albedo / kPi;
  if (max_component(m.specular_albedo) > 0.0) {
    const double c = dot(reflect(wo, n), wi);
    if (c > 0.0) f += m.specular_albedo * ((m.shininess + 2.0) / (2.0 * kPi) * std::pow(c, m.shininess));
  }
  return f;
}

Vec3 offset_origin(const Vec3& p, const Vec3& n) {
  const double scale = 1.0 + std::max({std::abs(p.x), std::abs(p.y), std::abs(p.z)});
  return p + n * (1e-7 * scale);
}

}  // namespace

Rgb trace_path(const Bvh& bvh, const Scene& scene, const Ray& primary, const RenderSettings& settings, Rng& rng) {
  Rgb radiance{};
  Rgb throughput{1.0, 1.0, 1.0};
  Ray ray = primary;
  std::uint32_t glossy_events = 0;

  for (std::uint32_t bounce = 0;; ++bounce) {
    const auto hit = bvh.intersect_nearest(ray);
    if (!hit) break;

    const auto& mesh = scene.meshes()[hit->mesh_id];
    const Material& mat = scene.material_of(mesh);
    const Vec3 wo = -ray.direction;
    Vec3 ng = hit->geometric_normal;
    if (dot(ng, wo) < 0.0) ng = -ng;
    Vec3 ns = hit->shading_normal;
    if (dot(ns, ng) < 0.0) ns = -ns;

    radiance += throughput * mat.emission;

    const Vec3 origin = offset_origin(hit->point, ng);
    for (const auto& light : scene.lights()) {
      const Vec3 to_light = light.position - origin;
      const double dist2 = dot(to_light, to_light);
      if (dist2 <= 0.0) continue;
      const double dist = std::sqrt(dist2);
      const Vec3 wi = to_light / dist;
      const double cos_s = dot(ns, wi);
      if (cos_s <= 0.0 || dot(ng, wi) <= 0.0) continue;
      if (bvh.occluded(Ray{origin, wi, 0.0, dist})) continue;
      radiance += throughput * eval_brdf(mat, ns, wo, wi) * light.intensity * (cos_s / dist2);
    }

    if (bounce >= settings.max_bounces) break;

    if (bounce >= settings.min_bounces) {
      const double survival = std::min(1.0, max_component(mat.diffuse_albedo + mat.specular_albedo));
      if (survival <= 0.0 || rng.uniform() >= survival) break;
      throughput *= 1.0 / survival;
    }

    const double w_diffuse = mean_component(mat.diffuse_albedo);
    const double w_glossy = mean_component(mat.specular_albedo);
    if (w_diffuse + w_glossy <= 0.0) break;
    const double p_diffuse = w_diffuse / (w_diffuse + w_glossy);

    Vec3 wi;
    const double choice = rng.uniform();
    const double u1 = rng.uniform(), u2 = rng.uniform();
    if (choice < p_diffuse) {
      wi = sample_cosine_hemisphere(ns, u1, u2);
      throughput = throughput * mat.diffuse_albedo * (1.0 / p_diffuse);
    } else {
      if (glossy_events >= settings.glossy_bounces) break;
      ++glossy_events;
      wi = sample_phong_lobe(reflect(wo, ns), mat.shininess, u1, u2);
      const double cos_s = dot(ns, wi);
      if (cos_s <= 0.0) break;
      throughput = throughput * mat.specular_albedo *
                   ((mat.shininess + 2.0) / (mat.shininess + 1.0) * cos_s / (1.0 - p_diffuse));
    }
    if (dot(wi, ng) <= 0.0) break;
    ray = Ray{origin, wi, 0.0, kInfinity};
  }
  return radiance;
}

// ---------------------------------------------------------------------------
// Frame rendering

namespace {

template <typename Fn>
void parallel_rows(std::uint32_t rows, unsigned threads, const Fn& fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, rows);
  if (threads <= 1) {
    for (std::uint32_t y = 0; y < rows; ++y) fn(y);
    return;
  }
  std::atomic<std::uint32_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> workers;
    for (unsigned t = 0; t < threads; ++t) {
      workers.emplace_back([&] {
        try {
          for (std::uint32_t y = next++; y < rows; y = next++) fn(y);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          next = rows;
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

FrameBuffer make_buffer(Pass pass, std::string key, const CameraIntrinsics& cam, std::uint32_t channels,
                        std::uint32_t keyframe, Eye eye) {
  FrameBuffer fb;
  fb.pass = pass;
  fb.key = std::move(key);
  fb.width = cam.resolution_x;
  fb.height = cam.resolution_y;
  fb.channels = channels;
  fb.keyframe = keyframe;
  fb.eye = eye;
  const std::size_t n = static_cast<std::size_t>(fb.width) * fb.height * channels;
  if (pass == Pass::segmap) {
    fb.data = std::vector<std::int32_t>(n, 0);
  } else {
    fb.data = std::vector<float>(n, 0.0f);
  }
  return fb;
}

FrameBuffer render_eye(const Scene& scene, const Bvh& bvh, const CameraKeyframe& keyframe,
                       const RenderSettings& s, Pass pass, Eye eye) {
  const auto& cam = s.camera;
  switch (pass) {
    case Pass::colors: {
      FrameBuffer fb = make_buffer(pass, "colors", cam, 3, keyframe.frame_index, eye);
      auto& out = std::get<std::vector<float>>(fb.data);
      std::atomic<std::uint64_t> discarded{0};
      parallel_rows(cam.resolution_y, s.threads, [&](std::uint32_t y) {
        for (std::uint32_t x = 0; x < cam.resolution_x; ++x) {
          const std::uint64_t pixel = static_cast<std::uint64_t>(y) * cam.resolution_x + x;
          Rng rng = make_stream(s.seed, keyframe.frame_index, pixel, static_cast<std::uint64_t>(eye));
          Rgb sum{};
          for (std::uint32_t i = 0; i < s.samples; ++i) {
            const double u = rng.uniform(), v = rng.uniform();
            const Rgb l = trace_path(bvh, scene, generate_camera_ray(cam, keyframe, x, y, u, v, eye), s, rng);
            if (is_finite(l)) {
              sum += l;
            } else {
              ++discarded;
            }
          }
          const Rgb mean = sum / static_cast<double>(s.samples);
          for (int c = 0; c < 3; ++c) out[fb.index(x, y, static_cast<std::uint32_t>(c))] = static_cast<float>(mean[c]);
        }
      });
      if (discarded > 0)
        spdlog::warn("keyframe {}: discarded {} non-finite color sample(s)", keyframe.frame_index, discarded.load());
      return fb;
    }
    case Pass::depth:
    case Pass::normals:
    case Pass::segmap: {
      const std::uint32_t channels = pass == Pass::normals ? 3 : 1;
      std::string key = pass == Pass::depth ? s.depth_output_key : std::string(to_string(pass));
      FrameBuffer fb = make_buffer(pass, std::move(key), cam, channels, keyframe.frame_index, eye);
      const Mat3 world_to_camera = transpose(camera_to_world(keyframe));
      const Vec3 forward = camera_forward(keyframe);
      const auto meshes = scene.meshes();
      parallel_rows(cam.resolution_y, s.threads, [&](std::uint32_t y) {
        for (std::uint32_t x = 0; x < cam.resolution_x; ++x) {
          const Ray ray = generate_camera_ray(cam, keyframe, x, y, 0.5, 0.5, eye);
          const auto hit = bvh.intersect_nearest(ray);
          const std::size_t i = fb.index(x, y);
          if (pass == Pass::depth) {
            auto& out = std::get<std::vector<float>>(fb.data);
            out[i] = hit ? static_cast<float>(hit->t * dot(ray.direction, forward))
                         : std::numeric_limits<float>::infinity();
          } else if (pass == Pass::normals) {
            if (!hit) continue;
            Vec3 ng = hit->geometric_normal;
            if (dot(ng, ray.direction) > 0.0) ng = -ng;
            Vec3 ns = hit->shading_normal;
            if (dot(ns, ng) < 0.0) ns = -ns;
            const Vec3 n = normalize(world_to_camera * ns);
            auto& out = std::get<std::vector<float>>(fb.data);
            for (int c = 0; c < 3; ++c) out[i + static_cast<std::size_t>(c)] = static_cast<float>(n[c]);
          } else {
            if (!hit) continue;
            const auto& mesh = meshes[hit->mesh_id];
            std::get<std::vector<std::int32_t>>(fb.data)[i] =
                s.map_by == MapBy::instance ? mesh.instance_id : mesh.category_id;
          }
        }
      });
      if (pass == Pass::segmap && s.map_by == MapBy::instance) fb.instances = instance_table(scene);
      return fb;
    }
  }
  throw RenderSettingsError("unknown pass");
}

}  // namespace

std::vector<FrameBuffer> render_frame(const Scene& scene, const Bvh& bvh, const CameraKeyframe& keyframe,
                                      const RenderSettings& settings, Pass pass) {
  settings.validate();
  if (!settings.camera.stereo) return {render_eye(scene, bvh, keyframe, settings, pass, Eye::mono)};
  std::vector<FrameBuffer> out;
  out.push_back(render_eye(scene, bvh, keyframe, settings, pass, Eye::left));
  out.push_back(render_eye(scene, bvh, keyframe, settings, pass, Eye::right));
  return out;
}

}  // namespace synthgen
