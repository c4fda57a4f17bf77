// Copyright 2026 The synthgen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "synthgen/error.hpp"
#include "synthgen/math.hpp"

namespace synthgen {

SYNTHGEN_DEFINE_ERROR(SceneError, Error);
SYNTHGEN_DEFINE_ERROR(EmptyMeshError, SceneError);

struct Material {
  std::string name = "default";
  Rgb diffuse_albedo{0.8, 0.8, 0.8};
  Rgb specular_albedo{0.0, 0.0, 0.0};
  double shininess = 0.0;
  Rgb emission{0.0, 0.0, 0.0};

  bool is_emissive() const { return max_component(emission) > 0.0; }
};

// Scales diffuse and specular albedo down so their sum stays <= 1 per channel.
// Returns true when the material had to be adjusted.
bool enforce_energy_conservation(Material& material);

struct TriangleMesh {
  std::vector<Vec3> vertices;
  std::vector<Vec3> normals;  // empty, or one unit normal per vertex
  std::vector<std::array<std::uint32_t, 3>> triangles;
  std::uint32_t material_id = 0;
  std::string object_name;
  std::int32_t category_id = 0;  // 0 = background/unlabeled
  std::int32_t instance_id = 0;  // assigned by Scene::add_mesh
};

/// Componentwise bounds of all vertices. Throws EmptyMeshError for a mesh with no vertices.
Aabb compute_aabb(const TriangleMesh& mesh);

struct Light {
  Vec3 position;
  Rgb intensity{1.0, 1.0, 1.0};  // radiant intensity of a point light
};

struct CameraPose {
  Vec3 location;
  Vec3 rotation;  // Euler XYZ, radians
};

struct CameraKeyframe {
  Vec3 location;
  Vec3 rotation;
  std::uint32_t frame_index = 0;
};

struct CameraIntrinsics {
  std::uint32_t resolution_x = 512;
  std::uint32_t resolution_y = 512;
  double vertical_fov = kPi / 4.0;
  bool stereo = false;
  double interocular_distance = 0.065;

  double aspect() const {
    return static_cast<double>(resolution_x) / static_cast<double>(resolution_y);
  }
};

/// World state shared by the pipeline modules: meshes, materials, point
/// lights and camera keyframes. Geometry edits bump `version()` so derived
/// acceleration structures know when to rebuild.
class Scene {
 public:
  Scene();

  std::span<const TriangleMesh> meshes() const { return meshes_; }
  std::span<const Material> materials() const { return materials_; }
  std::span<const Light> lights() const { return lights_; }
  std::span<const CameraKeyframe> keyframes() const { return keyframes_; }
  std::uint64_t version() const { return version_; }

  const Material& material_of(const TriangleMesh& mesh) const { return materials_[mesh.material_id]; }

  /// Validates the mesh, assigns the next instance id and returns it.
  std::int32_t add_mesh(TriangleMesh mesh);
  std::uint32_t add_material(Material material);
  void add_light(Light light) { lights_.push_back(light); }
  std::uint32_t add_camera_keyframe(const CameraPose& pose);

  void translate_mesh(std::size_t mesh_index, const Vec3& offset);
  void set_category(std::size_t mesh_index, std::int32_t category_id);

  std::size_t triangle_count() const;
  void clear();

 private:
  std::vector<TriangleMesh> meshes_;
  std::vector<Material> materials_;
  std::vector<Light> lights_;
  std::vector<CameraKeyframe> keyframes_;
  std::int32_t next_instance_id_ = 1;
  std::uint64_t version_ = 0;
};

/// Camera-to-world rotation for a keyframe. The camera looks along its local
/// -Z axis with +Y up.
inline Mat3 camera_to_world(const CameraKeyframe& k) { return rotation_from_euler_xyz(k.rotation); }

/// Euler XYZ rotation that points the camera at `target`, keeping `up` as
/// close to the image's +Y as possible.
Vec3 look_at_rotation(const Vec3& eye, const Vec3& target, const Vec3& up = {0.0, 1.0, 0.0});

}  // namespace synthgen
