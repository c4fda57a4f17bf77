// Copyright 2026 The synthgen Authors
// SPDX-License-Identifier: Apache-2.0

#include "synthgen/scene.hpp"

namespace synthgen {

bool enforce_energy_conservation(Material& material) {
  const double worst = max_component(material.diffuse_albedo + material.specular_albedo);
  if (worst <= 1.0) return false;
  const double scale = 1.0 / worst;
  material.diffuse_albedo *= scale;
  material.specular_albedo *= scale;
  return true;
}

Aabb compute_aabb(const TriangleMesh& mesh) {
  if (mesh.vertices.empty()) throw EmptyMeshError("mesh '" + mesh.object_name + "' has no vertices");
  Aabb box;
  for (const auto& v : mesh.vertices) box.expand(v);
  return box;
}

Scene::Scene() { clear(); }

void Scene::clear() {
  meshes_.clear();
  materials_.assign(1, Material{});
  lights_.clear();
  keyframes_.clear();
  next_instance_id_ = 1;
  ++version_;
}

std::int32_t Scene::add_mesh(TriangleMesh mesh) {
  if (mesh.vertices.empty()) throw EmptyMeshError("mesh '" + mesh.object_name + "' has no vertices");
  for (const auto& tri : mesh.triangles)
    for (auto idx : tri)
      if (idx >= mesh.vertices.size())
        throw SceneError("mesh '" + mesh.object_name + "' references vertex " + std::to_string(idx) +
                         " of " + std::to_string(mesh.vertices.size()));
  if (!mesh.normals.empty()) {
    if (mesh.normals.size() != mesh.vertices.size())
      throw SceneError("mesh '" + mesh.object_name + "' must have one normal per vertex");
    for (const auto& n : mesh.normals)
      if (std::abs(length(n) - 1.0) > 1e-6)
        throw SceneError("mesh '" + mesh.object_name + "' has a non-unit normal");
  }
  if (mesh.material_id >= materials_.size())
    throw SceneError("mesh '" + mesh.object_name + "' references unknown material " +
                     std::to_string(mesh.material_id));
  if (mesh.category_id < 0) throw SceneError("mesh '" + mesh.object_name + "' has a negative category_id");
  mesh.instance_id = next_instance_id_++;
  meshes_.push_back(std::move(mesh));
  ++version_;
  return meshes_.back().instance_id;
}

std::uint32_t Scene::add_material(Material material) {
  materials_.push_back(std::move(material));
  return static_cast<std::uint32_t>(materials_.size() - 1);
}

std::uint32_t Scene::add_camera_keyframe(const CameraPose& pose) {
  const auto index = static_cast<std::uint32_t>(keyframes_.size());
  keyframes_.push_back({pose.location, pose.rotation, index});
  return index;
}

void Scene::translate_mesh(std::size_t mesh_index, const Vec3& offset) {
  for (auto& v : meshes_.at(mesh_index).vertices) v += offset;
  ++version_;
}

void Scene::set_category(std::size_t mesh_index, std::int32_t category_id) {
  if (category_id < 0) throw SceneError("category_id must be non-negative");
  meshes_.at(mesh_index).category_id = category_id;
}

std::size_t Scene::triangle_count() const {
  std::size_t n = 0;
  for (const auto& m : meshes_) n += m.triangles.size();
  return n;
}

Vec3 look_at_rotation(const Vec3& eye, const Vec3& target, const Vec3& up) {
  const Vec3 forward = normalize(target - eye);
  Vec3 right = cross(forward, up);
  if (length(right) < 1e-12) {
    // Looking along `up`: any perpendicular right vector will do.
    right = cross(forward, std::abs(forward.x) < 0.9 ? Vec3{1, 0, 0} : Vec3{0, 1, 0});
  }
  right = normalize(right);
  const Vec3 cam_up = cross(right, forward);
  return euler_xyz_from_rotation(Mat3::from_columns(right, cam_up, -forward));
}

}  // namespace synthgen
