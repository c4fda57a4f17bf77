// Copyright 2026 The synthgen Authors
// SPDX-License-Identifier: Apache-2.0

#include <random>
#include <set>

#include <gtest/gtest.h>

#include "support/test_support.hpp"
#include "synthgen/camera.hpp"
#include "synthgen/scene.hpp"

namespace sg = synthgen;

TEST(ComputeAabb, UnitCube) {
  sg::TriangleMesh m;
  for (int i = 0; i < 8; ++i) m.vertices.push_back({double(i & 1), double((i >> 1) & 1), double((i >> 2) & 1)});
  const auto box = sg::compute_aabb(m);
  EXPECT_EQ(box.lo, (sg::Vec3{0, 0, 0}));
  EXPECT_EQ(box.hi, (sg::Vec3{1, 1, 1}));
}

TEST(ComputeAabb, SingleVertex) {
  sg::TriangleMesh m;
  m.vertices = {{2, 3, 4}};
  const auto box = sg::compute_aabb(m);
  EXPECT_EQ(box.lo, (sg::Vec3{2, 3, 4}));
  EXPECT_EQ(box.hi, (sg::Vec3{2, 3, 4}));
}

TEST(ComputeAabb, EmptyMeshThrows) { EXPECT_THROW(sg::compute_aabb(sg::TriangleMesh{}), sg::EmptyMeshError); }

TEST(ComputeAabb, MatchesExhaustiveScan) {
  std::mt19937_64 gen(7);
  std::normal_distribution<double> d(0.0, 3.0);
  for (int trial = 0; trial < 50; ++trial) {
    sg::TriangleMesh m;
    for (int i = 0; i < 50; ++i) m.vertices.push_back({d(gen), d(gen), d(gen)});
    double lo[3] = {1e300, 1e300, 1e300}, hi[3] = {-1e300, -1e300, -1e300};
    for (const auto& v : m.vertices) {
      const double c[3] = {v.x, v.y, v.z};
      for (int a = 0; a < 3; ++a) {
        if (c[a] < lo[a]) lo[a] = c[a];
        if (c[a] > hi[a]) hi[a] = c[a];
      }
    }
    const auto box = sg::compute_aabb(m);
    EXPECT_EQ(box.lo, (sg::Vec3{lo[0], lo[1], lo[2]}));
    EXPECT_EQ(box.hi, (sg::Vec3{hi[0], hi[1], hi[2]}));
  }
}

TEST(Scene, KeyframeIndicesAreConsecutive) {
  sg::Scene scene;
  EXPECT_EQ(scene.add_camera_keyframe({{1, 2, 3}, {0, 0, 0}}), 0u);
  EXPECT_EQ(scene.add_camera_keyframe({}), 1u);
  EXPECT_EQ(scene.add_camera_keyframe({}), 2u);
  ASSERT_EQ(scene.keyframes().size(), 3u);
  for (std::uint32_t i = 0; i < 3; ++i) EXPECT_EQ(scene.keyframes()[i].frame_index, i);
  EXPECT_EQ(scene.keyframes()[0].location, (sg::Vec3{1, 2, 3}));
}

TEST(Scene, InstanceIdsAreUniqueAndPositive) {
  sg::Scene scene;
  std::set<std::int32_t> ids;
  for (int i = 0; i < 5; ++i) ids.insert(scene.add_mesh(sg::testing::make_rect_z(0, 1, 0, 1, -i)));
  EXPECT_EQ(ids.size(), 5u);
  EXPECT_GT(*ids.begin(), 0);
}

TEST(Scene, RejectsOutOfRangeIndices) {
  auto m = sg::testing::make_rect_z(0, 1, 0, 1, 0);
  m.triangles.push_back({0, 1, 4});
  sg::Scene scene;
  EXPECT_THROW(scene.add_mesh(m), sg::SceneError);
}

TEST(Scene, RejectsNonUnitNormals) {
  auto m = sg::testing::make_rect_z(0, 1, 0, 1, 0);
  m.normals.assign(4, {0, 0, 1});
  m.normals[2] = {0, 0, 1.01};
  sg::Scene scene;
  EXPECT_THROW(scene.add_mesh(m), sg::SceneError);
}

TEST(Scene, RejectsUnknownMaterial) {
  auto m = sg::testing::make_rect_z(0, 1, 0, 1, 0);
  m.material_id = 3;
  sg::Scene scene;
  EXPECT_THROW(scene.add_mesh(m), sg::SceneError);
}

TEST(Scene, GeometryEditsBumpVersion) {
  sg::Scene scene;
  const auto v0 = scene.version();
  scene.add_mesh(sg::testing::make_rect_z(0, 1, 0, 1, 0));
  const auto v1 = scene.version();
  EXPECT_NE(v0, v1);
  scene.add_camera_keyframe({});
  scene.add_light({});
  EXPECT_EQ(scene.version(), v1);
  scene.translate_mesh(0, {1, 0, 0});
  EXPECT_NE(scene.version(), v1);
  EXPECT_DOUBLE_EQ(scene.meshes()[0].vertices[0].x, 1.0);
}

TEST(Scene, ClearKeepsDefaultMaterial) {
  sg::Scene scene;
  scene.add_material({});
  scene.add_mesh(sg::testing::make_rect_z(0, 1, 0, 1, 0));
  scene.clear();
  EXPECT_TRUE(scene.meshes().empty());
  ASSERT_EQ(scene.materials().size(), 1u);
  EXPECT_EQ(scene.materials()[0].diffuse_albedo, (sg::Rgb{0.8, 0.8, 0.8}));
}

TEST(Material, EnergyConservationScalesDown) {
  sg::Material m;
  m.diffuse_albedo = {0.8, 0.5, 0.2};
  m.specular_albedo = {0.6, 0.2, 0.2};
  EXPECT_TRUE(sg::enforce_energy_conservation(m));
  const auto total = m.diffuse_albedo + m.specular_albedo;
  EXPECT_LE(total.x, 1.0 + 1e-12);
  EXPECT_LE(total.y, 1.0 + 1e-12);
  sg::Material ok;
  EXPECT_FALSE(sg::enforce_energy_conservation(ok));
}

// A keyframe at the origin with no rotation sees (0, 0, -d) on its optical axis.
TEST(CameraConvention, LooksDownNegativeZ) {
  const sg::CameraKeyframe kf{};
  const sg::CameraIntrinsics intr;
  const auto ray = sg::camera_ray_ndc(intr, kf, 0.0, 0.0);
  EXPECT_NEAR(ray.direction.x, 0.0, 1e-12);
  EXPECT_NEAR(ray.direction.y, 0.0, 1e-12);
  EXPECT_NEAR(ray.direction.z, -1.0, 1e-12);
  EXPECT_DOUBLE_EQ(sg::z_depth(kf, ray.origin, {0, 0, -3}), 3.0);
}

TEST(EulerXyz, RoundTripsThroughMatrix) {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> a(-3.0, 3.0), b(-1.5, 1.5);
  for (int i = 0; i < 200; ++i) {
    const sg::Vec3 e{a(gen), b(gen), a(gen)};
    const auto r = sg::rotation_from_euler_xyz(e);
    const auto back = sg::rotation_from_euler_xyz(sg::euler_xyz_from_rotation(r));
    for (int c = 0; c < 3; ++c)
      for (int k = 0; k < 3; ++k) EXPECT_NEAR(back.column(c)[k], r.column(c)[k], 1e-9);
  }
}

TEST(LookAt, PointsForwardAtTarget) {
  const sg::Vec3 eye{1, 2, 3}, target{-2, 0.5, -4};
  const sg::CameraKeyframe kf{eye, sg::look_at_rotation(eye, target), 0};
  const auto fwd = sg::camera_forward(kf);
  const auto want = sg::normalize(target - eye);
  EXPECT_NEAR(sg::length(fwd - want), 0.0, 1e-9);
  // Image +Y stays in the upper half space.
  EXPECT_GT((sg::camera_to_world(kf) * sg::Vec3{0, 1, 0}).y, 0.0);
}
