// Copyright 2026 The synthgen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "synthgen/error.hpp"
#include "synthgen/math.hpp"
#include "synthgen/scene.hpp"

namespace synthgen {

SYNTHGEN_DEFINE_ERROR(EmptySceneError, Error);

struct Ray {
  Vec3 origin;
  Vec3 direction;  // unit length
  double t_min = 0.0;
  double t_max = kInfinity;
};

struct Hit {
  double t = kInfinity;
  Vec3 point;
  Vec3 geometric_normal;  // from the triangle winding, not flipped toward the ray
  Vec3 shading_normal;    // interpolated vertex normal, or the geometric normal
  std::uint32_t mesh_id = 0;
  std::uint32_t triangle_id = 0;
};

struct PrimitiveRef {
  std::uint32_t mesh_id;
  std::uint32_t triangle_id;
};

// Watertight ray/triangle test. Returns the hit distance and barycentric
// weights of (v1, v2) when the ray crosses the triangle within (t_min, t_max).
struct TriangleHit {
  double t;
  double b1;
  double b2;
};
std::optional<TriangleHit> intersect_triangle(const Ray& ray, const Vec3& v0, const Vec3& v1,
                                              const Vec3& v2);

/// Immutable bounding volume hierarchy over every triangle of a scene.
/// Median split over centroids along the widest axis, at most four
/// triangles per leaf. Triangle data is copied, so the tree does not
/// reference the scene after construction.
class Bvh {
 public:
  static constexpr std::uint32_t kMaxLeafSize = 4;

  struct Node {
    Aabb bounds;
    std::uint32_t offset = 0;  // leaf: first primitive; interior: right child (left child is next)
    std::uint32_t count = 0;   // primitives in a leaf, 0 for interior nodes
    std::uint8_t axis = 0;

    bool is_leaf() const { return count > 0; }
  };

  /// Throws EmptySceneError when the scene holds no triangles.
  explicit Bvh(const Scene& scene);

  std::optional<Hit> intersect_nearest(const Ray& ray) const;
  /// True when anything blocks the ray within (t_min, t_max).
  bool occluded(const Ray& ray) const;

  std::span<const Node> nodes() const { return nodes_; }
  std::span<const PrimitiveRef> primitives() const { return refs_; }
  std::size_t depth() const;
  std::uint64_t scene_version() const { return scene_version_; }

 private:
  struct Triangle {
    std::array<Vec3, 3> v;
    std::array<Vec3, 3> n;
    bool has_normals = false;
    std::uint32_t order = 0;  // global primitive index, used to break distance ties
    PrimitiveRef ref{};
  };

  std::uint32_t build_recursive(std::vector<std::uint32_t>& ids, std::size_t begin, std::size_t end,
                                const std::vector<Triangle>& input, const std::vector<Vec3>& centroids,
                                double pad);
  Hit make_hit(const Ray& ray, const Triangle& tri, const TriangleHit& th) const;

  std::vector<Node> nodes_;
  std::vector<Triangle> triangles_;  // leaf order
  std::vector<PrimitiveRef> refs_;   // leaf order
  std::uint64_t scene_version_ = 0;
};

}  // namespace synthgen
