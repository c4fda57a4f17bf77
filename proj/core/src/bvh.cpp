// Copyright 2026 The synthgen Authors
// SPDX-License-Identifier: Apache-2.0

#include "synthgen/bvh.hpp"

#include <algorithm>
#include <numeric>

namespace synthgen {

std::optional<TriangleHit> intersect_triangle(const Ray& ray, const Vec3& v0, const Vec3& v1,
                                              const Vec3& v2) {
  // Shear the triangle into ray space so the ray becomes the +z axis, then
  // evaluate 2D edge functions. Shared edges evaluate bit-identically from
  // both neighbors, which makes the test watertight.
  const Vec3& d = ray.direction;
  int kz = 0;
  if (std::abs(d.y) > std::abs(d[kz])) kz = 1;
  if (std::abs(d.z) > std::abs(d[kz])) kz = 2;
  int kx = (kz + 1) % 3;
  int ky = (kx + 1) % 3;
  if (d[kz] < 0.0) std::swap(kx, ky);

  const double sx = d[kx] / d[kz];
  const double sy = d[ky] / d[kz];
  const double sz = 1.0 / d[kz];

  const Vec3 a = v0 - ray.origin;
  const Vec3 b = v1 - ray.origin;
  const Vec3 c = v2 - ray.origin;
  const double ax = a[kx] - sx * a[kz], ay = a[ky] - sy * a[kz];
  const double bx = b[kx] - sx * b[kz], by = b[ky] - sy * b[kz];
  const double cx = c[kx] - sx * c[kz], cy = c[ky] - sy * c[kz];

  double u = cx * by - cy * bx;
  double v = ax * cy - ay * cx;
  double w = bx * ay - by * ax;
  if (u == 0.0 || v == 0.0 || w == 0.0) {
    // Re-evaluate exactly-zero edge functions at higher precision.
    using ld = long double;
    u = static_cast<double>(ld(cx) * ld(by) - ld(cy) * ld(bx));
    v = static_cast<double>(ld(ax) * ld(cy) - ld(ay) * ld(cx));
    w = static_cast<double>(ld(bx) * ld(ay) - ld(by) * ld(ax));
  }
  if ((u < 0.0 || v < 0.0 || w < 0.0) && (u > 0.0 || v > 0.0 || w > 0.0)) return std::nullopt;
  const double det = u + v + w;
  if (det == 0.0) return std::nullopt;

  const double az = sz * a[kz], bz = sz * b[kz], cz = sz * c[kz];
  const double t = (u * az + v * bz + w * cz) / det;
  if (!(t > ray.t_min && t < ray.t_max)) return std::nullopt;
  return TriangleHit{t, v / det, w / det};
}

namespace {

// Slab test against [t_min, t_max]. NaNs from 0 * inf are ignored by the
// argument order of std::max/std::min.
bool hit_box(const Aabb& box, const Vec3& origin, const Vec3& inv_dir, double t_min, double t_max) {
  for (int i = 0; i < 3; ++i) {
    double t0 = (box.lo[i] - origin[i]) * inv_dir[i];
    double t1 = (box.hi[i] - origin[i]) * inv_dir[i];
    if (t0 > t1) std::swap(t0, t1);
    t_min = std::max(t_min, t0);
    t_max = std::min(t_max, t1);
    if (t_min > t_max) return false;
  }
  return true;
}

}  // namespace

Bvh::Bvh(const Scene& scene) : scene_version_(scene.version()) {
  const auto meshes = scene.meshes();
  std::vector<Triangle> source;
  source.reserve(scene.triangle_count());
  Aabb world;
  for (std::uint32_t m = 0; m < meshes.size(); ++m) {
    const auto& mesh = meshes[m];
    for (std::uint32_t t = 0; t < mesh.triangles.size(); ++t) {
      Triangle tri;
      for (int k = 0; k < 3; ++k) {
        tri.v[k] = mesh.vertices[mesh.triangles[t][k]];
        world.expand(tri.v[k]);
      }
      if (!mesh.normals.empty()) {
        tri.has_normals = true;
        for (int k = 0; k < 3; ++k) tri.n[k] = mesh.normals[mesh.triangles[t][k]];
      }
      tri.order = static_cast<std::uint32_t>(source.size());
      tri.ref = {m, t};
      source.push_back(tri);
    }
  }
  if (source.empty()) throw EmptySceneError("cannot build a BVH over a scene without triangles");

  // Boxes are padded by a scene-wide constant so the slab test stays
  // conservative under rounding and children remain inside their parents.
  const double scale = std::max({std::abs(world.lo.x), std::abs(world.lo.y), std::abs(world.lo.z),
                                 std::abs(world.hi.x), std::abs(world.hi.y), std::abs(world.hi.z), 1.0});
  const double pad = 1e-9 * scale;

  std::vector<Vec3> centroids(source.size());
  for (std::size_t i = 0; i < source.size(); ++i)
    centroids[i] = (source[i].v[0] + source[i].v[1] + source[i].v[2]) / 3.0;
  std::vector<std::uint32_t> ids(source.size());
  std::iota(ids.begin(), ids.end(), 0u);

  nodes_.reserve(2 * source.size() / kMaxLeafSize + 1);
  triangles_.reserve(source.size());
  build_recursive(ids, 0, ids.size(), source, centroids, pad);

  refs_.reserve(triangles_.size());
  for (const auto& tri : triangles_) refs_.push_back(tri.ref);
}

std::uint32_t Bvh::build_recursive(std::vector<std::uint32_t>& ids, std::size_t begin, std::size_t end,
                                   const std::vector<Triangle>& input, const std::vector<Vec3>& centroids,
                                   double pad) {
  const auto index = static_cast<std::uint32_t>(nodes_.size());
  nodes_.emplace_back();

  Aabb bounds, centroid_bounds;
  for (std::size_t i = begin; i < end; ++i) {
    const auto& tri = input[ids[i]];
    for (const auto& v : tri.v) bounds.expand(v);
    centroid_bounds.expand(centroids[ids[i]]);
  }
  bounds.lo = bounds.lo - Vec3{pad, pad, pad};
  bounds.hi = bounds.hi + Vec3{pad, pad, pad};
  nodes_[index].bounds = bounds;

  const std::size_t count = end - begin;
  if (count <= kMaxLeafSize) {
    nodes_[index].offset = static_cast<std::uint32_t>(triangles_.size());
    nodes_[index].count = static_cast<std::uint32_t>(count);
    for (std::size_t i = begin; i < end; ++i) triangles_.push_back(input[ids[i]]);
    return index;
  }

  const Vec3 extent = centroid_bounds.extent();
  int axis = 0;
  if (extent.y > extent[axis]) axis = 1;
  if (extent.z > extent[axis]) axis = 2;
  const std::size_t mid = begin + count / 2;
  std::nth_element(ids.begin() + static_cast<std::ptrdiff_t>(begin), ids.begin() + static_cast<std::ptrdiff_t>(mid),
                   ids.begin() + static_cast<std::ptrdiff_t>(end), [&](std::uint32_t a, std::uint32_t b) {
                     const double ca = centroids[a][axis], cb = centroids[b][axis];
                     return ca < cb || (ca == cb && a < b);
                   });

  nodes_[index].axis = static_cast<std::uint8_t>(axis);
  build_recursive(ids, begin, mid, input, centroids, pad);
  const auto right = build_recursive(ids, mid, end, input, centroids, pad);
  nodes_[index].offset = right;
  return index;
}

Hit Bvh::make_hit(const Ray& ray, const Triangle& tri, const TriangleHit& th) const {
  Hit hit;
  hit.t = th.t;
  hit.point = ray.origin + ray.direction * th.t;
  hit.geometric_normal = normalize(cross(tri.v[1] - tri.v[0], tri.v[2] - tri.v[0]));
  hit.shading_normal = hit.geometric_normal;
  if (tri.has_normals) {
    const Vec3 n = normalize(tri.n[0] * (1.0 - th.b1 - th.b2) + tri.n[1] * th.b1 + tri.n[2] * th.b2);
    if (length(n) > 0.0) hit.shading_normal = n;
  }
  hit.mesh_id = tri.ref.mesh_id;
  hit.triangle_id = tri.ref.triangle_id;
  return hit;
}

namespace {
Vec3 inverse_direction(const Vec3& d) { return {1.0 / d.x, 1.0 / d.y, 1.0 / d.z}; }
}  // namespace

std::optional<Hit> Bvh::intersect_nearest(const Ray& ray) const {
  const Vec3 inv_dir = inverse_direction(ray.direction);
  const bool negative[3] = {ray.direction.x < 0, ray.direction.y < 0, ray.direction.z < 0};

  Ray clipped = ray;
  const Triangle* best = nullptr;
  TriangleHit best_hit{};

  std::uint32_t stack[64];
  int top = 0;
  stack[top++] = 0;
  while (top > 0) {
    const Node& node = nodes_[stack[--top]];
    if (!hit_box(node.bounds, ray.origin, inv_dir, ray.t_min, clipped.t_max)) continue;
    if (node.is_leaf()) {
      for (std::uint32_t i = node.offset; i < node.offset + node.count; ++i) {
        const Triangle& tri = triangles_[i];
        // Allow equal distances through so ties resolve by primitive order.
        Ray probe = clipped;
        if (best) probe.t_max = std::nextafter(best_hit.t, kInfinity);
        const auto th = intersect_triangle(probe, tri.v[0], tri.v[1], tri.v[2]);
        if (!th) continue;
        if (!best || th->t < best_hit.t || (th->t == best_hit.t && tri.order < best->order)) {
          best = &tri;
          best_hit = *th;
          clipped.t_max = th->t;
        }
      }
      continue;
    }
    const std::uint32_t self = static_cast<std::uint32_t>(&node - nodes_.data());
    const std::uint32_t left = self + 1, right = node.offset;
    // Visit the near child first.
    if (negative[node.axis]) {
      stack[top++] = left;
      stack[top++] = right;
    } else {
      stack[top++] = right;
      stack[top++] = left;
    }
  }
  if (!best) return std::nullopt;
  return make_hit(ray, *best, best_hit);
}

bool Bvh::occluded(const Ray& ray) const {
  const Vec3 inv_dir = inverse_direction(ray.direction);
  std::uint32_t stack[64];
  int top = 0;
  stack[top++] = 0;
  while (top > 0) {
    const std::uint32_t id = stack[--top];
    const Node& node = nodes_[id];
    if (!hit_box(node.bounds, ray.origin, inv_dir, ray.t_min, ray.t_max)) continue;
    if (node.is_leaf()) {
      for (std::uint32_t i = node.offset; i < node.offset + node.count; ++i) {
        const Triangle& tri = triangles_[i];
        if (intersect_triangle(ray, tri.v[0], tri.v[1], tri.v[2])) return true;
      }
      continue;
    }
    stack[top++] = node.offset;
    stack[top++] = id + 1;
  }
  return false;
}

std::size_t Bvh::depth() const {
  std::size_t deepest = 0;
  std::vector<std::pair<std::uint32_t, std::size_t>> stack{{0u, 1u}};
  while (!stack.empty()) {
    const auto [id, d] = stack.back();
    stack.pop_back();
    deepest = std::max(deepest, d);
    if (!nodes_[id].is_leaf()) {
      stack.emplace_back(id + 1, d + 1);
      stack.emplace_back(nodes_[id].offset, d + 1);
    }
  }
  return deepest;
}

}  // namespace synthgen
