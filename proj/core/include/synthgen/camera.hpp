// Copyright 2026 The synthgen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string_view>

#include "synthgen/bvh.hpp"
#include "synthgen/scene.hpp"

namespace synthgen {

enum class Eye : std::uint8_t { mono, left, right };

std::string_view to_string(Eye eye);

/// Ray through normalized image-plane coordinates: ndc_x in [-1, 1] left to
/// right, ndc_y in [-1, 1] bottom to top. The vertical half-extent of the
/// plane at unit distance is tan(vertical_fov / 2); the horizontal one is
/// that times the aspect ratio. Stereo eyes sit at -/+ half the
/// interocular distance along the camera's +X axis (parallel rig).
Ray camera_ray_ndc(const CameraIntrinsics& intrinsics, const CameraKeyframe& keyframe, double ndc_x,
                   double ndc_y, Eye eye = Eye::mono);

/// Pinhole ray through pixel (x, y) offset by (u, v) in [0, 1); (0.5, 0.5)
/// is the pixel center. Row 0 is the top of the image.
Ray generate_camera_ray(const CameraIntrinsics& intrinsics, const CameraKeyframe& keyframe, std::uint32_t x,
                        std::uint32_t y, double u = 0.5, double v = 0.5, Eye eye = Eye::mono);

/// World-space viewing axis (camera -Z).
inline Vec3 camera_forward(const CameraKeyframe& keyframe) {
  return camera_to_world(keyframe) * Vec3{0.0, 0.0, -1.0};
}

/// Distance from the camera to `point` along the viewing axis.
inline double z_depth(const CameraKeyframe& keyframe, const Vec3& origin, const Vec3& point) {
  return dot(point - origin, camera_forward(keyframe));
}

}  // namespace synthgen
