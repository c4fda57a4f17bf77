// Copyright 2026 The synthgen Authors
// SPDX-License-Identifier: Apache-2.0

#include "synthgen/camera.hpp"

namespace synthgen {

std::string_view to_string(Eye eye) {
  switch (eye) {
    case Eye::left:
      return "left";
    case Eye::right:
      return "right";
    case Eye::mono:
      break;
  }
  return "mono";
}

Ray camera_ray_ndc(const CameraIntrinsics& intrinsics, const CameraKeyframe& keyframe, double ndc_x,
                   double ndc_y, Eye eye) {
  const double half_h = std::tan(intrinsics.vertical_fov / 2.0);
  const double half_w = half_h * intrinsics.aspect();
  const Mat3 rotation = camera_to_world(keyframe);
  const Vec3 local_dir = normalize(Vec3{ndc_x * half_w, ndc_y * half_h, -1.0});

  Vec3 local_origin{};
  if (eye == Eye::left) local_origin.x = -intrinsics.interocular_distance / 2.0;
  if (eye == Eye::right) local_origin.x = intrinsics.interocular_distance / 2.0;

  Ray ray;
  ray.origin = keyframe.location + rotation * local_origin;
  ray.direction = normalize(rotation * local_dir);
  return ray;
}

Ray generate_camera_ray(const CameraIntrinsics& intrinsics, const CameraKeyframe& keyframe, std::uint32_t x,
                        std::uint32_t y, double u, double v, Eye eye) {
  const double ndc_x = 2.0 * (static_cast<double>(x) + u) / static_cast<double>(intrinsics.resolution_x) - 1.0;
  const double ndc_y = 1.0 - 2.0 * (static_cast<double>(y) + v) / static_cast<double>(intrinsics.resolution_y);
  return camera_ray_ndc(intrinsics, keyframe, ndc_x, ndc_y, eye);
}

}  // namespace synthgen
