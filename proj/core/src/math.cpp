// Copyright 2026 The synthgen Authors
// SPDX-License-Identifier: Apache-2.0

#include "synthgen/math.hpp"

namespace synthgen {

Mat3 rotation_from_euler_xyz(const Vec3& radians) {
  const double ca = std::cos(radians.x), sa = std::sin(radians.x);
  const double cb = std::cos(radians.y), sb = std::sin(radians.y);
  const double cg = std::cos(radians.z), sg = std::sin(radians.z);
  Mat3 r;
  r.m = {cg * cb, cg * sb * sa - sg * ca, cg * sb * ca + sg * sa,
         sg * cb, sg * sb * sa + cg * ca, sg * sb * ca - cg * sa,
         -sb,     cb * sa,                cb * ca};
  return r;
}

Vec3 euler_xyz_from_rotation(const Mat3& r) {
  const double sb = std::clamp(-r(2, 0), -1.0, 1.0);
  const double beta = std::asin(sb);
  if (std::abs(sb) < 1.0 - 1e-12) {
    return {std::atan2(r(2, 1), r(2, 2)), beta, std::atan2(r(1, 0), r(0, 0))};
  }
  // Gimbal lock: only alpha - gamma (or alpha + gamma) is determined; pin gamma to 0.
  return {std::atan2(-r(1, 2), r(1, 1)), beta, 0.0};
}

namespace {
constexpr std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}
}  // namespace

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ a);
  h = splitmix64(h ^ b);
  h = splitmix64(h ^ c);
  return h;
}

}  // namespace synthgen
