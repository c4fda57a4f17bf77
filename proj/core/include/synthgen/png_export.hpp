// Copyright 2026 The synthgen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "synthgen/render.hpp"

namespace synthgen {

/// 8-bit RGB preview of a frame. Colors: linear to sRGB with clamping.
/// Depth and normals: min-max normalized over finite values. Segmaps:
/// (id * 37) mod 255 grey levels.
std::vector<std::uint8_t> preview_rgb8(const FrameBuffer& frame);

/// Writes `{index}_{key}.png` for each frame and returns the paths.
std::vector<std::filesystem::path> export_png_previews(std::span<const FrameBuffer> frames,
                                                       const std::filesystem::path& out_dir);

}  // namespace synthgen
