// Copyright 2026 The synthgen Authors
// SPDX-License-Identifier: Apache-2.0

#include "synthgen/png_export.hpp"

#include <cstdio>
#include <memory>

#include <png.h>

#include "synthgen/container.hpp"

namespace synthgen {

namespace {

std::uint8_t to_byte(double v) { return static_cast<std::uint8_t>(std::clamp(v, 0.0, 1.0) * 255.0 + 0.5); }

double linear_to_srgb(double c) {
  c = std::clamp(c, 0.0, 1.0);
  return c <= 0.0031308 ? 12.92 * c : 1.055 * std::pow(c, 1.0 / 2.4) - 0.055;
}

void write_png(const std::filesystem::path& path, std::uint32_t width, std::uint32_t height,
               const std::vector<std::uint8_t>& rgb) {
  std::unique_ptr<FILE, int (*)(FILE*)> fp(std::fopen(path.c_str(), "wb"), &std::fclose);
  if (!fp) throw IoError("cannot write '" + path.string() + "'");
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_write_struct(&png, nullptr);
    throw IoError("libpng initialization failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw IoError("libpng failed writing '" + path.string() + "'");
  }
  png_init_io(png, fp.get());
  png_set_IHDR(png, info, width, height, 8, PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (std::uint32_t y = 0; y < height; ++y)
    png_write_row(png, const_cast<png_bytep>(rgb.data() + static_cast<std::size_t>(y) * width * 3));
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

}  // namespace

std::vector<std::uint8_t> preview_rgb8(const FrameBuffer& frame) {
  const std::size_t pixels = static_cast<std::size_t>(frame.width) * frame.height;
  std::vector<std::uint8_t> rgb(pixels * 3, 0);
  if (frame.pass == Pass::segmap) {
    const auto ids = frame.i32();
    for (std::size_t i = 0; i < pixels; ++i) {
      const auto level = static_cast<std::uint8_t>((static_cast<std::int64_t>(ids[i]) * 37 % 255 + 255) % 255);
      rgb[i * 3] = rgb[i * 3 + 1] = rgb[i * 3 + 2] = level;
    }
    return rgb;
  }
  const auto values = frame.f32();
  if (frame.pass == Pass::colors) {
    for (std::size_t i = 0; i < values.size(); ++i) rgb[i] = to_byte(linear_to_srgb(values[i]));
    return rgb;
  }
  double lo = kInfinity, hi = -kInfinity;
  for (float v : values) {
    if (!std::isfinite(v)) continue;
    lo = std::min(lo, static_cast<double>(v));
    hi = std::max(hi, static_cast<double>(v));
  }
  const double range = hi > lo ? hi - lo : 1.0;
  for (std::size_t i = 0; i < pixels; ++i) {
    for (std::uint32_t c = 0; c < 3; ++c) {
      const float v = values[i * frame.channels + std::min(c, frame.channels - 1)];
      rgb[i * 3 + c] = std::isfinite(v) ? to_byte((v - lo) / range) : 0;
    }
  }
  return rgb;
}

std::vector<std::filesystem::path> export_png_previews(std::span<const FrameBuffer> frames,
                                                       const std::filesystem::path& out_dir) {
  std::vector<std::filesystem::path> written;
  std::filesystem::create_directories(out_dir);
  for (const auto& f : frames) {
    const auto path = out_dir / (std::to_string(f.keyframe) + "_" + container_key(f) + ".png");
    write_png(path, f.width, f.height, preview_rgb8(f));
    written.push_back(path);
  }
  return written;
}

}  // namespace synthgen
