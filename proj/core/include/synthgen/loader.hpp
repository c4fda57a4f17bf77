// Copyright 2026 The synthgen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "synthgen/error.hpp"
#include "synthgen/scene.hpp"

namespace synthgen {

SYNTHGEN_DEFINE_ERROR(LoaderError, Error);
SYNTHGEN_DEFINE_ERROR(FileNotFoundError, LoaderError);
SYNTHGEN_DEFINE_ERROR(FormatError, LoaderError);

// Malformed record in an OBJ/MTL file.
class ParseError : public LoaderError {
 public:
  ParseError(const std::string& file, std::size_t line, const std::string& token, const std::string& what);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Face index outside the vertex/normal arrays.
class IndexError : public LoaderError {
 public:
  IndexError(const std::string& file, std::size_t line, long index, std::size_t count);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Pose/light line whose field count does not match the format.
class LineError : public LoaderError {
 public:
  LineError(const std::string& file, std::size_t line, const std::string& what);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

struct ObjLoadOptions {
  std::optional<std::int32_t> category_id;  // applied to every loaded object
};

/// Loads a Wavefront OBJ (with optional MTL libraries) into the scene, one
/// mesh per `o`/`g` record; polygons are fan-triangulated from their first
/// corner. Returns the indices of the meshes added.
std::vector<std::size_t> load_obj(const std::filesystem::path& path, const ObjLoadOptions& options,
                                  Scene& scene);

/// Appends one camera keyframe per non-comment line. `format` is a
/// space-separated list of location_{x,y,z}, rotation_{x,y,z} and `_` (skip).
std::size_t load_camera_poses(const std::filesystem::path& path, std::string_view format, Scene& scene);

/// Appends one point light per line. `format` tokens: location_{x,y,z},
/// intensity_{r,g,b}, `_`.
std::size_t load_lights(const std::filesystem::path& path, std::string_view format, Scene& scene);

}  // namespace synthgen
