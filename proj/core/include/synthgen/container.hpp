// Copyright 2026 The synthgen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "synthgen/error.hpp"
#include "synthgen/render.hpp"

namespace synthgen {

// BPC1 container layout (all integers little-endian):
//
//   "BPC1"                     4-byte magic
//   u32 entry_count
//   entry_count times:
//     u16 key_length, key bytes (UTF-8)
//     u8  dtype               0=u8 1=i32 2=f32 3=f64 4=utf8-json
//     u8  ndim, ndim x u64 dims
//     u64 payload_length, payload bytes (row-major, little-endian)
//
// payload_length == product(dims) * sizeof(dtype); utf8-json entries have
// dims == [byte length].

SYNTHGEN_DEFINE_ERROR(ContainerError, Error);
SYNTHGEN_DEFINE_ERROR(IoError, ContainerError);
SYNTHGEN_DEFINE_ERROR(DuplicateKeyError, ContainerError);
SYNTHGEN_DEFINE_ERROR(BadMagicError, ContainerError);
SYNTHGEN_DEFINE_ERROR(BadDtypeError, ContainerError);

class TruncatedError : public ContainerError {
 public:
  TruncatedError(std::size_t offset, std::size_t needed)
      : ContainerError("container truncated at offset " + std::to_string(offset) + " (needed " +
                       std::to_string(needed) + " more byte(s))"),
        offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

enum class Dtype : std::uint8_t { u8 = 0, i32 = 1, f32 = 2, f64 = 3, utf8_json = 4 };

std::size_t dtype_size(Dtype dtype);

struct ContainerEntry {
  std::string key;
  Dtype dtype = Dtype::u8;
  std::vector<std::uint64_t> shape;
  std::vector<std::byte> payload;

  friend bool operator==(const ContainerEntry&, const ContainerEntry&) = default;
};

struct ContainerFile {
  std::vector<ContainerEntry> entries;

  const ContainerEntry* find(std::string_view key) const;
  friend bool operator==(const ContainerFile&, const ContainerFile&) = default;
};

ContainerEntry make_f32_entry(std::string key, std::vector<std::uint64_t> shape, std::span<const float> values);
ContainerEntry make_i32_entry(std::string key, std::vector<std::uint64_t> shape, std::span<const std::int32_t> values);
ContainerEntry make_json_entry(std::string key, const std::string& json_text);

std::vector<float> decode_f32(const ContainerEntry& entry);
std::vector<std::int32_t> decode_i32(const ContainerEntry& entry);
std::string decode_text(const ContainerEntry& entry);

/// Serializes to BPC1 bytes. Throws DuplicateKeyError or ContainerError on
/// an invalid entry list.
std::vector<std::byte> encode_container(const ContainerFile& file);
/// Parses BPC1 bytes, validating magic, counts and payload lengths.
ContainerFile decode_container(std::span<const std::byte> bytes);

ContainerFile read_container(const std::filesystem::path& path);

/// Output key of a frame: its pass key plus "_L"/"_R" for stereo eyes.
std::string container_key(const FrameBuffer& frame);

/// Assembles the entries for one keyframe: "colors", the depth key,
/// "normals", "segmap" and "segmap_mapping" (instance maps only).
ContainerFile container_from_frames(std::span<const FrameBuffer> frames);

/// Path of the container for a keyframe: `{index}.bpc` in `dir`.
std::filesystem::path container_path(const std::filesystem::path& dir, std::uint32_t keyframe);

/// A container written to `{index}.bpc.tmp` but not yet renamed into place.
class StagedContainer {
 public:
  StagedContainer(std::filesystem::path temp, std::filesystem::path final_path)
      : temp_(std::move(temp)), final_(std::move(final_path)) {}

  const std::filesystem::path& temp_path() const { return temp_; }
  const std::filesystem::path& final_path() const { return final_; }
  void commit() const;
  void discard() const noexcept;

 private:
  std::filesystem::path temp_;
  std::filesystem::path final_;
};

StagedContainer stage_container(std::uint32_t keyframe, std::span<const FrameBuffer> frames,
                                const std::filesystem::path& out_dir);

/// Writes the container for one keyframe atomically (temp file + rename)
/// and returns its path. All frames must share a keyframe index.
std::filesystem::path write_container(std::span<const FrameBuffer> frames, const std::filesystem::path& out_dir);

}  // namespace synthgen
