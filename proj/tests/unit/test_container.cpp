// Copyright 2026 The synthgen Authors
// SPDX-License-Identifier: Apache-2.0

#include <cstring>
#include <fstream>
#include <random>

#include <gtest/gtest.h>

#include "support/test_support.hpp"
#include "synthgen/container.hpp"

namespace sg = synthgen;
namespace st = synthgen::testing;

namespace {

sg::ContainerEntry random_entry(std::mt19937_64& gen, std::size_t index) {
  sg::ContainerEntry e;
  e.key = "entry_" + std::to_string(index);
  e.dtype = static_cast<sg::Dtype>(gen() % 5);
  if (e.dtype == sg::Dtype::utf8_json) {
    const std::string text = R"({"i":)" + std::to_string(gen() % 1000) + "}";
    return sg::make_json_entry(e.key, text);
  }
  const std::size_t ndim = gen() % 4;
  std::uint64_t count = 1;
  for (std::size_t d = 0; d < ndim; ++d) {
    e.shape.push_back(gen() % 6);
    count *= e.shape.back();
  }
  e.payload.resize(count * sg::dtype_size(e.dtype));
  for (auto& b : e.payload) b = static_cast<std::byte>(gen());
  return e;
}

sg::FrameBuffer float_frame(sg::Pass pass, std::string key, std::uint32_t channels, sg::Eye eye = sg::Eye::mono) {
  sg::FrameBuffer f;
  f.pass = pass;
  f.key = std::move(key);
  f.width = 3;
  f.height = 2;
  f.channels = channels;
  f.eye = eye;
  std::vector<float> v(6 * channels);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = 0.25f * static_cast<float>(i);
  f.data = std::move(v);
  return f;
}

sg::FrameBuffer segmap_frame(bool with_instances, sg::Eye eye = sg::Eye::mono) {
  sg::FrameBuffer f;
  f.pass = sg::Pass::segmap;
  f.key = "segmap";
  f.width = 3;
  f.height = 2;
  f.channels = 1;
  f.eye = eye;
  f.data = std::vector<std::int32_t>{0, 1, 2, 2, 1, 0};
  if (with_instances) f.instances = {{1, "a", 3}, {2, "b", 4}};
  return f;
}

}  // namespace

TEST(Container, RandomRoundTrip) {
  std::mt19937_64 gen(41);
  for (int trial = 0; trial < 200; ++trial) {
    sg::ContainerFile file;
    const std::size_t n = gen() % 6;
    for (std::size_t i = 0; i < n; ++i) file.entries.push_back(random_entry(gen, i));
    const auto bytes = sg::encode_container(file);
    EXPECT_EQ(sg::decode_container(bytes), file);
  }
}

TEST(Container, ByteLayoutIsLittleEndian) {
  sg::ContainerFile file;
  const std::int32_t v[] = {0x01020304};
  file.entries.push_back(sg::make_i32_entry("k", {1}, v));
  const auto bytes = sg::encode_container(file);
  const unsigned char expected[] = {'B', 'P', 'C', '1', 1, 0, 0, 0, 1, 0, 'k', 1, 1, 1, 0, 0, 0, 0, 0, 0, 0,
                                    4, 0, 0, 0, 0, 0, 0, 0, 4, 3, 2, 1};
  ASSERT_EQ(bytes.size(), sizeof(expected));
  EXPECT_EQ(std::memcmp(bytes.data(), expected, sizeof(expected)), 0);
}

TEST(Container, EmptyInputIsBadMagic) {
  EXPECT_THROW(sg::decode_container({}), sg::BadMagicError);
  const std::byte wrong[] = {std::byte{'B'}, std::byte{'P'}, std::byte{'C'}, std::byte{'2'}, std::byte{0},
                             std::byte{0},   std::byte{0},   std::byte{0}};
  EXPECT_THROW(sg::decode_container(wrong), sg::BadMagicError);
}

TEST(Container, EveryTruncationIsRejected) {
  sg::ContainerFile file;
  const float f[] = {1.0f, 2.0f, 3.0f, 4.0f};
  file.entries.push_back(sg::make_f32_entry("colors", {2, 2}, f));
  file.entries.push_back(sg::make_json_entry("meta", R"({"a":1})"));
  const auto bytes = sg::encode_container(file);
  for (std::size_t len = 4; len < bytes.size(); ++len) {
    EXPECT_THROW(sg::decode_container(std::span(bytes).first(len)), sg::TruncatedError) << "length " << len;
  }
  for (std::size_t len = 0; len < 4; ++len) {
    EXPECT_THROW(sg::decode_container(std::span(bytes).first(len)), sg::ContainerError);
  }
}

TEST(Container, UnknownDtypeIsRejected) {
  sg::ContainerFile file;
  const float f[] = {1.0f};
  file.entries.push_back(sg::make_f32_entry("abc", {1}, f));
  auto bytes = sg::encode_container(file);
  // magic(4) + count(4) + key_length(2) + key(3) -> dtype byte.
  bytes[13] = std::byte{9};
  EXPECT_THROW(sg::decode_container(bytes), sg::BadDtypeError);
}

TEST(Container, PayloadLengthMustMatchShape) {
  sg::ContainerFile file;
  sg::ContainerEntry e;
  e.key = "bad";
  e.dtype = sg::Dtype::f32;
  e.shape = {3};
  e.payload.resize(8);
  file.entries.push_back(e);
  EXPECT_THROW(sg::encode_container(file), sg::ContainerError);
}

TEST(Container, DuplicateKeysAreRejected) {
  sg::ContainerFile file;
  const float f[] = {1.0f};
  file.entries.push_back(sg::make_f32_entry("x", {1}, f));
  file.entries.push_back(sg::make_f32_entry("x", {1}, f));
  EXPECT_THROW(sg::encode_container(file), sg::DuplicateKeyError);
}

TEST(Container, TrailingBytesAreRejected) {
  auto bytes = sg::encode_container({});
  bytes.push_back(std::byte{0});
  EXPECT_THROW(sg::decode_container(bytes), sg::ContainerError);
}

TEST(ContainerFromFrames, KeysShapesAndMapping) {
  std::vector<sg::FrameBuffer> frames;
  frames.push_back(float_frame(sg::Pass::colors, "colors", 3));
  frames.push_back(float_frame(sg::Pass::depth, "distance", 1));
  frames.push_back(float_frame(sg::Pass::normals, "normals", 3));
  frames.push_back(segmap_frame(true));
  const auto file = sg::container_from_frames(frames);
  std::vector<std::string> keys;
  for (const auto& e : file.entries) keys.push_back(e.key);
  EXPECT_EQ(keys, (std::vector<std::string>{"colors", "distance", "normals", "segmap", "segmap_mapping"}));
  EXPECT_EQ(file.find("colors")->shape, (std::vector<std::uint64_t>{2, 3, 3}));
  EXPECT_EQ(file.find("distance")->shape, (std::vector<std::uint64_t>{2, 3}));
  EXPECT_EQ(file.find("segmap")->dtype, sg::Dtype::i32);
  EXPECT_EQ(sg::decode_f32(*file.find("distance")), std::vector<float>(frames[1].f32().begin(), frames[1].f32().end()));
  const auto mapping = sg::Json::parse(sg::decode_text(*file.find("segmap_mapping")));
  ASSERT_EQ(mapping.size(), 2u);
  EXPECT_EQ(mapping[1]["name"], "b");
  EXPECT_EQ(mapping[1]["category_id"], 4);
}

TEST(ContainerFromFrames, StereoSuffixes) {
  std::vector<sg::FrameBuffer> frames;
  frames.push_back(float_frame(sg::Pass::colors, "colors", 3, sg::Eye::left));
  frames.push_back(float_frame(sg::Pass::colors, "colors", 3, sg::Eye::right));
  frames.push_back(segmap_frame(true, sg::Eye::left));
  frames.push_back(segmap_frame(true, sg::Eye::right));
  const auto file = sg::container_from_frames(frames);
  for (const char* key : {"colors_L", "colors_R", "segmap_L", "segmap_R", "segmap_mapping_L", "segmap_mapping_R"})
    EXPECT_NE(file.find(key), nullptr) << key;
  EXPECT_EQ(file.find("colors"), nullptr);
}

TEST(ContainerFromFrames, ClassMapsHaveNoMapping) {
  std::vector<sg::FrameBuffer> frames{segmap_frame(false)};
  const auto file = sg::container_from_frames(frames);
  EXPECT_EQ(file.find("segmap_mapping"), nullptr);
}

TEST(ContainerFile, WriteIsAtomicAndReadable) {
  st::TempDir dir;
  std::vector<sg::FrameBuffer> frames{float_frame(sg::Pass::colors, "colors", 3)};
  frames[0].keyframe = 7;
  const auto path = sg::write_container(frames, dir.path());
  EXPECT_EQ(path, dir / "7.bpc");
  EXPECT_EQ(st::count_files_with_extension(dir.path(), ".tmp"), 0u);
  EXPECT_EQ(sg::read_container(path), sg::container_from_frames(frames));
}

TEST(ContainerFile, StagedContainerCommitsOrDiscards) {
  st::TempDir dir;
  std::vector<sg::FrameBuffer> frames{float_frame(sg::Pass::colors, "colors", 3)};
  const auto kept = sg::stage_container(0, frames, dir.path());
  frames[0].keyframe = 1;
  const auto dropped = sg::stage_container(1, frames, dir.path());
  EXPECT_TRUE(std::filesystem::exists(kept.temp_path()));
  EXPECT_EQ(st::count_files_with_extension(dir.path(), ".bpc"), 0u);
  kept.commit();
  dropped.discard();
  EXPECT_TRUE(std::filesystem::exists(dir / "0.bpc"));
  EXPECT_FALSE(std::filesystem::exists(dropped.temp_path()));
  EXPECT_FALSE(std::filesystem::exists(dir / "1.bpc"));
}

TEST(ContainerFile, MissingFileIsIoError) {
  st::TempDir dir;
  EXPECT_THROW(sg::read_container(dir / "none.bpc"), sg::IoError);
}
