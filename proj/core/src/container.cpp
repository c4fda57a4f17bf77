// Copyright 2026 The synthgen Authors
// SPDX-License-Identifier: Apache-2.0

#include "synthgen/container.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

namespace synthgen {

namespace {

constexpr char kMagic[4] = {'B', 'P', 'C', '1'};

void put_le(std::vector<std::byte>& out, std::uint64_t value, int bytes) {
  for (int i = 0; i < bytes; ++i) out.push_back(static_cast<std::byte>((value >> (8 * i)) & 0xffu));
}

std::uint64_t get_le(std::span<const std::byte> in, std::size_t offset, int bytes) {
  std::uint64_t v = 0;
  for (int i = 0; i < bytes; ++i) v |= static_cast<std::uint64_t>(in[offset + static_cast<std::size_t>(i)]) << (8 * i);
  return v;
}

template <typename T, typename Bits>
std::vector<std::byte> pack(std::span<const T> values) {
  std::vector<std::byte> out;
  out.reserve(values.size() * sizeof(T));
  for (const T& v : values) put_le(out, std::bit_cast<Bits>(v), sizeof(T));
  return out;
}

template <typename T, typename Bits>
std::vector<T> unpack(const ContainerEntry& entry, Dtype expected) {
  if (entry.dtype != expected) throw BadDtypeError("entry '" + entry.key + "' has a different dtype");
  std::vector<T> out(entry.payload.size() / sizeof(T));
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = std::bit_cast<T>(static_cast<Bits>(get_le(entry.payload, i * sizeof(T), sizeof(T))));
  return out;
}

std::uint64_t expected_payload(const ContainerEntry& e) {
  if (e.dtype == Dtype::utf8_json) return e.shape.size() == 1 ? e.shape[0] : ~0ull;
  std::uint64_t n = 1;
  for (auto d : e.shape) n *= d;
  return n * dtype_size(e.dtype);
}

bool valid_dtype(std::uint8_t code) { return code <= static_cast<std::uint8_t>(Dtype::utf8_json); }

}  // namespace

std::size_t dtype_size(Dtype dtype) {
  switch (dtype) {
    case Dtype::u8:
    case Dtype::utf8_json:
      return 1;
    case Dtype::i32:
    case Dtype::f32:
      return 4;
    case Dtype::f64:
      return 8;
  }
  throw BadDtypeError("unknown dtype");
}

const ContainerEntry* ContainerFile::find(std::string_view key) const {
  auto it = std::ranges::find(entries, key, &ContainerEntry::key);
  return it == entries.end() ? nullptr : &*it;
}

ContainerEntry make_f32_entry(std::string key, std::vector<std::uint64_t> shape, std::span<const float> values) {
  return {std::move(key), Dtype::f32, std::move(shape), pack<float, std::uint32_t>(values)};
}

ContainerEntry make_i32_entry(std::string key, std::vector<std::uint64_t> shape, std::span<const std::int32_t> values) {
  return {std::move(key), Dtype::i32, std::move(shape), pack<std::int32_t, std::uint32_t>(values)};
}

ContainerEntry make_json_entry(std::string key, const std::string& json_text) {
  ContainerEntry e{std::move(key), Dtype::utf8_json, {json_text.size()}, {}};
  e.payload.resize(json_text.size());
  std::memcpy(e.payload.data(), json_text.data(), json_text.size());
  return e;
}

std::vector<float> decode_f32(const ContainerEntry& entry) { return unpack<float, std::uint32_t>(entry, Dtype::f32); }
std::vector<std::int32_t> decode_i32(const ContainerEntry& entry) {
  return unpack<std::int32_t, std::uint32_t>(entry, Dtype::i32);
}
std::string decode_text(const ContainerEntry& entry) {
  if (entry.dtype != Dtype::utf8_json) throw BadDtypeError("entry '" + entry.key + "' is not utf8-json");
  return {reinterpret_cast<const char*>(entry.payload.data()), entry.payload.size()};
}

std::vector<std::byte> encode_container(const ContainerFile& file) {
  std::set<std::string_view> seen;
  std::vector<std::byte> out;
  for (char c : kMagic) out.push_back(static_cast<std::byte>(c));
  if (file.entries.size() > 0xffffffffull) throw ContainerError("too many entries");
  put_le(out, file.entries.size(), 4);
  for (const auto& e : file.entries) {
    if (!seen.insert(e.key).second) throw DuplicateKeyError("duplicate container key '" + e.key + "'");
    if (e.key.size() > 0xffff) throw ContainerError("key too long: '" + e.key.substr(0, 32) + "...'");
    if (e.shape.size() > 0xff) throw ContainerError("too many dimensions for '" + e.key + "'");
    if (expected_payload(e) != e.payload.size())
      throw ContainerError("payload of '" + e.key + "' does not match its shape");
    put_le(out, e.key.size(), 2);
    for (char c : e.key) out.push_back(static_cast<std::byte>(c));
    out.push_back(static_cast<std::byte>(e.dtype));
    out.push_back(static_cast<std::byte>(e.shape.size()));
    for (auto d : e.shape) put_le(out, d, 8);
    put_le(out, e.payload.size(), 8);
    out.insert(out.end(), e.payload.begin(), e.payload.end());
  }
  return out;
}

ContainerFile decode_container(std::span<const std::byte> bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0) throw BadMagicError("not a BPC1 container");
  std::size_t offset = 4;
  auto need = [&](std::size_t n) {
    if (bytes.size() - offset < n) throw TruncatedError(offset, n - (bytes.size() - offset));
  };
  auto read = [&](int n) {
    need(static_cast<std::size_t>(n));
    const auto v = get_le(bytes, offset, n);
    offset += static_cast<std::size_t>(n);
    return v;
  };

  ContainerFile file;
  const auto count = read(4);
  std::set<std::string> seen;
  for (std::uint64_t i = 0; i < count; ++i) {
    ContainerEntry e;
    const auto key_len = static_cast<std::size_t>(read(2));
    need(key_len);
    e.key.assign(reinterpret_cast<const char*>(bytes.data() + offset), key_len);
    offset += key_len;
    if (!seen.insert(e.key).second) throw DuplicateKeyError("duplicate container key '" + e.key + "'");
    const auto code = static_cast<std::uint8_t>(read(1));
    if (!valid_dtype(code)) throw BadDtypeError("entry '" + e.key + "' has unknown dtype " + std::to_string(code));
    e.dtype = static_cast<Dtype>(code);
    const auto ndim = read(1);
    for (std::uint64_t d = 0; d < ndim; ++d) e.shape.push_back(read(8));
    const auto length = read(8);
    if (length != expected_payload(e))
      throw ContainerError("payload length of '" + e.key + "' does not match its shape");
    need(static_cast<std::size_t>(length));
    e.payload.assign(bytes.begin() + static_cast<std::ptrdiff_t>(offset),
                     bytes.begin() + static_cast<std::ptrdiff_t>(offset + length));
    offset += static_cast<std::size_t>(length);
    file.entries.push_back(std::move(e));
  }
  if (offset != bytes.size()) throw ContainerError("trailing bytes after the last entry");
  return file;
}

ContainerFile read_container(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::vector<char> raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_container(std::as_bytes(std::span(raw)));
}

std::string container_key(const FrameBuffer& frame) {
  switch (frame.eye) {
    case Eye::left:
      return frame.key + "_L";
    case Eye::right:
      return frame.key + "_R";
    case Eye::mono:
      break;
  }
  return frame.key;
}

ContainerFile container_from_frames(std::span<const FrameBuffer> frames) {
  ContainerFile file;
  for (const auto& f : frames) {
    if (f.keyframe != frames.front().keyframe)
      throw ContainerError("frames of different keyframes cannot share a container");
    std::vector<std::uint64_t> shape{f.height, f.width};
    if (f.channels > 1) shape.push_back(f.channels);
    const std::string key = container_key(f);
    if (f.pass == Pass::segmap) {
      file.entries.push_back(make_i32_entry(key, shape, f.i32()));
      if (!f.instances.empty()) {
        nlohmann::json table = nlohmann::json::array();
        for (const auto& inst : f.instances)
          table.push_back({{"id", inst.id}, {"name", inst.name}, {"category_id", inst.category_id}});
        const std::string suffix = key.substr(f.key.size());
        file.entries.push_back(make_json_entry(f.key + "_mapping" + suffix, table.dump()));
      }
    } else {
      file.entries.push_back(make_f32_entry(key, shape, f.f32()));
    }
  }
  return file;
}

std::filesystem::path container_path(const std::filesystem::path& dir, std::uint32_t keyframe) {
  return dir / (std::to_string(keyframe) + ".bpc");
}

void StagedContainer::commit() const {
  std::error_code ec;
  std::filesystem::rename(temp_, final_, ec);
  if (ec) throw IoError("cannot move '" + temp_.string() + "' into place: " + ec.message());
}

void StagedContainer::discard() const noexcept {
  std::error_code ec;
  std::filesystem::remove(temp_, ec);
}

StagedContainer stage_container(std::uint32_t keyframe, std::span<const FrameBuffer> frames,
                                const std::filesystem::path& out_dir) {
  for (const auto& f : frames)
    if (f.keyframe != keyframe) throw ContainerError("frame of keyframe " + std::to_string(f.keyframe) +
                                                     " passed for keyframe " + std::to_string(keyframe));
  const auto bytes = encode_container(container_from_frames(frames));

  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create '" + out_dir.string() + "': " + ec.message());
  const auto final_path = container_path(out_dir, keyframe);
  auto temp = final_path;
  temp += ".tmp";
  StagedContainer staged(temp, final_path);
  {
    std::ofstream out(temp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + temp.string() + "'");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) {
      staged.discard();
      throw IoError("short write to '" + temp.string() + "'");
    }
  }
  return staged;
}

std::filesystem::path write_container(std::span<const FrameBuffer> frames, const std::filesystem::path& out_dir) {
  if (frames.empty()) throw ContainerError("no frames to write");
  const auto staged = stage_container(frames.front().keyframe, frames, out_dir);
  staged.commit();
  return staged.final_path();
}

}  // namespace synthgen
