// Copyright 2026 The synthgen Authors
// SPDX-License-Identifier: Apache-2.0

#include "synthgen/loader.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <unordered_map>

#include <spdlog/spdlog.h>

namespace synthgen {

ParseError::ParseError(const std::string& file, std::size_t line, const std::string& token,
                       const std::string& what)
    : LoaderError(file + ":" + std::to_string(line) + ": " + what + " near '" + token + "'"),
      line_(line) {}

IndexError::IndexError(const std::string& file, std::size_t line, long index, std::size_t count)
    : LoaderError(file + ":" + std::to_string(line) + ": index " + std::to_string(index) +
                  " out of range for " + std::to_string(count) + " element(s)"),
      line_(line) {}

LineError::LineError(const std::string& file, std::size_t line, const std::string& what)
    : LoaderError(file + ":" + std::to_string(line) + ": " + what), line_(line) {}

namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    const std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

template <typename T>
std::optional<T> parse_number(std::string_view s) {
  T value{};
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return value;
}

std::ifstream open_text(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FileNotFoundError("cannot open '" + path.string() + "'");
  return in;
}

// ---------------------------------------------------------------------------
// MTL

std::map<std::string, Material> parse_mtl(const std::filesystem::path& path) {
  std::map<std::string, Material> out;
  std::ifstream in = open_text(path);
  const std::string file = path.string();
  Material* current = nullptr;
  std::string line;
  for (std::size_t line_no = 1; std::getline(in, line); ++line_no) {
    const auto tokens = split_ws(line);
    if (tokens.empty() || tokens[0].starts_with('#')) continue;
    const std::string_view key = tokens[0];
    if (key == "newmtl") {
      if (tokens.size() < 2) throw ParseError(file, line_no, line, "newmtl without a name");
      Material m;
      m.name = std::string(tokens[1]);
      current = &(out[m.name] = m);
      continue;
    }
    auto read_rgb = [&]() {
      if (!current) throw ParseError(file, line_no, std::string(key), "property before newmtl");
      if (tokens.size() < 2) throw ParseError(file, line_no, std::string(key), "missing color");
      Rgb c;
      // A single value sets all three channels.
      for (int i = 0; i < 3; ++i) {
        const auto tok = tokens[std::min<std::size_t>(static_cast<std::size_t>(i) + 1, tokens.size() - 1)];
        const auto v = parse_number<double>(tok);
        if (!v) throw ParseError(file, line_no, std::string(tok), "expected a number");
        c[i] = *v;
      }
      return c;
    };
    if (key == "Kd") {
      current->diffuse_albedo = read_rgb();
    } else if (key == "Ks") {
      current->specular_albedo = read_rgb();
    } else if (key == "Ke") {
      current->emission = read_rgb();
    } else if (key == "Ns") {
      if (!current) throw ParseError(file, line_no, "Ns", "property before newmtl");
      const auto v = tokens.size() > 1 ? parse_number<double>(tokens[1]) : std::nullopt;
      if (!v || *v < 0.0) throw ParseError(file, line_no, line, "expected a non-negative exponent");
      current->shininess = *v;
    }
  }
  for (auto& [name, m] : out) {
    m.diffuse_albedo = max(min(m.diffuse_albedo, {1, 1, 1}), {0, 0, 0});
    m.specular_albedo = max(min(m.specular_albedo, {1, 1, 1}), {0, 0, 0});
    m.emission = max(m.emission, {0, 0, 0});
    if (enforce_energy_conservation(m))
      spdlog::warn("material '{}' reflects more than it receives; albedos rescaled", name);
  }
  return out;
}

// ---------------------------------------------------------------------------
// OBJ

struct Corner {
  std::uint32_t position;
  std::optional<std::uint32_t> normal;
};

struct Group {
  std::string name;
  std::string material;
  bool material_set = false;
  std::vector<std::vector<Corner>> faces;
};

std::uint32_t resolve_index(std::string_view tok, std::size_t count, const std::string& file,
                            std::size_t line_no) {
  const auto raw = parse_number<long>(tok);
  if (!raw || *raw == 0) throw ParseError(file, line_no, std::string(tok), "invalid face index");
  const long resolved = *raw > 0 ? *raw - 1 : static_cast<long>(count) + *raw;
  if (resolved < 0 || static_cast<std::size_t>(resolved) >= count)
    throw IndexError(file, line_no, *raw, count);
  return static_cast<std::uint32_t>(resolved);
}

}  // namespace

std::vector<std::size_t> load_obj(const std::filesystem::path& path, const ObjLoadOptions& options,
                                  Scene& scene) {
  std::ifstream in = open_text(path);
  const std::string file = path.string();

  std::vector<Vec3> positions;
  std::vector<Vec3> normals;
  std::map<std::string, Material> library;
  std::vector<Group> groups(1);
  groups.back().name = path.stem().string();

  std::string line;
  for (std::size_t line_no = 1; std::getline(in, line); ++line_no) {
    const auto tokens = split_ws(line);
    if (tokens.empty() || tokens[0].starts_with('#')) continue;
    const std::string_view key = tokens[0];

    auto read_vec3 = [&]() {
      if (tokens.size() < 4) throw ParseError(file, line_no, std::string(key), "expected 3 components");
      Vec3 v;
      for (int i = 0; i < 3; ++i) {
        const auto tok = tokens[static_cast<std::size_t>(i) + 1];
        const auto d = parse_number<double>(tok);
        if (!d) throw ParseError(file, line_no, std::string(tok), "expected a number");
        v[i] = *d;
      }
      return v;
    };

    if (key == "v") {
      positions.push_back(read_vec3());
    } else if (key == "vn") {
      normals.push_back(read_vec3());
    } else if (key == "vt") {
      // Texture coordinates are not used.
    } else if (key == "f") {
      if (tokens.size() < 4) throw ParseError(file, line_no, line, "face needs at least 3 corners");
      std::vector<Corner> face;
      for (std::size_t i = 1; i < tokens.size(); ++i) {
        const std::string_view tok = tokens[i];
        const auto s1 = tok.find('/');
        Corner c{resolve_index(tok.substr(0, s1), positions.size(), file, line_no), std::nullopt};
        if (s1 != std::string_view::npos) {
          const auto s2 = tok.find('/', s1 + 1);
          if (s2 != std::string_view::npos && s2 + 1 < tok.size())
            c.normal = resolve_index(tok.substr(s2 + 1), normals.size(), file, line_no);
        }
        face.push_back(c);
      }
      groups.back().faces.push_back(std::move(face));
    } else if (key == "o" || key == "g") {
      Group g;
      g.name = tokens.size() > 1 ? std::string(tokens[1]) : groups.back().name;
      groups.push_back(std::move(g));
    } else if (key == "usemtl") {
      if (tokens.size() < 2) throw ParseError(file, line_no, line, "usemtl without a name");
      auto& g = groups.back();
      if (!g.material_set) {
        g.material = std::string(tokens[1]);
        g.material_set = true;
      }
    } else if (key == "mtllib") {
      for (std::size_t i = 1; i < tokens.size(); ++i) {
        const auto mtl_path = path.parent_path() / std::string(tokens[i]);
        try {
          library.merge(parse_mtl(mtl_path));
        } catch (const FileNotFoundError&) {
          spdlog::warn("{}:{}: material library '{}' not found; using default material", file, line_no,
                       mtl_path.string());
        }
      }
    }
  }

  std::map<std::string, std::uint32_t> material_ids;
  std::vector<std::size_t> added;
  for (const auto& g : groups) {
    if (g.faces.empty()) continue;
    TriangleMesh mesh;
    mesh.object_name = g.name;
    if (options.category_id) mesh.category_id = *options.category_id;

    if (g.material_set) {
      if (auto it = library.find(g.material); it != library.end()) {
        auto [slot, inserted] = material_ids.try_emplace(g.material, 0);
        if (inserted) slot->second = scene.add_material(it->second);
        mesh.material_id = slot->second;
      } else {
        spdlog::warn("{}: material '{}' not defined; using default material", file, g.material);
      }
    }

    const bool with_normals = std::ranges::all_of(g.faces, [](const auto& f) {
      return std::ranges::all_of(f, [](const Corner& c) { return c.normal.has_value(); });
    });
    // Vertices are numbered in order of first use.
    std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint32_t> remap;
    auto local = [&](const Corner& c) {
      const auto key = std::pair{c.position, with_normals ? *c.normal : 0u};
      auto [it, inserted] = remap.try_emplace(key, static_cast<std::uint32_t>(mesh.vertices.size()));
      if (inserted) {
        mesh.vertices.push_back(positions[c.position]);
        if (with_normals) mesh.normals.push_back(normalize(normals[*c.normal]));
      }
      return it->second;
    };
    for (const auto& face : g.faces) {
      const auto first = local(face[0]);
      auto prev = local(face[1]);
      for (std::size_t i = 2; i < face.size(); ++i) {
        const auto cur = local(face[i]);
        mesh.triangles.push_back({first, prev, cur});
        prev = cur;
      }
    }
    if (with_normals && std::ranges::any_of(mesh.normals, [](const Vec3& n) { return length(n) == 0.0; })) {
      spdlog::warn("{}: object '{}' has zero-length normals; using face normals", file, g.name);
      mesh.normals.clear();
    }
    scene.add_mesh(std::move(mesh));
    added.push_back(scene.meshes().size() - 1);
  }
  return added;
}

// ---------------------------------------------------------------------------
// Pose and light files

namespace {

// Parses a whitespace-separated token format. Index into `allowed` per
// column, or -1 for a skipped column.
std::vector<int> parse_format(std::string_view format, std::span<const std::string_view> allowed) {
  std::vector<int> columns;
  for (auto tok : split_ws(format)) {
    if (tok == "_") {
      columns.push_back(-1);
      continue;
    }
    auto it = std::ranges::find(allowed, tok);
    if (it == allowed.end()) throw FormatError("unknown format token '" + std::string(tok) + "'");
    columns.push_back(static_cast<int>(it - allowed.begin()));
  }
  if (columns.empty()) throw FormatError("empty file format");
  return columns;
}

// Calls `row(values)` for every data line; values indexed like `allowed`,
// unset entries keep `defaults`.
template <typename Row>
std::size_t read_rows(const std::filesystem::path& path, std::string_view format,
                      std::span<const std::string_view> allowed, std::span<const double> defaults,
                      const Row& row) {
  const auto columns = parse_format(format, allowed);
  std::ifstream in = open_text(path);
  const std::string file = path.string();
  std::size_t count = 0;
  std::string line;
  for (std::size_t line_no = 1; std::getline(in, line); ++line_no) {
    const auto body = trim(line);
    if (body.empty() || body.starts_with('#')) continue;
    const auto fields = split_ws(body);
    if (fields.size() != columns.size())
      throw LineError(file, line_no,
                      "expected " + std::to_string(columns.size()) + " fields, got " + std::to_string(fields.size()));
    std::vector<double> values(defaults.begin(), defaults.end());
    for (std::size_t i = 0; i < columns.size(); ++i) {
      if (columns[i] < 0) continue;
      const auto v = parse_number<double>(fields[i]);
      if (!v) throw LineError(file, line_no, "field '" + std::string(fields[i]) + "' is not a number");
      values[static_cast<std::size_t>(columns[i])] = *v;
    }
    row(values);
    ++count;
  }
  return count;
}

}  // namespace

std::size_t load_camera_poses(const std::filesystem::path& path, std::string_view format, Scene& scene) {
  static constexpr std::string_view kTokens[] = {"location_x", "location_y", "location_z",
                                                 "rotation_x", "rotation_y", "rotation_z"};
  static constexpr double kDefaults[] = {0, 0, 0, 0, 0, 0};
  return read_rows(path, format, kTokens, kDefaults, [&](const std::vector<double>& v) {
    scene.add_camera_keyframe({{v[0], v[1], v[2]}, {v[3], v[4], v[5]}});
  });
}

std::size_t load_lights(const std::filesystem::path& path, std::string_view format, Scene& scene) {
  static constexpr std::string_view kTokens[] = {"location_x",  "location_y",  "location_z",
                                                 "intensity_r", "intensity_g", "intensity_b"};
  static constexpr double kDefaults[] = {0, 0, 0, 1, 1, 1};
  return read_rows(path, format, kTokens, kDefaults, [&](const std::vector<double>& v) {
    const Rgb intensity{v[3], v[4], v[5]};
    if (!is_finite(intensity) || intensity.x < 0 || intensity.y < 0 || intensity.z < 0)
      throw LoaderError("light intensity must be finite and non-negative");
    scene.add_light({{v[0], v[1], v[2]}, intensity});
  });
}

}  // namespace synthgen
