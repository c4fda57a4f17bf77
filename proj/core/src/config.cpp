// Copyright 2026 The synthgen Authors
// SPDX-License-Identifier: Apache-2.0

#include "synthgen/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <spdlog/spdlog.h>

namespace synthgen {

SyntaxError::SyntaxError(const std::string& message, std::size_t line, std::size_t column)
    : ConfigError("syntax error at line " + std::to_string(line) + ", column " +
                  std::to_string(column) + ": " + message),
      line_(line),
      column_(column) {}

MissingArgError::MissingArgError(std::string key_path, std::size_t index, std::size_t available)
    : ConfigError("'" + key_path + "' references <args:" + std::to_string(index) + "> but only " +
                  std::to_string(available) + " argument(s) were given"),
      key_path_(std::move(key_path)),
      index_(index) {}

namespace {

// Returns the 1-based line/column of a 1-based byte offset.
std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t byte) {
  std::size_t line = 1, column = 1;
  const std::size_t end = std::min(byte > 0 ? byte - 1 : 0, text.size());
  for (std::size_t i = 0; i < end; ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

std::string require_string(const Json& v, const std::string& where) {
  if (!v.is_string()) throw SchemaError("'" + where + "' must be a string");
  return v.get<std::string>();
}

SetupSection parse_setup(const Json& v) {
  if (!v.is_object()) throw SchemaError("'setup' must be an object");
  SetupSection s;
  s.raw = v;
  if (auto it = v.find("blender_install_path"); it != v.end())
    s.blender_install_path = require_string(*it, "setup.blender_install_path");
  if (auto it = v.find("blender_version"); it != v.end())
    s.blender_version = require_string(*it, "setup.blender_version");
  if (auto it = v.find("pip"); it != v.end()) {
    if (!it->is_array()) throw SchemaError("'setup.pip' must be a list of strings");
    for (const auto& p : *it) s.pip.push_back(require_string(p, "setup.pip[]"));
  }
  return s;
}

void validate_module_name(const std::string& name, std::size_t index) {
  const auto dot = name.find('.');
  const bool ok = dot != std::string::npos && dot > 0 && dot + 1 < name.size() &&
                  name.find('.', dot + 1) == std::string::npos;
  if (!ok)
    throw SchemaError("modules[" + std::to_string(index) + "].name '" + name +
                      "' must be of the form <namespace>.<Module>");
}

std::optional<std::size_t> placeholder_index(const std::string& s) {
  constexpr std::string_view prefix = "<args:";
  if (s.size() <= prefix.size() + 1 || !s.starts_with(prefix) || s.back() != '>') return std::nullopt;
  const char* first = s.data() + prefix.size();
  const char* last = s.data() + s.size() - 1;
  std::size_t index = 0;
  auto [ptr, ec] = std::from_chars(first, last, index);
  if (ec != std::errc{} || ptr != last) return std::nullopt;
  return index;
}

template <typename Visit>
void walk(Json& v, const std::string& path, const Visit& visit) {
  if (v.is_object()) {
    for (auto& [key, child] : v.items()) walk(child, path.empty() ? key : path + "." + key, visit);
  } else if (v.is_array()) {
    for (std::size_t i = 0; i < v.size(); ++i) walk(v[i], path + "[" + std::to_string(i) + "]", visit);
  } else if (v.is_string()) {
    visit(v, path);
  }
}

// Applies `fn(json&, path)` to every string scalar in the document.
template <typename Visit>
ConfigDocument map_strings(const ConfigDocument& doc, const Visit& visit) {
  ConfigDocument out = doc;
  Json raw = out.setup.raw;
  walk(raw, "setup", visit);
  out.setup = parse_setup(raw);
  for (auto& [scope, tree] : out.global_settings) {
    Json j = tree.json();
    walk(j, "global." + scope, visit);
    tree = SettingsTree(std::move(j), tree.path());
  }
  for (std::size_t i = 0; i < out.modules.size(); ++i) {
    Json j = out.modules[i].config.json();
    walk(j, "modules[" + std::to_string(i) + "].config", visit);
    out.modules[i].config = SettingsTree(std::move(j), out.modules[i].config.path());
  }
  return out;
}

}  // namespace

ConfigDocument parse_config(std::string_view text) {
  Json root;
  try {
    root = Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    const auto [line, column] = line_column(text, e.byte);
    throw SyntaxError(e.what(), line, column);
  }
  if (!root.is_object()) throw SchemaError("config root must be an object");

  ConfigDocument doc;
  if (auto it = root.find("setup"); it != root.end()) {
    doc.setup = parse_setup(*it);
    if (!it->empty())
      spdlog::warn("config 'setup' section is retained but inert: the rendering backend is built in");
  }
  if (auto it = root.find("global"); it != root.end()) {
    if (!it->is_object()) throw SchemaError("'global' must be an object");
    for (const auto& [scope, value] : it->items()) {
      if (!value.is_object()) throw SchemaError("'global." + scope + "' must be an object");
      if (scope != "all") spdlog::warn("global scope '{}' is ignored; only 'all' is honored", scope);
      doc.global_settings.emplace(scope, SettingsTree(value, "global." + scope));
    }
  }
  auto modules = root.find("modules");
  if (modules == root.end()) throw SchemaError("config is missing the 'modules' section");
  if (!modules->is_array()) throw SchemaError("'modules' must be a list");
  for (std::size_t i = 0; i < modules->size(); ++i) {
    const Json& m = (*modules)[i];
    const std::string where = "modules[" + std::to_string(i) + "]";
    if (!m.is_object()) throw SchemaError("'" + where + "' must be an object");
    auto name = m.find("name");
    if (name == m.end()) throw SchemaError("'" + where + "' has no 'name'");
    ModuleEntry entry;
    entry.name = require_string(*name, where + ".name");
    validate_module_name(entry.name, i);
    if (auto cfg = m.find("config"); cfg != m.end()) {
      if (!cfg->is_object()) throw SchemaError("'" + where + ".config' must be an object");
      entry.config = SettingsTree(*cfg, entry.name);
    } else {
      entry.config = SettingsTree(Json::object(), entry.name);
    }
    doc.modules.push_back(std::move(entry));
  }
  return doc;
}

ConfigDocument load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const ConfigDocument& doc) {
  Json root = Json::object();
  root["setup"] = doc.setup.raw;
  Json global = Json::object();
  for (const auto& [scope, tree] : doc.global_settings) global[scope] = tree.json();
  root["global"] = std::move(global);
  Json modules = Json::array();
  for (const auto& m : doc.modules) {
    Json entry = {{"name", m.name}};
    if (!m.config.json().empty()) entry["config"] = m.config.json();
    modules.push_back(std::move(entry));
  }
  root["modules"] = std::move(modules);
  return root.dump(2);
}

ConfigDocument substitute_args(const ConfigDocument& doc, std::span<const std::string> args) {
  return map_strings(doc, [&](Json& v, const std::string& path) {
    const auto index = placeholder_index(v.get_ref<const std::string&>());
    if (!index) return;
    if (*index >= args.size()) throw MissingArgError(path, *index, args.size());
    v = args[*index];
  });
}

std::vector<std::string> find_placeholders(const ConfigDocument& doc) {
  std::vector<std::string> found;
  map_strings(doc, [&](Json& v, const std::string& path) {
    if (placeholder_index(v.get_ref<const std::string&>())) found.push_back(path);
  });
  return found;
}

Json deep_merge(const Json& base, const Json& overlay) {
  if (!base.is_object() || !overlay.is_object()) return overlay;
  Json out = base;
  for (const auto& [key, value] : overlay.items()) {
    auto it = out.find(key);
    out[key] = (it != out.end()) ? deep_merge(*it, value) : value;
  }
  return out;
}

SettingsTree resolve_module_config(const ConfigDocument& doc, const ModuleEntry& entry) {
  auto all = doc.global_settings.find("all");
  if (all == doc.global_settings.end()) return SettingsTree(entry.config.json(), entry.name);
  return SettingsTree(deep_merge(all->second.json(), entry.config.json()), entry.name);
}

}  // namespace synthgen
