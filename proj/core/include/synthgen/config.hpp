// Copyright 2026 The synthgen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "synthgen/error.hpp"
#include "synthgen/settings.hpp"

namespace synthgen {

SYNTHGEN_DEFINE_ERROR(ConfigError, Error);
SYNTHGEN_DEFINE_ERROR(SchemaError, ConfigError);

class SyntaxError : public ConfigError {
 public:
  SyntaxError(const std::string& message, std::size_t line, std::size_t column);
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

class MissingArgError : public ConfigError {
 public:
  MissingArgError(std::string key_path, std::size_t index, std::size_t available);
  const std::string& key_path() const { return key_path_; }
  std::size_t index() const { return index_; }

 private:
  std::string key_path_;
  std::size_t index_;
};

// Installation keys of the original backend. Kept verbatim, never acted on.
struct SetupSection {
  std::string blender_install_path;
  std::string blender_version;
  std::vector<std::string> pip;
  Json raw = Json::object();

  friend bool operator==(const SetupSection&, const SetupSection&) = default;
};

struct ModuleEntry {
  std::string name;  // "<namespace>.<ModuleId>"
  SettingsTree config;

  friend bool operator==(const ModuleEntry&, const ModuleEntry&) = default;
};

struct ConfigDocument {
  SetupSection setup;
  std::map<std::string, SettingsTree> global_settings;
  std::vector<ModuleEntry> modules;

  friend bool operator==(const ConfigDocument&, const ConfigDocument&) = default;
};

/// Parses a strict-JSON run description with `setup`, `global` and `modules`
/// sections. Missing `setup`/`global` yield empty defaults; `modules` is required.
ConfigDocument parse_config(std::string_view text);

/// Reads and parses a config file.
ConfigDocument load_config(const std::string& path);

/// Serializes back to JSON text; parse_config(serialize_config(d)) == d.
std::string serialize_config(const ConfigDocument& doc);

/// Replaces every string scalar that is exactly `<args:N>` with args[N] in
/// all three sections.
ConfigDocument substitute_args(const ConfigDocument& doc, std::span<const std::string> args);

/// Key paths of any `<args:N>` placeholders still present.
std::vector<std::string> find_placeholders(const ConfigDocument& doc);

/// Module-local config deep-merged over the global "all" scope; local keys win.
SettingsTree resolve_module_config(const ConfigDocument& doc, const ModuleEntry& entry);

/// Deep merge of two JSON objects; `overlay` wins on scalar conflicts.
Json deep_merge(const Json& base, const Json& overlay);

}  // namespace synthgen
