// Copyright 2026 The synthgen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <type_traits>
#include <utility>

#include <nlohmann/json.hpp>

#include "synthgen/error.hpp"
#include "synthgen/math.hpp"

namespace synthgen {

using Json = nlohmann::json;

SYNTHGEN_DEFINE_ERROR(SettingsError, Error);

/// Immutable view over a recursive key/value tree (scalars, lists, nested
/// trees). Lookups of absent keys without a fallback throw SettingsError
/// naming the full key path.
class SettingsTree {
 public:
  SettingsTree() : value_(Json::object()) {}
  explicit SettingsTree(Json value, std::string path = {})
      : value_(std::move(value)), path_(std::move(path)) {}

  const Json& json() const { return value_; }
  const std::string& path() const { return path_; }
  bool empty() const { return value_.is_null() || (value_.is_object() && value_.empty()); }
  bool contains(std::string_view key) const {
    return value_.is_object() && value_.contains(std::string(key));
  }

  template <typename T>
  T get(std::string_view key) const {
    return convert<T>(at(key), child_path(key));
  }

  template <typename T>
  T get_or(std::string_view key, T fallback) const {
    if (!contains(key)) return fallback;
    return get<T>(key);
  }

  SettingsTree subtree(std::string_view key) const {
    return SettingsTree(at(key), child_path(key));
  }
  std::optional<SettingsTree> find(std::string_view key) const {
    if (!contains(key)) return std::nullopt;
    return subtree(key);
  }

  // Converts the whole tree to T (used for list-valued settings).
  template <typename T>
  T as() const {
    return convert<T>(value_, path_);
  }

  friend bool operator==(const SettingsTree& a, const SettingsTree& b) {
    return a.value_ == b.value_;
  }

 private:
  const Json& at(std::string_view key) const {
    if (!contains(key)) throw SettingsError("missing setting '" + child_path(key) + "'");
    return value_.at(std::string(key));
  }

  std::string child_path(std::string_view key) const {
    return path_.empty() ? std::string(key) : path_ + "." + std::string(key);
  }

  template <typename T>
  static T convert(const Json& v, const std::string& where) {
    if constexpr (std::is_same_v<T, Vec3>) {
      if (!v.is_array() || v.size() != 3)
        throw SettingsError("setting '" + where + "' must be a list of 3 numbers");
      Vec3 out;
      for (int i = 0; i < 3; ++i) out[i] = convert<double>(v[static_cast<std::size_t>(i)], where);
      return out;
    } else if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) throw SettingsError("setting '" + where + "' must be a boolean");
      return v.get<bool>();
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer()) throw SettingsError("setting '" + where + "' must be an integer");
      return v.get<T>();
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!v.is_number()) throw SettingsError("setting '" + where + "' must be a number");
      return v.get<T>();
    } else {
      try {
        return v.get<T>();
      } catch (const Json::exception& e) {
        throw SettingsError("setting '" + where + "' has the wrong type: " + e.what());
      }
    }
  }

  Json value_;
  std::string path_;
};

}  // namespace synthgen
