/*
 * Copyright 2026 The lanefuse Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace lanefuse {

/// Flat key-value document read from an INI-style text file.
///
///   # comment
///   top_level_key = value
///   [section.name]
///   key = value          -> stored as "section.name.key"
///
/// Keys keep their source line so errors can point back at the file.
class KeyValueConfig {
 public:
  struct Entry {
    std::string value;
    int line = 0;
  };

  static KeyValueConfig parse(std::string_view text, std::string source_name = "<string>");
  static KeyValueConfig load(const std::filesystem::path& path);

  bool has(const std::string& key) const { return entries_.contains(key); }
  const std::string& source() const { return source_; }

  std::optional<std::string> get(const std::string& key) const;
  std::string get_or(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  long get_int(const std::string& key, long fallback) const;
  std::optional<long> get_optional_int(const std::string& key) const;

  /// Keys beginning with `prefix` (e.g. "weights.default.").
  std::vector<std::string> keys_with_prefix(std::string_view prefix) const;
  /// Distinct section names directly under `prefix` ("context." -> {"clear-day", ...}).
  std::vector<std::string> subsections(std::string_view prefix) const;

  void set(const std::string& key, std::string value) { entries_[key] = Entry{std::move(value), 0}; }

  [[noreturn]] void fail(const std::string& key, const std::string& message) const;

 private:
  std::map<std::string, Entry> entries_;
  std::string source_;
};

std::vector<std::string> split_list(std::string_view text, char sep = ',');
std::string trim(std::string_view text);

}  // namespace lanefuse
