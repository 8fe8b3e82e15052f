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

#include "lanefuse/config.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "lanefuse/error.hpp"

namespace lanefuse {

std::string trim(std::string_view text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = text.find_last_not_of(" \t\r\n");
  return std::string(text.substr(first, last - first + 1));
}

std::vector<std::string> split_list(std::string_view text, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto end = text.find(sep, start);
    const auto piece = trim(text.substr(start, end == std::string_view::npos ? end : end - start));
    if (!piece.empty()) out.push_back(piece);
    if (end == std::string_view::npos) break;
    start = end + 1;
  }
  return out;
}

KeyValueConfig KeyValueConfig::parse(std::string_view text, std::string source_name) {
  KeyValueConfig cfg;
  cfg.source_ = std::move(source_name);
  std::string section;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view raw = text.substr(pos, nl == std::string_view::npos ? nl : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;

    if (const auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
    const std::string line = trim(raw);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']' || line.size() < 3) {
        throw Error(ErrorCode::Parse, cfg.source_ + ":" + std::to_string(line_no) +
                                          ": malformed section header '" + line + "'");
      }
      section = trim(std::string_view(line).substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::Parse, cfg.source_ + ":" + std::to_string(line_no) +
                                        ": expected 'key = value', got '" + line + "'");
    }
    const std::string key = trim(std::string_view(line).substr(0, eq));
    if (key.empty()) {
      throw Error(ErrorCode::Parse,
                  cfg.source_ + ":" + std::to_string(line_no) + ": empty key");
    }
    const std::string full = section.empty() ? key : section + "." + key;
    cfg.entries_[full] = Entry{trim(std::string_view(line).substr(eq + 1)), line_no};
  }
  return cfg;
}

KeyValueConfig KeyValueConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path.string());
}

std::optional<std::string> KeyValueConfig::get(const std::string& key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second.value;
}

std::string KeyValueConfig::get_or(const std::string& key, const std::string& fallback) const {
  return get(key).value_or(fallback);
}

void KeyValueConfig::fail(const std::string& key, const std::string& message) const {
  const auto it = entries_.find(key);
  std::string where = source_;
  if (it != entries_.end() && it->second.line > 0) where += ":" + std::to_string(it->second.line);
  throw Error(ErrorCode::Config, where + ": " + key + ": " + message);
}

double KeyValueConfig::get_double(const std::string& key, double fallback) const {
  const auto v = get(key);
  if (!v || v->empty()) return fallback;
  std::size_t used = 0;
  double out = 0.0;
  try {
    out = std::stod(*v, &used);
  } catch (const std::exception&) {
    fail(key, "expected a number, got '" + *v + "'");
  }
  if (used != v->size()) fail(key, "expected a number, got '" + *v + "'");
  return out;
}

long KeyValueConfig::get_int(const std::string& key, long fallback) const {
  return get_optional_int(key).value_or(fallback);
}

std::optional<long> KeyValueConfig::get_optional_int(const std::string& key) const {
  const auto v = get(key);
  if (!v || v->empty() || *v == "none") return std::nullopt;
  long out = 0;
  const auto [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
  if (ec != std::errc() || ptr != v->data() + v->size()) {
    fail(key, "expected an integer, got '" + *v + "'");
  }
  return out;
}

std::vector<std::string> KeyValueConfig::keys_with_prefix(std::string_view prefix) const {
  std::vector<std::string> out;
  for (const auto& [k, _] : entries_) {
    if (k.starts_with(prefix)) out.push_back(k);
  }
  return out;
}

std::vector<std::string> KeyValueConfig::subsections(std::string_view prefix) const {
  std::set<std::string> names;
  for (const auto& [k, _] : entries_) {
    if (!k.starts_with(prefix)) continue;
    const auto rest = std::string_view(k).substr(prefix.size());
    // Section names may themselves contain dots only before the final key.
    const auto dot = rest.rfind('.');
    if (dot != std::string_view::npos) names.insert(std::string(rest.substr(0, dot)));
  }
  return {names.begin(), names.end()};
}

}  // namespace lanefuse
