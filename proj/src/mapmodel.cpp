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

#include "lanefuse/mapmodel.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "lanefuse/error.hpp"

namespace lanefuse {

using nlohmann::json;

namespace {

constexpr const char* kSchema = "lanefuse.link_area/1";

// Pretty printer that keeps leaf arrays (points, logits) on one line.
void write_json(std::ostringstream& out, const json& j, int depth) {
  const std::string pad(static_cast<std::size_t>(depth) * 2, ' ');
  const std::string inner(static_cast<std::size_t>(depth + 1) * 2, ' ');
  if (j.is_object()) {
    if (j.empty()) {
      out << "{}";
      return;
    }
    out << "{\n";
    bool first = true;
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (!first) out << ",\n";
      first = false;
      out << inner << json(it.key()).dump() << ": ";
      write_json(out, it.value(), depth + 1);
    }
    out << "\n" << pad << "}";
  } else if (j.is_array()) {
    bool leaf = true;
    for (const auto& e : j) {
      if (e.is_object() || (e.is_array() && !e.empty() && e.front().is_array())) leaf = false;
    }
    if (leaf || j.empty()) {
      out << j.dump();
      return;
    }
    out << "[\n";
    bool first = true;
    for (const auto& e : j) {
      if (!first) out << ",\n";
      first = false;
      out << inner;
      write_json(out, e, depth + 1);
    }
    out << "\n" << pad << "]";
  } else {
    out << j.dump();
  }
}

json lane_to_json(const LaneLine& lane) {
  json pts = json::array();
  for (const auto& p : lane.points) pts.push_back({p.x, p.y, p.z});
  json j = {{"lane_id", lane.lane_id}, {"points", std::move(pts)}};
  if (!lane.sources.empty()) j["sources"] = lane.sources;
  return j;
}

json image_to_json(const ImageAssessment& a) {
  json scores = json::object();
  for (FactorKind f : kDegradationFactors) scores[std::string(factor_name(f))] = a.score(f);
  json j = {
      {"image_id", a.image_id},
      {"timestamp", a.timestamp},
      {"factor_scores", std::move(scores)},
      {"lane_visibility", a.lane_visibility},
      {"lane_confidence", a.lane_confidence ? json(*a.lane_confidence) : json(nullptr)},
      {"confidence", a.confidence ? json(*a.confidence) : json(nullptr)},
  };
  if (!a.image_ref.empty()) j["image_ref"] = a.image_ref;
  return j;
}

// Typed field access that reports the JSON path on failure.
class Reader {
 public:
  explicit Reader(std::string source) : source_(std::move(source)) {}

  [[noreturn]] void fail(const std::string& path, const std::string& msg) const {
    throw Error(ErrorCode::Parse, source_ + ": " + path + ": " + msg);
  }

  const json& field(const json& obj, const std::string& key, const std::string& path) const {
    if (!obj.is_object()) fail(path, "expected an object");
    const auto it = obj.find(key);
    if (it == obj.end()) fail(path, "missing field '" + key + "'");
    return *it;
  }

  std::string string(const json& obj, const std::string& key, const std::string& path) const {
    const json& v = field(obj, key, path);
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_integer()) return std::to_string(v.get<long long>());
    fail(path + "." + key, "expected a string");
  }

  double number(const json& v, const std::string& path) const {
    if (!v.is_number()) fail(path, "expected a number");
    return v.get<double>();
  }

  int integer(const json& v, const std::string& path) const {
    if (!v.is_number_integer()) fail(path, "expected an integer");
    return v.get<int>();
  }

  LaneLine lane(const json& j, const std::string& path) const {
    LaneLine lane;
    lane.lane_id = string(j, "lane_id", path);
    const json& pts = field(j, "points", path);
    if (!pts.is_array()) fail(path + ".points", "expected an array");
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const std::string pp = path + ".points[" + std::to_string(i) + "]";
      const json& p = pts[i];
      if (!p.is_array() || (p.size() != 3 && p.size() != 2)) fail(pp, "expected [x, y, z]");
      lane.points.push_back({number(p[0], pp), number(p[1], pp), p.size() == 3 ? number(p[2], pp) : 0.0});
    }
    if (const auto it = j.find("sources"); it != j.end() && !it->is_null()) {
      if (!it->is_array()) fail(path + ".sources", "expected an array");
      for (const auto& s : *it) {
        if (!s.is_number_unsigned()) fail(path + ".sources", "expected non-negative integers");
        lane.sources.push_back(s.get<std::uint32_t>());
      }
    }
    return lane;
  }

  ImageAssessment image(const json& j, const std::string& path) const {
    ImageAssessment a;
    a.image_id = string(j, "image_id", path);
    if (const auto it = j.find("timestamp"); it != j.end()) a.timestamp = number(*it, path + ".timestamp");
    if (const auto it = j.find("image_ref"); it != j.end() && it->is_string()) a.image_ref = it->get<std::string>();
    if (const auto it = j.find("factor_scores"); it != j.end()) {
      if (!it->is_object()) fail(path + ".factor_scores", "expected an object");
      for (auto f = it->begin(); f != it->end(); ++f) {
        const auto kind = parse_factor(f.key());
        if (!kind) fail(path + ".factor_scores", "unknown factor '" + f.key() + "'");
        a.set_score(*kind, integer(f.value(), path + ".factor_scores." + f.key()));
      }
    }
    if (const auto it = j.find("lane_visibility"); it != j.end()) {
      a.lane_visibility = integer(*it, path + ".lane_visibility");
    }
    if (const auto it = j.find("lane_confidence"); it != j.end() && !it->is_null()) {
      a.lane_confidence = number(*it, path + ".lane_confidence");
    }
    if (const auto it = j.find("confidence"); it != j.end() && !it->is_null()) {
      a.confidence = number(*it, path + ".confidence");
    }
    return a;
  }

 private:
  std::string source_;
};

}  // namespace

const LaneLine* LocalMap::find_lane(const std::string& lane_id) const {
  for (const auto& l : lane_lines) {
    if (l.lane_id == lane_id) return &l;
  }
  return nullptr;
}

std::size_t LocalMap::point_count() const {
  std::size_t n = 0;
  for (const auto& l : lane_lines) n += l.points.size();
  return n;
}

PointCloud LocalMap::cloud() const {
  PointCloud c;
  c.reserve(point_count());
  for (const auto& l : lane_lines) {
    for (const auto& p : l.points) c.push_back(p);
  }
  return c;
}

const LocalMap* LinkArea::find_map(const std::string& map_id) const {
  for (const auto& m : local_maps) {
    if (m.map_id == map_id) return &m;
  }
  return nullptr;
}

double average_confidence(const LocalMap& map) {
  if (map.images.empty()) {
    throw Error(ErrorCode::EmptyInput, "local map '" + map.map_id + "' has no images");
  }
  double sum = 0.0;
  for (const auto& img : map.images) {
    if (!img.confidence) {
      throw Error(ErrorCode::Validation, "local map '" + map.map_id + "': image '" +
                                             img.image_id + "' has no confidence score");
    }
    sum += *img.confidence;
  }
  return sum / static_cast<double>(map.images.size());
}

void validate_lane(const LaneLine& lane, const std::string& where) {
  const std::string at = where + ": lane '" + lane.lane_id + "'";
  if (lane.lane_id.empty()) throw Error(ErrorCode::Validation, where + ": empty lane_id");
  if (lane.points.size() < 2) {
    throw Error(ErrorCode::Validation,
                at + " has " + std::to_string(lane.points.size()) + " point(s), needs >= 2");
  }
  for (std::size_t i = 0; i < lane.points.size(); ++i) {
    const auto& p = lane.points[i];
    if (!std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(p.z)) {
      throw Error(ErrorCode::Validation, at + ": point " + std::to_string(i) + " is not finite");
    }
    if (i > 0 && lane.points[i - 1] == p) {
      throw Error(ErrorCode::Validation,
                  at + ": points " + std::to_string(i - 1) + " and " + std::to_string(i) + " coincide");
    }
  }
  if (!lane.sources.empty() && lane.sources.size() != lane.points.size()) {
    throw Error(ErrorCode::Validation, at + ": sources length differs from points length");
  }
}

void validate(const LocalMap& map, const std::string& where) {
  std::set<std::string> ids;
  for (const auto& lane : map.lane_lines) {
    validate_lane(lane, where);
    if (!ids.insert(lane.lane_id).second) {
      throw Error(ErrorCode::Validation, where + ": duplicate lane_id '" + lane.lane_id + "'");
    }
    for (auto s : lane.sources) {
      if (s >= map.images.size()) {
        throw Error(ErrorCode::Validation, where + ": lane '" + lane.lane_id +
                                               "' references image index " + std::to_string(s) +
                                               " out of range");
      }
    }
  }
  for (const auto& img : map.images) {
    const std::string at = where + ": image '" + img.image_id + "'";
    for (FactorKind f : kDegradationFactors) {
      if (img.score(f) < 0 || img.score(f) > 10) {
        throw Error(ErrorCode::Validation, at + ": " + std::string(factor_name(f)) + " outside 0..10");
      }
    }
    if (img.lane_visibility < 0 || img.lane_visibility > 10) {
      throw Error(ErrorCode::Validation, at + ": lane_visibility outside 0..10");
    }
    if (img.lane_confidence && !(*img.lane_confidence >= 0.0 && *img.lane_confidence <= 1.0)) {
      throw Error(ErrorCode::Validation, at + ": lane_confidence outside [0, 1]");
    }
    if (img.confidence && !(*img.confidence >= 0.0 && *img.confidence <= 10.0)) {
      throw Error(ErrorCode::Validation, at + ": confidence outside [0, 10]");
    }
  }
}

void validate(const LinkArea& area) {
  std::set<std::string> ids;
  for (const auto& m : area.local_maps) {
    validate(m, "link area '" + area.link_id + "' map '" + m.map_id + "'");
    if (!ids.insert(m.map_id).second) {
      throw Error(ErrorCode::Validation,
                  "link area '" + area.link_id + "': duplicate map_id '" + m.map_id + "'");
    }
  }
  if (area.ground_truth) {
    std::set<std::string> lanes;
    for (const auto& lane : *area.ground_truth) {
      validate_lane(lane, "link area '" + area.link_id + "' ground truth");
      if (!lanes.insert(lane.lane_id).second) {
        throw Error(ErrorCode::Validation, "link area '" + area.link_id +
                                               "' ground truth: duplicate lane_id '" + lane.lane_id + "'");
      }
    }
  }
}

std::string to_json_text(const LinkArea& area) {
  json maps = json::array();
  for (const auto& m : area.local_maps) {
    json lanes = json::array();
    for (const auto& l : m.lane_lines) lanes.push_back(lane_to_json(l));
    json images = json::array();
    for (const auto& img : m.images) images.push_back(image_to_json(img));
    maps.push_back({{"map_id", m.map_id},
                    {"link_area_id", m.link_area_id},
                    {"lane_lines", std::move(lanes)},
                    {"images", std::move(images)}});
  }
  json truth = nullptr;
  if (area.ground_truth) {
    truth = json::array();
    for (const auto& l : *area.ground_truth) truth.push_back(lane_to_json(l));
  }
  const json doc = {{"schema", kSchema},
                    {"link_id", area.link_id},
                    {"ground_truth", std::move(truth)},
                    {"local_maps", std::move(maps)}};
  std::ostringstream out;
  write_json(out, doc, 0);
  out << "\n";
  return out.str();
}

LinkArea link_area_from_json_text(const std::string& text, const std::string& source) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::Parse, source + ": " + e.what());
  }
  const Reader r(source);
  if (!doc.is_object()) r.fail("$", "expected an object at top level");
  if (const auto it = doc.find("schema"); it != doc.end() && *it != kSchema) {
    r.fail("$.schema", "unsupported schema " + it->dump());
  }

  LinkArea area;
  area.link_id = r.string(doc, "link_id", "$");
  if (const auto it = doc.find("ground_truth"); it != doc.end() && !it->is_null()) {
    if (!it->is_array()) r.fail("$.ground_truth", "expected an array");
    std::vector<LaneLine> truth;
    for (std::size_t i = 0; i < it->size(); ++i) {
      truth.push_back(r.lane((*it)[i], "$.ground_truth[" + std::to_string(i) + "]"));
    }
    area.ground_truth = std::move(truth);
  }
  const json& maps = r.field(doc, "local_maps", "$");
  if (!maps.is_array()) r.fail("$.local_maps", "expected an array");
  for (std::size_t i = 0; i < maps.size(); ++i) {
    const std::string path = "$.local_maps[" + std::to_string(i) + "]";
    const json& mj = maps[i];
    LocalMap m;
    m.map_id = r.string(mj, "map_id", path);
    m.link_area_id = mj.contains("link_area_id") ? r.string(mj, "link_area_id", path) : area.link_id;
    const json& lanes = r.field(mj, "lane_lines", path);
    if (!lanes.is_array()) r.fail(path + ".lane_lines", "expected an array");
    for (std::size_t k = 0; k < lanes.size(); ++k) {
      m.lane_lines.push_back(r.lane(lanes[k], path + ".lane_lines[" + std::to_string(k) + "]"));
    }
    if (const auto it = mj.find("images"); it != mj.end()) {
      if (!it->is_array()) r.fail(path + ".images", "expected an array");
      for (std::size_t k = 0; k < it->size(); ++k) {
        m.images.push_back(r.image((*it)[k], path + ".images[" + std::to_string(k) + "]"));
      }
    }
    area.local_maps.push_back(std::move(m));
  }
  validate(area);
  return area;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + tmp.string());
    out << content;
    if (!out.flush()) throw Error(ErrorCode::Io, "short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

LinkArea load_link_area(const std::filesystem::path& path) {
  return link_area_from_json_text(read_file(path), path.string());
}

void save_link_area(const LinkArea& area, const std::filesystem::path& path) {
  write_file_atomic(path, to_json_text(area));
}

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::string scores_csv(const LinkArea& area) {
  std::ostringstream out;
  out << "image_id";
  for (FactorKind f : kDegradationFactors) out << "," << factor_name(f);
  out << ",S_L,C_L,C\n";
  for (const auto& m : area.local_maps) {
    for (const auto& img : m.images) {
      out << img.image_id;
      for (FactorKind f : kDegradationFactors) out << "," << img.score(f);
      out << "," << img.lane_visibility;
      out << "," << (img.lane_confidence ? fixed6(*img.lane_confidence) : "");
      out << "," << (img.confidence ? fixed6(*img.confidence) : "") << "\n";
    }
  }
  return out.str();
}

}  // namespace lanefuse
