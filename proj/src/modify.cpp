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

#include "lanefuse/modify.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "lanefuse/error.hpp"

namespace lanefuse {

namespace {

std::vector<LaneLine>::iterator find_or_throw(std::vector<LaneLine>& lanes, const std::string& id) {
  auto it = std::find_if(lanes.begin(), lanes.end(), [&](const LaneLine& l) { return l.lane_id == id; });
  if (it == lanes.end()) throw Error(ErrorCode::NotFound, "lane '" + id + "' not found");
  return it;
}

bool has_lane(const std::vector<LaneLine>& lanes, const std::string& id) {
  return std::any_of(lanes.begin(), lanes.end(), [&](const LaneLine& l) { return l.lane_id == id; });
}

std::vector<double> cumulative_length(const std::vector<Point3>& pts) {
  std::vector<double> s(pts.size(), 0.0);
  for (std::size_t i = 1; i < pts.size(); ++i) s[i] = s[i - 1] + distance(pts[i - 1], pts[i]);
  return s;
}

// Arc-length resampling that also reports the nearest source vertex per sample.
std::vector<Point3> resample(const std::vector<Point3>& pts, std::size_t count,
                             std::vector<std::size_t>* nearest) {
  if (pts.empty()) throw Error(ErrorCode::InvalidInput, "cannot resample an empty polyline");
  if (count < 2) throw Error(ErrorCode::InvalidInput, "resample count must be >= 2");
  const auto s = cumulative_length(pts);
  const double total = s.back();
  std::vector<Point3> out(count);
  if (nearest) nearest->assign(count, 0);
  std::size_t seg = 0;
  for (std::size_t k = 0; k < count; ++k) {
    if (k == 0 || total == 0.0) {
      out[k] = pts.front();
      continue;
    }
    if (k + 1 == count) {
      out[k] = pts.back();
      if (nearest) (*nearest)[k] = pts.size() - 1;
      continue;
    }
    const double target = total * static_cast<double>(k) / static_cast<double>(count - 1);
    while (seg + 2 < pts.size() && s[seg + 1] < target) ++seg;
    const double len = s[seg + 1] - s[seg];
    const double t = len > 0.0 ? std::clamp((target - s[seg]) / len, 0.0, 1.0) : 0.0;
    const Point3& a = pts[seg];
    const Point3& b = pts[seg + 1];
    out[k] = {a.x + t * (b.x - a.x), a.y + t * (b.y - a.y), a.z + t * (b.z - a.z)};
    if (nearest) (*nearest)[k] = t < 0.5 ? seg : seg + 1;
  }
  return out;
}

std::vector<LaneLine> shift(std::vector<LaneLine> lanes, const std::string& id, double dx, double dy) {
  auto it = find_or_throw(lanes, id);
  for (auto& p : it->points) {
    p.x += dx;
    p.y += dy;
  }
  return lanes;
}

std::vector<LaneLine> remove(std::vector<LaneLine> lanes, const std::string& id) {
  lanes.erase(find_or_throw(lanes, id));
  return lanes;
}

std::vector<LaneLine> add(std::vector<LaneLine> lanes, const std::string& id_a, const std::string& id_b,
                          double offset, const std::optional<std::string>& new_id) {
  if (!std::isfinite(offset)) throw Error(ErrorCode::InvalidInput, "add offset must be finite");
  const LaneLine a = *find_or_throw(lanes, id_a);
  const LaneLine b = *find_or_throw(lanes, id_b);
  const std::size_t count = std::max<std::size_t>({a.points.size(), b.points.size(), 2});

  std::vector<std::size_t> near_a;
  const auto ra = resample(a.points, count, &near_a);
  auto rb = resample(b.points, count, nullptr);
  // Pair the parents start-to-start even if they were digitized in opposite directions.
  if (distance(ra.front(), rb.back()) < distance(ra.front(), rb.front())) std::reverse(rb.begin(), rb.end());

  double gap = 0.0;
  for (std::size_t i = 0; i < count; ++i) gap = std::max(gap, distance(ra[i], rb[i]));
  if (gap < 1e-9 && offset == 0.0) {
    throw Error(ErrorCode::DegenerateAdd,
                "add: lanes '" + id_a + "' and '" + id_b + "' coincide; offset 0 would duplicate them");
  }

  std::vector<Point3> mid(count);
  for (std::size_t i = 0; i < count; ++i) {
    mid[i] = {(ra[i].x + rb[i].x) / 2, (ra[i].y + rb[i].y) / 2, (ra[i].z + rb[i].z) / 2};
  }

  LaneLine lane;
  lane.points.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    const Point3& p = mid[i > 0 ? i - 1 : 0];
    const Point3& q = mid[i + 1 < count ? i + 1 : count - 1];
    double tx = q.x - p.x, ty = q.y - p.y;
    const double len = std::hypot(tx, ty);
    if (len == 0.0) {
      if (offset != 0.0) {
        throw Error(ErrorCode::DegenerateAdd, "add: midpoint lane has no xy direction at vertex " + std::to_string(i));
      }
      tx = ty = 0.0;
    } else {
      tx /= len;
      ty /= len;
    }
    lane.points[i] = {mid[i].x - ty * offset, mid[i].y + tx * offset, mid[i].z};
  }
  for (std::size_t i = 1; i < count; ++i) {
    if (lane.points[i] == lane.points[i - 1]) {
      throw Error(ErrorCode::DegenerateAdd,
                  "add: lanes '" + id_a + "' and '" + id_b + "' produce a degenerate midpoint lane");
    }
  }
  if (!a.sources.empty()) {
    lane.sources.resize(count);
    for (std::size_t i = 0; i < count; ++i) lane.sources[i] = a.sources[near_a[i]];
  }

  std::string id = new_id ? *new_id : id_a + "+" + id_b;
  if (new_id && has_lane(lanes, id)) throw Error(ErrorCode::InvalidInput, "add: lane id '" + id + "' already exists");
  if (!new_id && has_lane(lanes, id)) {
    int k = 2;
    while (has_lane(lanes, id + "#" + std::to_string(k))) ++k;
    id += "#" + std::to_string(k);
  }
  lane.lane_id = std::move(id);
  lanes.push_back(std::move(lane));
  return lanes;
}

LocalMap with_lanes(const LocalMap& map, std::vector<LaneLine> lanes) {
  LocalMap out = map;
  out.lane_lines = std::move(lanes);
  return out;
}

}  // namespace

std::vector<Point3> resample_polyline(const std::vector<Point3>& points, std::size_t count) {
  return resample(points, count, nullptr);
}

LocalMap modify_shift(const LocalMap& map, const std::string& lane_id, double dx, double dy) {
  return with_lanes(map, shift(map.lane_lines, lane_id, dx, dy));
}

LocalMap modify_delete(const LocalMap& map, const std::string& lane_id) {
  return with_lanes(map, remove(map.lane_lines, lane_id));
}

LocalMap modify_add(const LocalMap& map, const std::string& lane_a, const std::string& lane_b, double offset,
                    std::optional<std::string> new_id) {
  return with_lanes(map, add(map.lane_lines, lane_a, lane_b, offset, new_id));
}

std::vector<Modification> parse_modification_script(const std::string& text, const std::string& source) {
  std::vector<Modification> out;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  auto fail = [&](const std::string& msg) -> void {
    throw Error(ErrorCode::Parse, source + ":" + std::to_string(line_no) + ": " + msg);
  };
  auto number = [&](const std::string& tok) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(tok, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != tok.size() || !std::isfinite(v)) fail("expected a number, got '" + tok + "'");
    return v;
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream words(line);
    std::vector<std::string> tok;
    for (std::string w; words >> w;) tok.push_back(w);
    if (tok.empty()) continue;
    Modification m;
    if (tok[0] == "shift") {
      if (tok.size() != 4) fail("usage: shift <lane> <dx> <dy>");
      m.kind = Modification::Kind::Shift;
      m.lane = tok[1];
      m.dx = number(tok[2]);
      m.dy = number(tok[3]);
    } else if (tok[0] == "delete") {
      if (tok.size() != 2) fail("usage: delete <lane>");
      m.kind = Modification::Kind::Delete;
      m.lane = tok[1];
    } else if (tok[0] == "add") {
      if (tok.size() != 4 && tok.size() != 5) fail("usage: add <lane_a> <lane_b> <offset> [new_id]");
      m.kind = Modification::Kind::Add;
      m.lane = tok[1];
      m.other_lane = tok[2];
      m.offset = number(tok[3]);
      if (tok.size() == 5) m.new_id = tok[4];
    } else {
      fail("unknown operation '" + tok[0] + "'");
    }
    out.push_back(std::move(m));
  }
  return out;
}

std::vector<LaneLine> apply_modifications(const std::vector<LaneLine>& lanes,
                                          const std::vector<Modification>& script) {
  std::vector<LaneLine> cur = lanes;
  for (const auto& m : script) {
    switch (m.kind) {
      case Modification::Kind::Shift: cur = shift(std::move(cur), m.lane, m.dx, m.dy); break;
      case Modification::Kind::Delete: cur = remove(std::move(cur), m.lane); break;
      case Modification::Kind::Add: cur = add(std::move(cur), m.lane, m.other_lane, m.offset, m.new_id); break;
    }
  }
  return cur;
}

LocalMap apply_modifications(const LocalMap& map, const std::vector<Modification>& script) {
  return with_lanes(map, apply_modifications(map.lane_lines, script));
}

}  // namespace lanefuse
