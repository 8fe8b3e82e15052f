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

#include <optional>
#include <string>
#include <vector>

#include "lanefuse/mapmodel.hpp"

namespace lanefuse {

/// Offsets every point of `lane_id` by (dx, dy, 0).
LocalMap modify_shift(const LocalMap& map, const std::string& lane_id, double dx, double dy);

LocalMap modify_delete(const LocalMap& map, const std::string& lane_id);

/// Inserts a lane halfway between `lane_a` and `lane_b`, displaced by `offset`
/// meters along the left xy-normal of the new lane. Both parents are first
/// resampled by arc length to the larger point count. The id defaults to
/// "<a>+<b>", made unique with a numeric suffix if needed.
LocalMap modify_add(const LocalMap& map, const std::string& lane_a, const std::string& lane_b,
                    double offset, std::optional<std::string> new_id = std::nullopt);

/// Arc-length resampling to `count` >= 2 points; endpoints are kept exactly.
std::vector<Point3> resample_polyline(const std::vector<Point3>& points, std::size_t count);

/// A scripted edit, as read from a modification script:
///
///   shift  <lane> <dx> <dy>
///   delete <lane>
///   add    <lane_a> <lane_b> <offset> [new_id]
struct Modification {
  enum class Kind { Shift, Delete, Add } kind = Kind::Shift;
  std::string lane;
  std::string other_lane;
  double dx = 0.0;
  double dy = 0.0;
  double offset = 0.0;
  std::optional<std::string> new_id;
};

std::vector<Modification> parse_modification_script(const std::string& text,
                                                    const std::string& source = "<script>");
LocalMap apply_modifications(const LocalMap& map, const std::vector<Modification>& script);
std::vector<LaneLine> apply_modifications(const std::vector<LaneLine>& lanes,
                                          const std::vector<Modification>& script);

}  // namespace lanefuse
