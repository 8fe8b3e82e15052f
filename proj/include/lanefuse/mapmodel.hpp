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

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "lanefuse/geometry.hpp"
#include "lanefuse/scoring.hpp"

namespace lanefuse {

/// A lane polyline. `sources`, when non-empty, holds for every point the
/// index of the image (within the owning LocalMap) it was reconstructed from.
struct LaneLine {
  std::string lane_id;
  std::vector<Point3> points;
  std::vector<std::uint32_t> sources;

  bool operator==(const LaneLine&) const = default;
};

struct LocalMap {
  std::string map_id;
  std::string link_area_id;
  std::vector<LaneLine> lane_lines;
  std::vector<ImageAssessment> images;

  const LaneLine* find_lane(const std::string& lane_id) const;
  std::size_t point_count() const;
  /// All lane points in lane order.
  PointCloud cloud() const;

  bool operator==(const LocalMap&) const = default;
};

struct LinkArea {
  std::string link_id;
  std::vector<LocalMap> local_maps;
  std::optional<std::vector<LaneLine>> ground_truth;

  const LocalMap* find_map(const std::string& map_id) const;

  bool operator==(const LinkArea&) const = default;
};

/// Mean of per-image confidences. Throws EmptyInput when the map has no
/// images and Validation when an image has no confidence yet.
double average_confidence(const LocalMap& map);

/// Structural checks: lanes have >= 2 points with no consecutive repeats,
/// finite coordinates, unique lane ids per map, unique map ids, scores in range.
void validate_lane(const LaneLine& lane, const std::string& where);
void validate(const LocalMap& map, const std::string& where);
void validate(const LinkArea& area);

std::string to_json_text(const LinkArea& area);
LinkArea link_area_from_json_text(const std::string& text, const std::string& source = "<string>");

LinkArea load_link_area(const std::filesystem::path& path);
void save_link_area(const LinkArea& area, const std::filesystem::path& path);

/// image_id, one column per degradation factor, S_L, C_L, C.
std::string scores_csv(const LinkArea& area);

/// Writes via a temporary sibling file and rename.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);
std::string read_file(const std::filesystem::path& path);

/// Fixed six-decimal formatting used in every text report.
std::string fixed6(double v);

}  // namespace lanefuse
