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
#include <string>
#include <vector>

#include "lanefuse/confidence.hpp"
#include "lanefuse/config.hpp"
#include "lanefuse/mapmodel.hpp"

namespace lanefuse {

struct ScoreRange {
  int lo = 0;
  int hi = 0;

  bool operator==(const ScoreRange&) const = default;
};

/// "a..b" or a single integer.
ScoreRange parse_score_range(const std::string& text);

struct Scenario {
  std::string name;
  double sigma = 0.0;   // meters, base point noise
  double weight = 1.0;  // share of maps drawn from this scenario
  FactorArray<ScoreRange> factor_ranges{};
  ScoreRange lane_visibility{10, 10};
};

struct SynthConfig {
  std::uint64_t seed = 1;
  std::size_t link_areas = 6;
  std::size_t maps_per_area = 5;
  std::size_t lanes_per_area = 4;
  std::size_t images_per_map = 10;
  double lane_spacing = 3.5;      // meters
  double lane_length = 50.0;      // meters
  double point_spacing = 0.25;    // meters
  double max_curvature = 0.002;   // |c| in y = c x^2 for the reference line
  double max_rotation_deg = 0.5;  // rigid offset of noisy maps
  double max_translation = 0.3;   // meters
  // Point noise is sigma * (0.5 + (10 - S_L) / 10) for the observing image,
  // except that images with invisible lanes (S_L = 0) use this factor.
  double invisible_noise_factor = 3.0;
  std::vector<Scenario> scenarios;
  WeightProfile weights = WeightProfile::defaults();
  ContextProfile context = ContextProfile::all_active();
  ConfidenceMethod method = ConfidenceMethod::Dpcs;

  void validate() const;

  /// Six areas of five maps: three clean, two degraded.
  static SynthConfig standard();

  /// Reads the [synth] section and every [scenario.<name>] section.
  static SynthConfig from_config(const KeyValueConfig& cfg);
};

/// Deterministic in cfg (each area seeds its own generator from seed and the
/// area index). Lane points carry the index of the image that observed them;
/// point noise grows as that image's lane visibility drops. Maps of a zero-σ
/// scenario are exact copies of the ground truth.
std::vector<LinkArea> synth_generate(const SynthConfig& cfg);

LinkArea synth_generate_area(const SynthConfig& cfg, std::size_t area_index);

}  // namespace lanefuse
