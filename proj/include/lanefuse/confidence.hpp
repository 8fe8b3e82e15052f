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

#include <bitset>
#include <map>
#include <string>
#include <vector>

#include "lanefuse/config.hpp"
#include "lanefuse/factors.hpp"
#include "lanefuse/scoring.hpp"

namespace lanefuse {

/// Per-factor weights for the confidence formulas.
struct WeightProfile {
  std::string profile_name = "default";
  double lane_weight = 1.0;
  FactorArray<double> factor_weights{};

  /// Lane 1.0, sandstorm 0.1, every other factor 0.2 (illumination included).
  static WeightProfile defaults();
  void validate() const;
};

/// Which degradation factors are considered under a given condition.
/// LaneVisibility is always active and is not stored.
struct ContextProfile {
  std::string description = "all";
  std::bitset<kDegradationFactorCount> active;

  static ContextProfile all_active();
  /// Built-ins: "all", "clear-day", "clear-night", "rain", "snow", "fog", "sandstorm".
  static ContextProfile builtin(const std::string& name);

  bool is_active(FactorKind f) const;
  std::vector<FactorKind> active_factors() const;
};

enum class ConfidenceMethod { Dpcs, Gcs };

enum class DpcsBranch { ZeroVisibility, Low, Mid, High };

struct ConfidenceScore {
  double value = 0.0;
  bool clamped = false;
  DpcsBranch branch = DpcsBranch::ZeroVisibility;
};

/// Sum over active non-lane factors of score * weight.
double weighted_deductions(const ImageAssessment& a, const WeightProfile& w,
                           const ContextProfile& ctx);

ConfidenceScore evaluate_dpcs(const ImageAssessment& a, const WeightProfile& w,
                              const ContextProfile& ctx);
ConfidenceScore evaluate_gcs(const ImageAssessment& a, const WeightProfile& w,
                             const ContextProfile& ctx);

/// Dynamic piecewise confidence in [0, 10].
double dpcs(const ImageAssessment& a, const WeightProfile& w, const ContextProfile& ctx);
/// Single-formula confidence in [0, 10].
double gcs(const ImageAssessment& a, const WeightProfile& w, const ContextProfile& ctx);

double confidence(ConfidenceMethod method, const ImageAssessment& a, const WeightProfile& w,
                  const ContextProfile& ctx);

/// Zeroes the scores of inactive factors; lane visibility is untouched.
ImageAssessment apply_context(const ContextProfile& ctx, const ImageAssessment& a);

ConfidenceMethod parse_confidence_method(const std::string& name);

/// Profiles read from a key-value file:
///
///   [weights.<name>]
///   lane = 1.0
///   BlurDay = 0.2        # one line per degradation factor
///   [context.<name>]
///   factors = BlurDay, Illumination, Occlusion, Degradation
///   description = free text
///
/// Weight profiles must name every degradation factor.
struct ProfileSet {
  std::map<std::string, WeightProfile> weights;
  std::map<std::string, ContextProfile> contexts;

  static ProfileSet builtin();
  static ProfileSet from_config(const KeyValueConfig& cfg);

  const WeightProfile& weight(const std::string& name) const;
  const ContextProfile& context(const std::string& name) const;
};

}  // namespace lanefuse
