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

#include <array>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <variant>

#include "lanefuse/factors.hpp"

namespace lanefuse {

inline constexpr std::size_t kScoreLevels = 11;

using LogitVector = std::array<double, kScoreLevels>;
using ScoreDistribution = std::array<double, kScoreLevels>;

/// Per-image scores. Factor scores and lane visibility are integers in 0..10;
/// confidence is filled in by the confidence stage.
struct ImageAssessment {
  std::string image_id;
  double timestamp = 0.0;
  std::string image_ref;  // path or opaque reference handed to a scorer
  FactorArray<int> factor_scores{};
  int lane_visibility = 0;
  std::optional<double> lane_confidence;
  std::optional<double> confidence;

  int score(FactorKind f) const;
  void set_score(FactorKind f, int value);

  bool operator==(const ImageAssessment&) const = default;
};

// Numerically stable softmax (max-subtracted).
ScoreDistribution softmax_distribution(const LogitVector& logits);

double lane_confidence(double l_clear);

// round(10 c), ties away from zero.
int lane_visibility_score(double lane_confidence);

// Visibility-aware weight 1 - C_L applied to factor expectations.
double vacw_weight(double lane_confidence);

double expected_factor_score(const ScoreDistribution& dist, double weight);

// Ceiling onto the integer scale 0..10; throws Range outside [0, 10].
int finalize_score(double s);

/// What a backend produced for one factor: a logit vector or a direct score.
using FactorOutput = std::variant<LogitVector, int>;

/// Builds an assessment from backend outputs. Direct scores are used as-is;
/// logit vectors flow through softmax, VACW weighting and ceiling. Every
/// factor in `active` must be present in `outputs`.
ImageAssessment assess_image(const std::string& image_id,
                             const std::map<FactorKind, FactorOutput>& outputs,
                             double l_clear,
                             std::span<const FactorKind> active,
                             double timestamp = 0.0);

}  // namespace lanefuse
