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

#include "lanefuse/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lanefuse/error.hpp"

namespace lanefuse {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidInput: return "invalid-input";
    case ErrorCode::Range: return "range";
    case ErrorCode::IncompleteAssessment: return "incomplete-assessment";
    case ErrorCode::EmptyInput: return "empty-input";
    case ErrorCode::Parse: return "parse";
    case ErrorCode::Validation: return "validation";
    case ErrorCode::NotFound: return "not-found";
    case ErrorCode::DegenerateCorrespondence: return "degenerate-correspondence";
    case ErrorCode::EmptyFusion: return "empty-fusion";
    case ErrorCode::DegenerateAdd: return "degenerate-add";
    case ErrorCode::Config: return "config";
    case ErrorCode::Transport: return "transport";
    case ErrorCode::Protocol: return "protocol";
    case ErrorCode::ReplayMiss: return "replay-miss";
    case ErrorCode::Io: return "io";
  }
  return "unknown";
}

namespace {

constexpr std::array<std::string_view, kFactorKindCount> kFactorNames{
    "BlurDay", "BlurNight", "BlurStreetlight", "Illumination", "Rain",   "Snow",
    "Fog",     "Sandstorm", "Occlusion",       "Degradation",  "LaneVisibility",
};

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) {
    throw Error(ErrorCode::InvalidInput, std::string(what) + " is not finite");
  }
}

void require_unit(double c) {
  if (!(c >= 0.0 && c <= 1.0)) {
    throw Error(ErrorCode::Range, "lane confidence " + std::to_string(c) + " outside [0, 1]");
  }
}

}  // namespace

std::string_view factor_name(FactorKind f) { return kFactorNames[index_of(f)]; }

std::optional<FactorKind> parse_factor(std::string_view name) {
  for (std::size_t i = 0; i < kFactorNames.size(); ++i) {
    if (kFactorNames[i] == name) return static_cast<FactorKind>(i);
  }
  return std::nullopt;
}

int ImageAssessment::score(FactorKind f) const {
  if (f == FactorKind::LaneVisibility) return lane_visibility;
  return factor_scores[index_of(f)];
}

void ImageAssessment::set_score(FactorKind f, int value) {
  if (f == FactorKind::LaneVisibility) {
    lane_visibility = value;
  } else {
    factor_scores[index_of(f)] = value;
  }
}

ScoreDistribution softmax_distribution(const LogitVector& logits) {
  for (double l : logits) require_finite(l, "logit");
  const double peak = *std::max_element(logits.begin(), logits.end());
  ScoreDistribution p{};
  double total = 0.0;
  for (std::size_t i = 0; i < kScoreLevels; ++i) {
    p[i] = std::exp(logits[i] - peak);
    total += p[i];
  }
  for (double& v : p) v /= total;
  return p;
}

double lane_confidence(double l_clear) {
  require_finite(l_clear, "lane clarity logit");
  return 1.0 / (1.0 + std::exp(-l_clear));
}

int lane_visibility_score(double c) {
  require_unit(c);
  // std::round rounds halfway cases away from zero.
  return static_cast<int>(std::round(10.0 * c));
}

double vacw_weight(double c) {
  require_unit(c);
  return 1.0 - c;
}

double expected_factor_score(const ScoreDistribution& dist, double weight) {
  double s = 0.0;
  for (std::size_t i = 0; i < kScoreLevels; ++i) s += static_cast<double>(i) * dist[i];
  return weight * s;
}

int finalize_score(double s) {
  if (!(s >= 0.0 && s <= 10.0)) {
    throw Error(ErrorCode::Range, "factor score " + std::to_string(s) + " outside [0, 10]");
  }
  return static_cast<int>(std::ceil(s));
}

ImageAssessment assess_image(const std::string& image_id,
                             const std::map<FactorKind, FactorOutput>& outputs,
                             double l_clear,
                             std::span<const FactorKind> active,
                             double timestamp) {
  for (FactorKind f : active) {
    if (f == FactorKind::LaneVisibility) continue;
    if (!outputs.contains(f)) {
      throw Error(ErrorCode::IncompleteAssessment,
                  "image '" + image_id + "': no backend output for factor " +
                      std::string(factor_name(f)));
    }
  }

  ImageAssessment a;
  a.image_id = image_id;
  a.timestamp = timestamp;
  const double c_l = lane_confidence(l_clear);
  a.lane_confidence = c_l;
  a.lane_visibility = lane_visibility_score(c_l);
  const double w = vacw_weight(c_l);

  for (const auto& [factor, output] : outputs) {
    if (factor == FactorKind::LaneVisibility) continue;
    int score = 0;
    if (const int* direct = std::get_if<int>(&output)) {
      if (*direct < 0 || *direct > 10) {
        throw Error(ErrorCode::Range, "image '" + image_id + "': direct score " +
                                          std::to_string(*direct) + " for " +
                                          std::string(factor_name(factor)) + " outside 0..10");
      }
      score = *direct;
    } else {
      const auto dist = softmax_distribution(std::get<LogitVector>(output));
      // Guard against a sum of probabilities landing a hair above 10.
      score = finalize_score(std::min(10.0, expected_factor_score(dist, w)));
    }
    a.factor_scores[index_of(factor)] = score;
  }
  return a;
}

}  // namespace lanefuse
