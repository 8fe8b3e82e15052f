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
#include <cstddef>
#include <optional>
#include <string_view>

namespace lanefuse {

/// Visibility factors scored per image. The ten degradation factors come
/// first (index 0..9); LaneVisibility is the distinguished eleventh kind.
enum class FactorKind : std::size_t {
  BlurDay = 0,
  BlurNight,
  BlurStreetlight,
  Illumination,
  Rain,
  Snow,
  Fog,
  Sandstorm,
  Occlusion,
  Degradation,
  LaneVisibility,
};

inline constexpr std::size_t kDegradationFactorCount = 10;
inline constexpr std::size_t kFactorKindCount = 11;

inline constexpr std::array<FactorKind, kDegradationFactorCount> kDegradationFactors{
    FactorKind::BlurDay,   FactorKind::BlurNight, FactorKind::BlurStreetlight,
    FactorKind::Illumination, FactorKind::Rain,   FactorKind::Snow,
    FactorKind::Fog,       FactorKind::Sandstorm, FactorKind::Occlusion,
    FactorKind::Degradation,
};

constexpr std::size_t index_of(FactorKind f) { return static_cast<std::size_t>(f); }

std::string_view factor_name(FactorKind f);
std::optional<FactorKind> parse_factor(std::string_view name);

/// Per-factor values for the ten degradation factors.
template <class T>
using FactorArray = std::array<T, kDegradationFactorCount>;

}  // namespace lanefuse
