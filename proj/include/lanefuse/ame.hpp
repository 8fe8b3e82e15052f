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

#include <cstddef>
#include <span>

#include "lanefuse/mapmodel.hpp"

namespace lanefuse {

struct AmeResult {
  double e_ame = 0.0;
  std::size_t n_points = 0;
  bool lateral_only = true;
};

/// Root-mean-square mapping error of `estimated` against `truth`.
///
/// Every estimated point is matched to the closest segment of any truth lane.
/// The error term is the full 3D distance to that closest point, or, with
/// `lateral_only`, the xy distance from the point to the matched segment's
/// supporting line. `symmetric` also scores truth points against the estimate.
AmeResult ame(std::span<const LaneLine> estimated, std::span<const LaneLine> truth,
              bool lateral_only = true, bool symmetric = false);

}  // namespace lanefuse
