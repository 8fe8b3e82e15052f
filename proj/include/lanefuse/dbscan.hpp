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
#include <vector>

#include "lanefuse/geometry.hpp"

namespace lanefuse {

struct DbscanParams {
  double epsilon = 0.5;        // meters, neighborhood radius (inclusive)
  std::size_t min_samples = 4; // neighbors within epsilon, self included

  void validate() const;
};

inline constexpr int kNoiseLabel = -1;

struct DbscanResult {
  std::vector<int> labels;  // cluster id per point or kNoiseLabel
  std::vector<bool> core;
  int cluster_count = 0;
};

/// Density clustering.
///
/// Core points have >= min_samples neighbors within epsilon. Clusters are the
/// connected components of the core-neighbor graph, numbered in ascending
/// order of their lowest-index core point. A non-core point within epsilon of
/// a core point joins the cluster of its nearest core neighbor (exact ties go
/// to the lexicographically smallest core coordinate), which makes the
/// partition independent of input order. Everything else is noise.
DbscanResult dbscan(const PointCloud& points, const DbscanParams& params);

}  // namespace lanefuse
