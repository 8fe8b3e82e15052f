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

#include "lanefuse/dbscan.hpp"

#include <cstdint>
#include <tuple>

#include "lanefuse/error.hpp"
#include "lanefuse/kernels.hpp"

namespace lanefuse {

void DbscanParams::validate() const {
  if (!(epsilon > 0.0)) throw Error(ErrorCode::Config, "dbscan.epsilon must be > 0");
  if (min_samples < 1) throw Error(ErrorCode::Config, "dbscan.min_samples must be >= 1");
}

DbscanResult dbscan(const PointCloud& points, const DbscanParams& params) {
  params.validate();
  const auto& k = kernels::active();
  const PointsView view = points.view();
  const std::size_t n = points.size();
  const double eps2 = params.epsilon * params.epsilon;

  // Neighborhoods in CSR form.
  std::vector<std::uint32_t> neighbors;
  std::vector<std::size_t> offsets(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) {
    k.radius_query(points[i], view, eps2, neighbors);
    offsets[i + 1] = neighbors.size();
  }

  DbscanResult r;
  r.labels.assign(n, kNoiseLabel);
  r.core.assign(n, false);
  for (std::size_t i = 0; i < n; ++i) r.core[i] = offsets[i + 1] - offsets[i] >= params.min_samples;

  std::vector<std::size_t> stack;
  for (std::size_t seed = 0; seed < n; ++seed) {
    if (!r.core[seed] || r.labels[seed] != kNoiseLabel) continue;
    const int label = r.cluster_count++;
    r.labels[seed] = label;
    stack.push_back(seed);
    while (!stack.empty()) {
      const std::size_t i = stack.back();
      stack.pop_back();
      for (std::size_t e = offsets[i]; e < offsets[i + 1]; ++e) {
        const std::size_t j = neighbors[e];
        if (r.core[j] && r.labels[j] == kNoiseLabel) {
          r.labels[j] = label;
          stack.push_back(j);
        }
      }
    }
  }

  for (std::size_t i = 0; i < n; ++i) {
    if (r.core[i]) continue;
    const Point3 p = points[i];
    bool found = false;
    double best_d2 = 0.0;
    Point3 best_core;
    int best_label = kNoiseLabel;
    for (std::size_t e = offsets[i]; e < offsets[i + 1]; ++e) {
      const std::size_t j = neighbors[e];
      if (!r.core[j]) continue;
      const Point3 c = points[j];
      const double dx = p.x - c.x, dy = p.y - c.y, dz = p.z - c.z;
      const double d2 = dx * dx + dy * dy + dz * dz;
      if (!found || d2 < best_d2 ||
          (d2 == best_d2 && std::tie(c.x, c.y, c.z) < std::tie(best_core.x, best_core.y, best_core.z))) {
        found = true;
        best_d2 = d2;
        best_core = c;
        best_label = r.labels[j];
      }
    }
    r.labels[i] = best_label;
  }
  return r;
}

}  // namespace lanefuse
