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

#include "lanefuse/ame.hpp"

#include <cmath>

#include "lanefuse/error.hpp"
#include "lanefuse/kernels.hpp"

namespace lanefuse {

namespace {

struct Accumulator {
  double sum2 = 0.0;
  std::size_t n = 0;
};

void score_points(std::span<const LaneLine> points, std::span<const LaneLine> against, bool lateral_only,
                  Accumulator& acc) {
  SegmentSet segs;
  for (std::size_t l = 0; l < against.size(); ++l) segs.add_polyline(against[l].points, l);
  if (segs.size() == 0) throw Error(ErrorCode::EmptyInput, "AME: reference lanes have no segments");

  const auto& k = kernels::active();
  const SegmentsView view = segs.view();
  for (const auto& lane : points) {
    for (const auto& q : lane.points) {
      const kernels::NearestHit hit = k.nearest_segment(q, view);
      double e2 = hit.distance2;
      if (lateral_only) {
        const Point3 a = segs.start(hit.index);
        const Point3 b = segs.end(hit.index);
        const double dx = b.x - a.x, dy = b.y - a.y;
        const double len = std::hypot(dx, dy);
        const double px = q.x - a.x, py = q.y - a.y;
        const double lat = len > 0.0 ? (dx * py - dy * px) / len : std::hypot(px, py);
        e2 = lat * lat;
      }
      acc.sum2 += e2;
      ++acc.n;
    }
  }
}

}  // namespace

AmeResult ame(std::span<const LaneLine> estimated, std::span<const LaneLine> truth, bool lateral_only,
              bool symmetric) {
  Accumulator acc;
  score_points(estimated, truth, lateral_only, acc);
  if (symmetric) score_points(truth, estimated, lateral_only, acc);
  if (acc.n == 0) throw Error(ErrorCode::EmptyInput, "AME: no estimated points");
  return {std::sqrt(acc.sum2 / static_cast<double>(acc.n)), acc.n, lateral_only};
}

}  // namespace lanefuse
