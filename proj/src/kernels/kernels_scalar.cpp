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

// Reference kernels. The SIMD variants mirror these operation for operation.

#include <algorithm>

#include "variants.hpp"

namespace lanefuse::kernels::detail {
namespace {

inline double dist2(double qx, double qy, double qz, double px, double py, double pz) {
  const double dx = qx - px;
  const double dy = qy - py;
  const double dz = qz - pz;
  return dx * dx + dy * dy + dz * dz;
}

void squared_distances(const Point3& q, PointsView p, double* out) {
  for (std::size_t i = 0; i < p.size; ++i) out[i] = dist2(q.x, q.y, q.z, p.x[i], p.y[i], p.z[i]);
}

NearestHit nearest_point(const Point3& q, PointsView p) {
  NearestHit best{0, dist2(q.x, q.y, q.z, p.x[0], p.y[0], p.z[0])};
  for (std::size_t i = 1; i < p.size; ++i) {
    const double d = dist2(q.x, q.y, q.z, p.x[i], p.y[i], p.z[i]);
    if (d < best.distance2) best = {i, d};
  }
  return best;
}

void radius_query(const Point3& q, PointsView p, double radius2, std::vector<std::uint32_t>& out) {
  for (std::size_t i = 0; i < p.size; ++i) {
    if (dist2(q.x, q.y, q.z, p.x[i], p.y[i], p.z[i]) <= radius2) {
      out.push_back(static_cast<std::uint32_t>(i));
    }
  }
}

inline double segment_dist2(const Point3& q, const SegmentsView& s, std::size_t i) {
  const double rx = q.x - s.ax[i];
  const double ry = q.y - s.ay[i];
  const double rz = q.z - s.az[i];
  double t = (rx * s.dx[i] + ry * s.dy[i] + rz * s.dz[i]) * s.inv_len2[i];
  t = std::min(std::max(t, 0.0), 1.0);
  const double cx = s.ax[i] + t * s.dx[i];
  const double cy = s.ay[i] + t * s.dy[i];
  const double cz = s.az[i] + t * s.dz[i];
  return dist2(q.x, q.y, q.z, cx, cy, cz);
}

NearestHit nearest_segment(const Point3& q, SegmentsView s) {
  NearestHit best{0, segment_dist2(q, s, 0)};
  for (std::size_t i = 1; i < s.size; ++i) {
    const double d = segment_dist2(q, s, i);
    if (d < best.distance2) best = {i, d};
  }
  return best;
}

}  // namespace

const KernelTable kScalarTable{
    Isa::Scalar, &squared_distances, &nearest_point, &radius_query, &nearest_segment,
};

}  // namespace lanefuse::kernels::detail
