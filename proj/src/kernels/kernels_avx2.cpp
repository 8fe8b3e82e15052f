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

// AVX2 kernels, four doubles per lane group. Compiled with -mavx2 only; the
// dispatcher checks CPU support before handing out this table.

#include <immintrin.h>

#include <algorithm>
#include <bit>

#include "variants.hpp"

namespace lanefuse::kernels::detail {
namespace {

constexpr std::size_t kWidth = 4;

inline __m256d dist2_v(__m256d qx, __m256d qy, __m256d qz, __m256d px, __m256d py, __m256d pz) {
  const __m256d dx = _mm256_sub_pd(qx, px);
  const __m256d dy = _mm256_sub_pd(qy, py);
  const __m256d dz = _mm256_sub_pd(qz, pz);
  // (dx*dx + dy*dy) + dz*dz, same association as the scalar kernel.
  return _mm256_add_pd(_mm256_add_pd(_mm256_mul_pd(dx, dx), _mm256_mul_pd(dy, dy)),
                       _mm256_mul_pd(dz, dz));
}

inline double dist2(double qx, double qy, double qz, double px, double py, double pz) {
  const double dx = qx - px;
  const double dy = qy - py;
  const double dz = qz - pz;
  return dx * dx + dy * dy + dz * dz;
}

void squared_distances(const Point3& q, PointsView p, double* out) {
  const __m256d qx = _mm256_set1_pd(q.x), qy = _mm256_set1_pd(q.y), qz = _mm256_set1_pd(q.z);
  std::size_t i = 0;
  for (; i + kWidth <= p.size; i += kWidth) {
    const __m256d d = dist2_v(qx, qy, qz, _mm256_loadu_pd(p.x + i), _mm256_loadu_pd(p.y + i),
                              _mm256_loadu_pd(p.z + i));
    _mm256_storeu_pd(out + i, d);
  }
  for (; i < p.size; ++i) out[i] = dist2(q.x, q.y, q.z, p.x[i], p.y[i], p.z[i]);
}

// Lane-wise running minimum with index; strict less keeps the earliest index
// per lane, and the horizontal reduction breaks ties on index.
struct MinTracker {
  __m256d best = _mm256_set1_pd(__builtin_inf());
  __m256i best_idx = _mm256_set1_epi64x(0);

  void update(__m256d d, std::size_t base) {
    const __m256i idx = _mm256_add_epi64(_mm256_set1_epi64x(static_cast<long long>(base)),
                                         _mm256_setr_epi64x(0, 1, 2, 3));
    const __m256d less = _mm256_cmp_pd(d, best, _CMP_LT_OQ);
    best = _mm256_blendv_pd(best, d, less);
    best_idx = _mm256_castpd_si256(
        _mm256_blendv_pd(_mm256_castsi256_pd(best_idx), _mm256_castsi256_pd(idx), less));
  }

  NearestHit reduce() const {
    alignas(32) double d[kWidth];
    alignas(32) long long idx[kWidth];
    _mm256_store_pd(d, best);
    _mm256_store_si256(reinterpret_cast<__m256i*>(idx), best_idx);
    NearestHit hit{static_cast<std::size_t>(idx[0]), d[0]};
    for (std::size_t l = 1; l < kWidth; ++l) {
      const auto li = static_cast<std::size_t>(idx[l]);
      if (d[l] < hit.distance2 || (d[l] == hit.distance2 && li < hit.index)) hit = {li, d[l]};
    }
    return hit;
  }
};

NearestHit nearest_point(const Point3& q, PointsView p) {
  const __m256d qx = _mm256_set1_pd(q.x), qy = _mm256_set1_pd(q.y), qz = _mm256_set1_pd(q.z);
  std::size_t i = 0;
  NearestHit hit{0, __builtin_inf()};
  if (p.size >= kWidth) {
    MinTracker tracker;
    for (; i + kWidth <= p.size; i += kWidth) {
      tracker.update(dist2_v(qx, qy, qz, _mm256_loadu_pd(p.x + i), _mm256_loadu_pd(p.y + i),
                             _mm256_loadu_pd(p.z + i)),
                     i);
    }
    hit = tracker.reduce();
  }
  for (; i < p.size; ++i) {
    const double d = dist2(q.x, q.y, q.z, p.x[i], p.y[i], p.z[i]);
    if (d < hit.distance2) hit = {i, d};
  }
  return hit;
}

void radius_query(const Point3& q, PointsView p, double radius2, std::vector<std::uint32_t>& out) {
  const __m256d qx = _mm256_set1_pd(q.x), qy = _mm256_set1_pd(q.y), qz = _mm256_set1_pd(q.z);
  const __m256d r2 = _mm256_set1_pd(radius2);
  std::size_t i = 0;
  for (; i + kWidth <= p.size; i += kWidth) {
    const __m256d d = dist2_v(qx, qy, qz, _mm256_loadu_pd(p.x + i), _mm256_loadu_pd(p.y + i),
                              _mm256_loadu_pd(p.z + i));
    unsigned mask = static_cast<unsigned>(_mm256_movemask_pd(_mm256_cmp_pd(d, r2, _CMP_LE_OQ)));
    while (mask != 0) {
      const int lane = std::countr_zero(mask);
      out.push_back(static_cast<std::uint32_t>(i + static_cast<std::size_t>(lane)));
      mask &= mask - 1;
    }
  }
  for (; i < p.size; ++i) {
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
  return dist2(q.x, q.y, q.z, s.ax[i] + t * s.dx[i], s.ay[i] + t * s.dy[i], s.az[i] + t * s.dz[i]);
}

NearestHit nearest_segment(const Point3& q, SegmentsView s) {
  const __m256d qx = _mm256_set1_pd(q.x), qy = _mm256_set1_pd(q.y), qz = _mm256_set1_pd(q.z);
  const __m256d zero = _mm256_setzero_pd(), one = _mm256_set1_pd(1.0);
  std::size_t i = 0;
  NearestHit hit{0, __builtin_inf()};
  if (s.size >= kWidth) {
    MinTracker tracker;
    for (; i + kWidth <= s.size; i += kWidth) {
      const __m256d ax = _mm256_loadu_pd(s.ax + i), ay = _mm256_loadu_pd(s.ay + i),
                    az = _mm256_loadu_pd(s.az + i);
      const __m256d dx = _mm256_loadu_pd(s.dx + i), dy = _mm256_loadu_pd(s.dy + i),
                    dz = _mm256_loadu_pd(s.dz + i);
      const __m256d rx = _mm256_sub_pd(qx, ax), ry = _mm256_sub_pd(qy, ay),
                    rz = _mm256_sub_pd(qz, az);
      __m256d t = _mm256_add_pd(_mm256_add_pd(_mm256_mul_pd(rx, dx), _mm256_mul_pd(ry, dy)),
                                _mm256_mul_pd(rz, dz));
      t = _mm256_mul_pd(t, _mm256_loadu_pd(s.inv_len2 + i));
      // max(t, 0) then min(., 1); operand order matches std::max/std::min for finite t.
      t = _mm256_min_pd(_mm256_max_pd(t, zero), one);
      const __m256d cx = _mm256_add_pd(ax, _mm256_mul_pd(t, dx));
      const __m256d cy = _mm256_add_pd(ay, _mm256_mul_pd(t, dy));
      const __m256d cz = _mm256_add_pd(az, _mm256_mul_pd(t, dz));
      tracker.update(dist2_v(qx, qy, qz, cx, cy, cz), i);
    }
    hit = tracker.reduce();
  }
  for (; i < s.size; ++i) {
    const double d = segment_dist2(q, s, i);
    if (d < hit.distance2) hit = {i, d};
  }
  return hit;
}

}  // namespace

const KernelTable kAvx2Table{
    Isa::Avx2, &squared_distances, &nearest_point, &radius_query, &nearest_segment,
};

}  // namespace lanefuse::kernels::detail
