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
#include <cstdint>
#include <string_view>
#include <vector>

#include "lanefuse/geometry.hpp"

namespace lanefuse::kernels {

/// Instruction-set variant of the distance kernels. Every variant produces
/// bit-identical results: the arithmetic is the same sequence of IEEE
/// operations (no FMA contraction), only the width differs.
enum class Isa { Scalar, Avx2 };

std::string_view isa_name(Isa isa);

struct NearestHit {
  std::size_t index = 0;
  double distance2 = 0.0;
};

struct KernelTable {
  Isa isa;
  /// out[i] = |q - p_i|^2
  void (*squared_distances)(const Point3& q, PointsView pts, double* out);
  /// Closest point; ties resolve to the lowest index. pts must be non-empty.
  NearestHit (*nearest_point)(const Point3& q, PointsView pts);
  /// Appends indices i with |q - p_i|^2 <= radius2, ascending.
  void (*radius_query)(const Point3& q, PointsView pts, double radius2,
                       std::vector<std::uint32_t>& out);
  /// Closest segment by clamped projection; ties resolve to the lowest index.
  NearestHit (*nearest_segment)(const Point3& q, SegmentsView segs);
};

bool isa_supported(Isa isa);

/// Table for a specific variant; throws if the host cannot run it.
const KernelTable& table(Isa isa);

/// Best supported variant, chosen once at first use. LANEFUSE_ISA=scalar
/// in the environment forces the reference kernels.
const KernelTable& active();

}  // namespace lanefuse::kernels
