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

#include <span>
#include <string>
#include <vector>

#include "lanefuse/dbscan.hpp"
#include "lanefuse/icp.hpp"
#include "lanefuse/mapmodel.hpp"

namespace lanefuse {

struct FusionParams {
  DbscanParams dbscan;
  IcpParams icp;
  double bin_size = 1.0;  // meters along the cluster axis per output vertex

  void validate() const;
};

struct FusionDiagnostics {
  std::vector<IcpResult> alignments;  // one per selected map, in input order
  std::size_t pooled_points = 0;
  std::size_t noise_points = 0;
  int clusters = 0;
};

struct FusionResult {
  LocalMap fused;
  FusionDiagnostics diagnostics;
};

/// p -> R p + t on every lane point; everything else is copied.
LocalMap apply_transform(const RigidTransform& t, const LocalMap& map);

/// Representative polyline of one lane cluster: points are projected on the
/// principal xy axis, binned every `bin_size` meters, and each non-empty bin
/// contributes its centroid in axis order.
std::vector<Point3> cluster_polyline(std::span<const Point3> points, double bin_size);

/// Pools `modified` with maps already in its frame, clusters, drops noise and
/// emits one lane per cluster. A fused lane takes the id of the modified-map
/// lane contributing most of its points, else "F<cluster>".
FusionResult fuse_aligned(std::span<const LocalMap> aligned, const LocalMap& modified,
                          const FusionParams& params);

/// Aligns every selected map onto `modified` with ICP, then fuse_aligned.
FusionResult fuse_maps(std::span<const LocalMap> selected, const LocalMap& modified,
                       const FusionParams& params);

}  // namespace lanefuse
