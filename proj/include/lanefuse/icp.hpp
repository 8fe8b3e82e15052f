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
#include <vector>

#include <Eigen/Core>

#include "lanefuse/geometry.hpp"

namespace lanefuse {

enum class IcpInit {
  Identity,  // start from the identity pose (georeferenced inputs)
  Pca,       // also try principal-axis starts; keep the lowest residual
};

struct IcpParams {
  int max_iterations = 50;
  double convergence_tol = 1e-6;          // meters, change in residual
  double max_correspondence_dist = 2.0;   // meters; +inf disables the gate
  IcpInit init = IcpInit::Identity;

  void validate() const;
};

struct IcpResult {
  RigidTransform transform;  // maps source into the target frame
  double rms_residual = 0.0;
  int iterations = 0;
  bool converged = false;
  std::size_t correspondences = 0;
  /// Residual at each visited pose. Non-increasing by construction.
  std::vector<double> residual_history;
};

/// Least-squares rigid transform taking src[i] onto dst[i] (SVD with
/// reflection correction). Needs >= 3 pairs.
RigidTransform estimate_rigid(std::span<const Eigen::Vector3d> src,
                              std::span<const Eigen::Vector3d> dst);

/// Point-to-point ICP. Each source point pairs with its nearest target point;
/// pairs longer than the gate are dropped from the estimate and contribute
/// gate^2 to the residual, so the reported residual
///   sqrt(sum_i min(d_i^2, gate^2) / n)
/// cannot increase between iterations. A step that rounding makes slightly
/// worse is rejected and ends the iteration at the previous pose.
IcpResult icp_align(const PointCloud& source, const PointCloud& target, const IcpParams& params);

}  // namespace lanefuse
