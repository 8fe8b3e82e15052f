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

#include "lanefuse/icp.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "lanefuse/error.hpp"
#include "lanefuse/kernels.hpp"

namespace lanefuse {

namespace {

struct Moments {
  Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
  Eigen::Matrix3d axes = Eigen::Matrix3d::Identity();  // columns, descending variance
  Eigen::Vector3d variances = Eigen::Vector3d::Zero();
};

Moments moments(const PointCloud& cloud) {
  Moments m;
  const auto n = static_cast<double>(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) m.centroid += cloud[i].vec();
  m.centroid /= n;
  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const Eigen::Vector3d d = cloud[i].vec() - m.centroid;
    cov += d * d.transpose();
  }
  cov /= n;
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(cov);
  // Eigen returns ascending eigenvalues.
  for (int k = 0; k < 3; ++k) {
    m.axes.col(k) = eig.eigenvectors().col(2 - k);
    m.variances(k) = eig.eigenvalues()(2 - k);
  }
  return m;
}

void require_non_collinear(const PointCloud& cloud, const char* which) {
  if (cloud.size() < 3) {
    throw Error(ErrorCode::InvalidInput,
                std::string("ICP ") + which + " needs >= 3 points, got " + std::to_string(cloud.size()));
  }
  const Moments m = moments(cloud);
  if (!(m.variances(1) > 1e-12 * std::max(1.0, m.variances(0)))) {
    throw Error(ErrorCode::InvalidInput, std::string("ICP ") + which + " points are collinear");
  }
}

IcpResult run_icp(const PointCloud& source, const PointsView target, const IcpParams& params,
                  const RigidTransform& start) {
  const auto& k = kernels::active();
  const double gate2 = params.max_correspondence_dist * params.max_correspondence_dist;
  const std::size_t n = source.size();

  IcpResult r;
  r.transform = start;
  RigidTransform previous = start;
  std::vector<Eigen::Vector3d> src, dst;
  src.reserve(n);
  dst.reserve(n);

  for (int iter = 0;; ++iter) {
    src.clear();
    dst.clear();
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const Point3 p = r.transform.apply(source[i]);
      const auto hit = k.nearest_point(p, target);
      if (hit.distance2 <= gate2) {
        sum += hit.distance2;
        src.push_back(p.vec());
        dst.push_back({target.x[hit.index], target.y[hit.index], target.z[hit.index]});
      }
    }
    if (src.size() < n) sum += static_cast<double>(n - src.size()) * gate2;
    const double residual = std::sqrt(sum / static_cast<double>(n));

    if (iter > 0) {
      const double prev = r.residual_history.back();
      if (residual > prev) {
        // Only rounding can make a step worse; keep the previous pose.
        r.transform = previous;
        r.iterations = iter;
        r.converged = true;
        break;
      }
      r.residual_history.push_back(residual);
      r.rms_residual = residual;
      r.correspondences = src.size();
      r.iterations = iter;
      if (prev - residual < params.convergence_tol) {
        r.converged = true;
        break;
      }
    } else {
      r.residual_history.push_back(residual);
      r.rms_residual = residual;
      r.correspondences = src.size();
    }
    if (iter >= params.max_iterations) break;
    if (src.size() < 3) {
      throw Error(ErrorCode::DegenerateCorrespondence,
                  "ICP iteration " + std::to_string(iter) + ": only " + std::to_string(src.size()) +
                      " correspondences within " + std::to_string(params.max_correspondence_dist) + " m");
    }
    previous = r.transform;
    r.transform = estimate_rigid(src, dst).compose(r.transform);
  }
  return r;
}

}  // namespace

void IcpParams::validate() const {
  if (max_iterations <= 0) throw Error(ErrorCode::Config, "icp.max_iterations must be > 0");
  if (!(convergence_tol > 0.0)) throw Error(ErrorCode::Config, "icp.convergence_tol must be > 0");
  if (!(max_correspondence_dist > 0.0)) {
    throw Error(ErrorCode::Config, "icp.max_correspondence_dist must be > 0");
  }
}

RigidTransform estimate_rigid(std::span<const Eigen::Vector3d> src,
                              std::span<const Eigen::Vector3d> dst) {
  if (src.size() != dst.size() || src.size() < 3) {
    throw Error(ErrorCode::DegenerateCorrespondence, "rigid estimate needs >= 3 paired points");
  }
  const auto n = static_cast<double>(src.size());
  Eigen::Vector3d cs = Eigen::Vector3d::Zero(), cd = Eigen::Vector3d::Zero();
  for (std::size_t i = 0; i < src.size(); ++i) {
    cs += src[i];
    cd += dst[i];
  }
  cs /= n;
  cd /= n;
  Eigen::Matrix3d h = Eigen::Matrix3d::Zero();
  for (std::size_t i = 0; i < src.size(); ++i) h += (src[i] - cs) * (dst[i] - cd).transpose();

  const Eigen::JacobiSVD<Eigen::Matrix3d> svd(h, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::Matrix3d u = svd.matrixU();
  const Eigen::Matrix3d v = svd.matrixV();
  Eigen::Matrix3d fix = Eigen::Matrix3d::Identity();
  fix(2, 2) = (v * u.transpose()).determinant() < 0.0 ? -1.0 : 1.0;

  RigidTransform t;
  t.rotation = v * fix * u.transpose();
  t.translation = cd - t.rotation * cs;
  return t;
}

IcpResult icp_align(const PointCloud& source, const PointCloud& target, const IcpParams& params) {
  params.validate();
  require_non_collinear(source, "source");
  require_non_collinear(target, "target");

  const PointsView tv = target.view();
  IcpResult best = run_icp(source, tv, params, RigidTransform::identity());
  if (params.init != IcpInit::Pca) return best;

  const Moments ms = moments(source);
  const Moments mt = moments(target);
  const double handed = ms.axes.determinant() * mt.axes.determinant() < 0.0 ? -1.0 : 1.0;
  constexpr std::array<std::array<double, 3>, 4> kSigns{{
      {1, 1, 1}, {1, -1, -1}, {-1, 1, -1}, {-1, -1, 1},
  }};
  for (const auto& s : kSigns) {
    const Eigen::Vector3d flips(handed * s[0], handed * s[1], handed * s[2]);
    RigidTransform start;
    start.rotation = mt.axes * flips.asDiagonal() * ms.axes.transpose();
    start.translation = mt.centroid - start.rotation * ms.centroid;
    try {
      IcpResult candidate = run_icp(source, tv, params, start);
      if (candidate.rms_residual < best.rms_residual) best = std::move(candidate);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::DegenerateCorrespondence) throw;
    }
  }
  return best;
}

}  // namespace lanefuse
