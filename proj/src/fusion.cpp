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

#include "lanefuse/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <unordered_set>

#include <Eigen/Eigenvalues>

#include "lanefuse/error.hpp"

namespace lanefuse {

void FusionParams::validate() const {
  dbscan.validate();
  icp.validate();
  if (!(bin_size > 0.0) || !std::isfinite(bin_size)) {
    throw Error(ErrorCode::Config, "fusion.bin_size must be a positive finite number");
  }
}

LocalMap apply_transform(const RigidTransform& t, const LocalMap& map) {
  LocalMap out = map;
  for (auto& lane : out.lane_lines) {
    for (auto& p : lane.points) p = t.apply(p);
  }
  return out;
}

std::vector<Point3> cluster_polyline(std::span<const Point3> points, double bin_size) {
  if (points.empty()) return {};
  const auto n = static_cast<double>(points.size());
  double cx = 0.0, cy = 0.0;
  for (const auto& p : points) {
    cx += p.x;
    cy += p.y;
  }
  cx /= n;
  cy /= n;
  Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
  for (const auto& p : points) {
    const Eigen::Vector2d d(p.x - cx, p.y - cy);
    cov += d * d.transpose();
  }
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(cov / n);
  Eigen::Vector2d axis = eig.eigenvectors().col(1);
  // Fix the sign so the output direction does not depend on the solver.
  if (axis.x() < 0.0 || (axis.x() == 0.0 && axis.y() < 0.0)) axis = -axis;

  std::vector<double> s(points.size());
  double s_min = INFINITY;
  for (std::size_t i = 0; i < points.size(); ++i) {
    s[i] = (points[i].x - cx) * axis.x() + (points[i].y - cy) * axis.y();
    s_min = std::min(s_min, s[i]);
  }

  struct Acc {
    double x = 0.0, y = 0.0, z = 0.0;
    std::size_t n = 0;
  };
  std::map<long long, Acc> bins;
  for (std::size_t i = 0; i < points.size(); ++i) {
    auto& b = bins[static_cast<long long>(std::floor((s[i] - s_min) / bin_size))];
    b.x += points[i].x;
    b.y += points[i].y;
    b.z += points[i].z;
    ++b.n;
  }
  std::vector<Point3> out;
  out.reserve(bins.size());
  for (const auto& [_, b] : bins) {
    const auto m = static_cast<double>(b.n);
    const Point3 c{b.x / m, b.y / m, b.z / m};
    if (out.empty() || !(out.back() == c)) out.push_back(c);
  }
  return out;
}

FusionResult fuse_aligned(std::span<const LocalMap> aligned, const LocalMap& modified,
                          const FusionParams& params) {
  params.validate();
  if (aligned.empty()) throw Error(ErrorCode::InvalidInput, "fusion needs at least one selected map");
  PointCloud pooled;
  // Lane index in `modified` for the leading points, -1 for crowd points.
  std::vector<int> origin;
  for (std::size_t l = 0; l < modified.lane_lines.size(); ++l) {
    for (const auto& p : modified.lane_lines[l].points) {
      pooled.push_back(p);
      origin.push_back(static_cast<int>(l));
    }
  }
  for (const auto& m : aligned) {
    for (const auto& lane : m.lane_lines) {
      for (const auto& p : lane.points) {
        pooled.push_back(p);
        origin.push_back(-1);
      }
    }
  }
  if (pooled.empty()) throw Error(ErrorCode::EmptyFusion, "fusion: no lane points to fuse");

  const DbscanResult clusters = dbscan(pooled, params.dbscan);
  FusionResult result;
  result.diagnostics.pooled_points = pooled.size();
  result.diagnostics.clusters = clusters.cluster_count;

  std::vector<std::vector<Point3>> members(static_cast<std::size_t>(clusters.cluster_count));
  std::vector<std::map<int, std::size_t>> votes(members.size());
  for (std::size_t i = 0; i < pooled.size(); ++i) {
    const int label = clusters.labels[i];
    if (label == kNoiseLabel) {
      ++result.diagnostics.noise_points;
      continue;
    }
    members[label].push_back(pooled[i]);
    if (origin[i] >= 0) ++votes[label][origin[i]];
  }

  LocalMap& fused = result.fused;
  fused.map_id = modified.map_id.empty() ? "fused" : modified.map_id + ".fused";
  fused.link_area_id = modified.link_area_id;
  std::unordered_set<std::string> used;
  for (std::size_t c = 0; c < members.size(); ++c) {
    auto line = cluster_polyline(members[c], params.bin_size);
    if (line.size() < 2) continue;
    std::string id = "F" + std::to_string(c);
    if (!votes[c].empty()) {
      const auto best = std::max_element(votes[c].begin(), votes[c].end(), [](const auto& a, const auto& b) {
        return a.second < b.second || (a.second == b.second && a.first > b.first);
      });
      id = modified.lane_lines[best->first].lane_id;
    }
    if (used.count(id)) {
      int k = 2;
      while (used.count(id + "#" + std::to_string(k))) ++k;
      id += "#" + std::to_string(k);
    }
    used.insert(id);
    fused.lane_lines.push_back({id, std::move(line), {}});
  }
  return result;
}

FusionResult fuse_maps(std::span<const LocalMap> selected, const LocalMap& modified,
                       const FusionParams& params) {
  params.validate();
  if (selected.empty()) throw Error(ErrorCode::InvalidInput, "fusion needs at least one selected map");
  const PointCloud target = modified.cloud();
  std::vector<LocalMap> aligned;
  std::vector<IcpResult> fits;
  aligned.reserve(selected.size());
  for (const auto& m : selected) {
    IcpResult fit = icp_align(m.cloud(), target, params.icp);
    aligned.push_back(apply_transform(fit.transform, m));
    fits.push_back(std::move(fit));
  }
  FusionResult r = fuse_aligned(aligned, modified, params);
  r.diagnostics.alignments = std::move(fits);
  return r;
}

}  // namespace lanefuse
