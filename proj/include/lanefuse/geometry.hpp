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
#include <span>
#include <vector>

#include <Eigen/Core>

namespace lanefuse {

/// Map-frame point in meters.
struct Point3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  bool operator==(const Point3&) const = default;
  Eigen::Vector3d vec() const { return {x, y, z}; }
  static Point3 from(const Eigen::Vector3d& v) { return {v.x(), v.y(), v.z()}; }
};

double distance(const Point3& a, const Point3& b);

/// p -> R p + t with R a proper rotation.
struct RigidTransform {
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();

  static RigidTransform identity() { return {}; }
  static RigidTransform about_z(double radians, const Eigen::Vector3d& t);

  Point3 apply(const Point3& p) const;
  RigidTransform inverse() const;
  /// (*this) after `first`: p -> this(first(p)).
  RigidTransform compose(const RigidTransform& first) const;

  /// R^T R = I and det R = 1, both within `tol`.
  bool is_valid(double tol = 1e-9) const;
};

/// Non-owning structure-of-arrays view consumed by the distance kernels.
struct PointsView {
  const double* x = nullptr;
  const double* y = nullptr;
  const double* z = nullptr;
  std::size_t size = 0;
};

/// Owning structure-of-arrays point set.
class PointCloud {
 public:
  PointCloud() = default;
  explicit PointCloud(std::span<const Point3> points);

  void reserve(std::size_t n);
  void push_back(const Point3& p);
  void clear();

  std::size_t size() const { return x_.size(); }
  bool empty() const { return x_.empty(); }
  Point3 operator[](std::size_t i) const { return {x_[i], y_[i], z_[i]}; }

  PointsView view() const { return {x_.data(), y_.data(), z_.data(), x_.size()}; }
  std::vector<Point3> points() const;

  PointCloud transformed(const RigidTransform& t) const;

 private:
  std::vector<double> x_, y_, z_;
};

/// Segments a -> a + d stored as arrays; inv_len2 = 1/|d|^2 (0 for a degenerate segment).
struct SegmentsView {
  const double* ax = nullptr;
  const double* ay = nullptr;
  const double* az = nullptr;
  const double* dx = nullptr;
  const double* dy = nullptr;
  const double* dz = nullptr;
  const double* inv_len2 = nullptr;
  std::size_t size = 0;
};

class SegmentSet {
 public:
  /// Appends the segments of a polyline; `owner` is recorded per segment.
  void add_polyline(std::span<const Point3> points, std::size_t owner);

  std::size_t size() const { return ax_.size(); }
  std::size_t owner(std::size_t i) const { return owner_[i]; }
  Point3 start(std::size_t i) const { return {ax_[i], ay_[i], az_[i]}; }
  Point3 end(std::size_t i) const { return {ax_[i] + dx_[i], ay_[i] + dy_[i], az_[i] + dz_[i]}; }
  SegmentsView view() const;

 private:
  std::vector<double> ax_, ay_, az_, dx_, dy_, dz_, inv_len2_;
  std::vector<std::size_t> owner_;
};

}  // namespace lanefuse
