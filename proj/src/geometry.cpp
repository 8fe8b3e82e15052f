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

#include "lanefuse/geometry.hpp"

#include <cmath>

#include <Eigen/Geometry>

namespace lanefuse {

double distance(const Point3& a, const Point3& b) {
  const double dx = a.x - b.x, dy = a.y - b.y, dz = a.z - b.z;
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

RigidTransform RigidTransform::about_z(double radians, const Eigen::Vector3d& t) {
  RigidTransform out;
  out.rotation = Eigen::AngleAxisd(radians, Eigen::Vector3d::UnitZ()).toRotationMatrix();
  out.translation = t;
  return out;
}

Point3 RigidTransform::apply(const Point3& p) const {
  return Point3::from(rotation * p.vec() + translation);
}

RigidTransform RigidTransform::inverse() const {
  RigidTransform out;
  out.rotation = rotation.transpose();
  out.translation = -(out.rotation * translation);
  return out;
}

RigidTransform RigidTransform::compose(const RigidTransform& first) const {
  RigidTransform out;
  out.rotation = rotation * first.rotation;
  out.translation = rotation * first.translation + translation;
  return out;
}

bool RigidTransform::is_valid(double tol) const {
  const double ortho = (rotation.transpose() * rotation - Eigen::Matrix3d::Identity()).norm();
  return ortho <= tol && std::abs(rotation.determinant() - 1.0) <= tol &&
         translation.allFinite();
}

PointCloud::PointCloud(std::span<const Point3> points) {
  reserve(points.size());
  for (const auto& p : points) push_back(p);
}

void PointCloud::reserve(std::size_t n) {
  x_.reserve(n);
  y_.reserve(n);
  z_.reserve(n);
}

void PointCloud::push_back(const Point3& p) {
  x_.push_back(p.x);
  y_.push_back(p.y);
  z_.push_back(p.z);
}

void PointCloud::clear() {
  x_.clear();
  y_.clear();
  z_.clear();
}

std::vector<Point3> PointCloud::points() const {
  std::vector<Point3> out;
  out.reserve(size());
  for (std::size_t i = 0; i < size(); ++i) out.push_back((*this)[i]);
  return out;
}

PointCloud PointCloud::transformed(const RigidTransform& t) const {
  PointCloud out;
  out.reserve(size());
  for (std::size_t i = 0; i < size(); ++i) out.push_back(t.apply((*this)[i]));
  return out;
}

void SegmentSet::add_polyline(std::span<const Point3> points, std::size_t owner) {
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    const Point3& a = points[i];
    const Point3& b = points[i + 1];
    const double dx = b.x - a.x, dy = b.y - a.y, dz = b.z - a.z;
    const double len2 = dx * dx + dy * dy + dz * dz;
    ax_.push_back(a.x);
    ay_.push_back(a.y);
    az_.push_back(a.z);
    dx_.push_back(dx);
    dy_.push_back(dy);
    dz_.push_back(dz);
    inv_len2_.push_back(len2 > 0.0 ? 1.0 / len2 : 0.0);
    owner_.push_back(owner);
  }
}

SegmentsView SegmentSet::view() const {
  return {ax_.data(), ay_.data(), az_.data(), dx_.data(), dy_.data(),
          dz_.data(), inv_len2_.data(), ax_.size()};
}

}  // namespace lanefuse
