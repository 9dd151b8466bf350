/* Copyright 2026 The LDO Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
#include "ldo/geometry.hpp"

#include <cmath>
#include <numbers>

#include "ldo/error.hpp"

namespace ldo {

RigidTransform::RigidTransform(const Quat& rotation, const Vec3& translation)
    : rotation_(rotation), translation_(translation) {
  const double norm = rotation_.norm();
  if (!std::isfinite(norm) || norm == 0.0 || !translation_.allFinite()) {
    throw Error(ErrorCode::kInvariantViolation,
                "rigid transform needs a finite nonzero quaternion and a "
                "finite translation");
  }
  if (std::abs(norm - 1.0) > 1e-12) rotation_.normalize();
}

RigidTransform RigidTransform::FromYaw(double yaw, const Vec3& translation) {
  return {Quat(Eigen::AngleAxisd(yaw, Vec3::UnitZ())), translation};
}

RigidTransform Compose(const RigidTransform& a, const RigidTransform& b) {
  return {a.rotation() * b.rotation(), a.rotation() * b.translation() + a.translation()};
}

RigidTransform Invert(const RigidTransform& t) {
  const Quat inv = t.rotation().conjugate();
  return {inv, -(inv * t.translation())};
}

std::vector<Vec3> Apply(const RigidTransform& t, std::span<const Vec3> points) {
  std::vector<Vec3> out;
  out.reserve(points.size());
  for (const Vec3& p : points) out.push_back(t.Apply(p));
  return out;
}

double NormalizeYaw(double yaw) {
  constexpr double kPi = std::numbers::pi;
  if (yaw > -kPi && yaw <= kPi) return yaw;
  double wrapped = std::remainder(yaw, 2.0 * kPi);  // [-pi, pi]
  if (wrapped <= -kPi) wrapped += 2.0 * kPi;
  return wrapped;
}

OrientedBox::OrientedBox(const Vec3& center_in, const Vec3& size_in,
                         double yaw_in, std::string track_id_in,
                         std::uint16_t label_in)
    : center(center_in),
      size(size_in),
      yaw(NormalizeYaw(yaw_in)),
      track_id(std::move(track_id_in)),
      label(label_in) {
  if (!center.allFinite() || !std::isfinite(yaw_in)) {
    throw Error(ErrorCode::kInvariantViolation,
                "box '" + track_id + "': non-finite center or yaw");
  }
  if (!(size.x() > 0.0 && size.y() > 0.0 && size.z() > 0.0) || !size.allFinite()) {
    throw Error(ErrorCode::kInvariantViolation,
                "box '" + track_id + "': size components must be positive");
  }
}

Vec3 OrientedBox::ToCanonical(const Vec3& p) const {
  const double c = std::cos(yaw);
  const double s = std::sin(yaw);
  const Vec3 d = p - center;
  return {c * d.x() + s * d.y(), -s * d.x() + c * d.y(), d.z()};
}

Vec3 OrientedBox::FromCanonical(const Vec3& q) const {
  const double c = std::cos(yaw);
  const double s = std::sin(yaw);
  return {c * q.x() - s * q.y() + center.x(), s * q.x() + c * q.y() + center.y(),
          q.z() + center.z()};
}

bool OrientedBox::Contains(const Vec3& p, double margin) const {
  const Vec3 q = ToCanonical(p);
  const Vec3 half = 0.5 * size + Vec3::Constant(margin);
  return std::abs(q.x()) <= half.x() && std::abs(q.y()) <= half.y() &&
         std::abs(q.z()) <= half.z();
}

OrientedBox TransformBox(const RigidTransform& t, const OrientedBox& box) {
  const Vec3 heading = t.rotation() * Vec3(std::cos(box.yaw), std::sin(box.yaw), 0.0);
  return {t.Apply(box.center), box.size, std::atan2(heading.y(), heading.x()),
          box.track_id, box.label};
}

std::vector<bool> PointsInBox(std::span<const Vec3> points,
                              const OrientedBox& box, double margin) {
  std::vector<bool> mask(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    mask[i] = box.Contains(points[i], margin);
  }
  return mask;
}

}  // namespace ldo
