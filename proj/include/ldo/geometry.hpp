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
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace ldo {

using Vec3 = Eigen::Vector3d;
using Quat = Eigen::Quaterniond;

// Rigid-body transform x' = R x + t. The rotation is kept as a unit
// quaternion; construction normalizes it unless it is already within 1e-12
// of unit length, so that serialized transforms reload bit-exactly.
class RigidTransform {
 public:
  RigidTransform() : rotation_(Quat::Identity()), translation_(Vec3::Zero()) {}
  RigidTransform(const Quat& rotation, const Vec3& translation);

  static RigidTransform Identity() { return {}; }
  static RigidTransform FromYaw(double yaw, const Vec3& translation = Vec3::Zero());

  const Quat& rotation() const { return rotation_; }
  const Vec3& translation() const { return translation_; }

  Vec3 Apply(const Vec3& p) const { return rotation_ * p + translation_; }

 private:
  Quat rotation_;
  Vec3 translation_;
};

// Result applies `b` first, then `a`.
RigidTransform Compose(const RigidTransform& a, const RigidTransform& b);
RigidTransform Invert(const RigidTransform& t);
std::vector<Vec3> Apply(const RigidTransform& t, std::span<const Vec3> points);

// Wraps an angle into (-pi, pi]. Angles already in range are returned as-is.
double NormalizeYaw(double yaw);

// Yaw-only oriented box. `size` is (length, width, height) along the box's
// local x, y, z axes.
struct OrientedBox {
  Vec3 center = Vec3::Zero();
  Vec3 size = Vec3::Ones();
  double yaw = 0.0;
  std::string track_id;
  std::uint16_t label = 0;

  // Validates size > 0 and normalizes yaw. Throws InvariantViolation.
  OrientedBox(const Vec3& center, const Vec3& size, double yaw,
              std::string track_id, std::uint16_t label);
  OrientedBox() = default;

  // Point expressed in the box frame: translate by -center, rotate by -yaw.
  Vec3 ToCanonical(const Vec3& p) const;
  // Inverse of ToCanonical.
  Vec3 FromCanonical(const Vec3& c) const;
  bool Contains(const Vec3& p, double margin = 0.0) const;
};

// Moves a box along with a yaw-only rigid change of frame. The rotation of
// `t` must be about z; roll or pitch would leave the box unrepresentable.
OrientedBox TransformBox(const RigidTransform& t, const OrientedBox& box);

// mask[i] is true iff points[i] lies inside `box` grown by `margin` on each
// side. The boundary is closed.
std::vector<bool> PointsInBox(std::span<const Vec3> points,
                              const OrientedBox& box, double margin = 0.0);

}  // namespace ldo
