// Copyright 2026 The poselift Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <array>

#include "poselift/attributes.hpp"
#include "poselift/skeleton.hpp"

namespace poselift {

/// {x : normal . x + offset = 0}, |normal| = 1.
struct Plane {
  Vec3 normal = Vec3::UnitZ();
  double offset = 0.0;
};

/// Joints the torso plane is fitted to.
inline constexpr std::array<JointId, 5> kPlaneAnchors = {
    JointId::LShoulder, JointId::RShoulder, JointId::LHip, JointId::RHip,
    JointId::Pelvis};

/// Orthogonal least-squares plane through the five anchors, oriented with
/// orient_plane. Throws DegenerateError when the anchors do not pin down a
/// unique plane.
Plane fit_torso_plane(const Pose3D& p);

/// Unoriented least-squares plane through arbitrary points (>= 3).
Plane fit_plane(std::span<const Vec3> points);

/// Sum of squared orthogonal distances.
double plane_residual(const Plane& pl, std::span<const Vec3> points);

/// Flips the normal so that it agrees with (l-hip - r-hip) x (thorax - pelvis).
Plane orient_plane(const Plane& pl, const Pose3D& p);

inline double signed_distance(const Plane& pl, const Vec3& x) {
  return pl.normal.dot(x) + pl.offset;
}

/// Threshold separating OnPlane from Front/Back. Relative mode scales with
/// the pelvis-to-thorax distance of the pose being labelled.
struct TauSpec {
  enum class Mode { Relative, Absolute };
  Mode mode = Mode::Relative;
  double value = 0.1;

  static TauSpec relative(double factor) { return {Mode::Relative, factor}; }
  static TauSpec absolute(double mm) { return {Mode::Absolute, mm}; }

  double resolve(const Pose3D& p) const;
  void validate() const;
};

AttributeVector compute_attributes(const Pose3D& p, double tau_mm);
AttributeVector compute_attributes(const Pose3D& p, const TauSpec& tau);

/// Least-squares rigid (or similarity) alignment of `pred` onto `gt`.
Pose3D procrustes_align(const Pose3D& pred, const Pose3D& gt,
                        bool with_scale = false);

Pose3D root_relative(const Pose3D& p);

}  // namespace poselift
