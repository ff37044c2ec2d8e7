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

#include "poselift/geometry.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "poselift/error.hpp"

namespace poselift {

namespace {

constexpr double kDegenerateRelTol = 1e-9;

}  // namespace

Plane fit_plane(std::span<const Vec3> points) {
  if (points.size() < 3) throw DegenerateError("plane fit needs at least 3 points");
  Vec3 centroid = Vec3::Zero();
  for (const auto& x : points) centroid += x;
  centroid /= static_cast<double>(points.size());
  Eigen::Matrix3d scatter = Eigen::Matrix3d::Zero();
  for (const auto& x : points) {
    const Vec3 c = x - centroid;
    scatter += c * c.transpose();
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(scatter);
  const Vec3 ev = eig.eigenvalues();  // ascending
  if (!(ev(2) > 0.0) || ev(1) - ev(0) <= kDegenerateRelTol * ev(2))
    throw DegenerateError("plane anchors are collinear or coincident");
  Plane pl;
  pl.normal = eig.eigenvectors().col(0).normalized();
  pl.offset = -pl.normal.dot(centroid);
  return pl;
}

double plane_residual(const Plane& pl, std::span<const Vec3> points) {
  double r = 0.0;
  for (const auto& x : points) {
    const double d = signed_distance(pl, x);
    r += d * d;
  }
  return r;
}

Plane orient_plane(const Plane& pl, const Pose3D& p) {
  const Vec3 hip_axis = p[JointId::LHip] - p[JointId::RHip];
  const Vec3 spine = p[JointId::Thorax] - p[JointId::Pelvis];
  const Vec3 front = hip_axis.cross(spine);
  if (!(front.norm() > 1e-12 * hip_axis.norm() * spine.norm()))
    throw DegenerateError("hip axis and spine are parallel; front is undefined");
  if (pl.normal.dot(front) < 0.0) return Plane{-pl.normal, -pl.offset};
  return pl;
}

Plane fit_torso_plane(const Pose3D& p) {
  std::array<Vec3, kPlaneAnchors.size()> anchors;
  for (std::size_t k = 0; k < anchors.size(); ++k) anchors[k] = p[kPlaneAnchors[k]];
  return orient_plane(fit_plane(anchors), p);
}

double TauSpec::resolve(const Pose3D& p) const {
  if (mode == Mode::Absolute) return value;
  return value * (p[JointId::Thorax] - p[JointId::Pelvis]).norm();
}

void TauSpec::validate() const {
  if (!(value > 0.0) || !std::isfinite(value))
    throw ConfigError("tau must be a finite value > 0");
}

AttributeVector compute_attributes(const Pose3D& p, double tau_mm) {
  if (!(tau_mm > 0.0)) throw ConfigError("tau must be > 0");
  const Plane pl = fit_torso_plane(p);
  AttributeVector out;
  for (std::size_t k = 0; k < kNumAttributeJoints; ++k) {
    const double d = signed_distance(pl, p[kAttributeJoints[k]]);
    if (d > tau_mm) {
      out.labels[k] = Attribute::Front;
    } else if (d < -tau_mm) {
      out.labels[k] = Attribute::Back;
    } else {
      out.labels[k] = Attribute::OnPlane;
    }
  }
  return out;
}

AttributeVector compute_attributes(const Pose3D& p, const TauSpec& tau) {
  tau.validate();
  const double mm = tau.resolve(p);
  if (!(mm > 0.0)) throw DegenerateError("thorax and pelvis coincide; relative tau is undefined");
  return compute_attributes(p, mm);
}

Pose3D procrustes_align(const Pose3D& pred, const Pose3D& gt,
                        bool with_scale) {
  Vec3 mu_p = Vec3::Zero();
  Vec3 mu_g = Vec3::Zero();
  for (std::size_t k = 0; k < kNumJoints; ++k) {
    mu_p += pred.joints[k];
    mu_g += gt.joints[k];
  }
  mu_p /= static_cast<double>(kNumJoints);
  mu_g /= static_cast<double>(kNumJoints);

  Eigen::Matrix3d cross = Eigen::Matrix3d::Zero();
  double pred_sq = 0.0;
  for (std::size_t k = 0; k < kNumJoints; ++k) {
    const Vec3 a = pred.joints[k] - mu_p;
    const Vec3 b = gt.joints[k] - mu_g;
    cross += a * b.transpose();
    pred_sq += a.squaredNorm();
  }
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(cross,
                                        Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vec3 sv = svd.singularValues();
  if (!(sv(0) > 0.0) || sv(1) <= 1e-12 * sv(0))
    throw DegenerateError("procrustes: cross-covariance is rank deficient");
  const Eigen::Matrix3d U = svd.matrixU();
  const Eigen::Matrix3d V = svd.matrixV();
  Vec3 d(1.0, 1.0, (V * U.transpose()).determinant() < 0.0 ? -1.0 : 1.0);
  const Eigen::Matrix3d R = V * d.asDiagonal() * U.transpose();
  const double s = with_scale ? sv.dot(d) / pred_sq : 1.0;

  Pose3D out;
  for (std::size_t k = 0; k < kNumJoints; ++k)
    out.joints[k] = s * (R * (pred.joints[k] - mu_p)) + mu_g;
  return out;
}

Pose3D root_relative(const Pose3D& p) {
  Pose3D out;
  const Vec3 root = p[JointId::Pelvis];
  for (std::size_t k = 0; k < kNumJoints; ++k) out.joints[k] = p.joints[k] - root;
  return out;
}

}  // namespace poselift
