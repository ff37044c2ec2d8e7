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

// Test-only reference implementations. Nothing here calls into the code
// paths it is used to check.

#pragma once

#include <array>
#include <cmath>
#include <algorithm>
#include <random>

#include <Eigen/Geometry>

#include "poselift/attributes.hpp"
#include "poselift/skeleton.hpp"

namespace oracle {

using poselift::Vec3;

/// Cyclic Jacobi eigen-decomposition of a symmetric 3x3 matrix. Returns
/// eigenvalues ascending with matching unit eigenvectors.
struct Eigen3 {
  std::array<double, 3> values;
  std::array<Vec3, 3> vectors;
};

inline Eigen3 jacobi_eigen(std::array<std::array<double, 3>, 3> a) {
  std::array<std::array<double, 3>, 3> v{};
  for (int i = 0; i < 3; ++i) v[i][i] = 1.0;
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = std::abs(a[0][1]) + std::abs(a[0][2]) + std::abs(a[1][2]);
    if (off < 1e-300) break;
    for (int p = 0; p < 2; ++p)
      for (int q = p + 1; q < 3; ++q) {
        if (std::abs(a[p][q]) < 1e-300) continue;
        const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int k = 0; k < 3; ++k) {
          const double akp = a[k][p], akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (int k = 0; k < 3; ++k) {
          const double apk = a[p][k], aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
        for (int k = 0; k < 3; ++k) {
          const double vkp = v[k][p], vkq = v[k][q];
          v[k][p] = c * vkp - s * vkq;
          v[k][q] = s * vkp + c * vkq;
        }
      }
  }
  std::array<int, 3> order = {0, 1, 2};
  std::sort(order.begin(), order.end(), [&](int x, int y) { return a[x][x] < a[y][y]; });
  Eigen3 out;
  for (int i = 0; i < 3; ++i) {
    out.values[i] = a[order[i]][order[i]];
    out.vectors[i] = Vec3(v[0][order[i]], v[1][order[i]], v[2][order[i]]).normalized();
  }
  return out;
}

/// Least-squares plane as (point on plane, unit normal).
struct PointNormal {
  Vec3 point;
  Vec3 normal;
};

template <typename Points>
PointNormal odr_plane(const Points& pts) {
  Vec3 c = Vec3::Zero();
  for (const auto& p : pts) c += p;
  c /= static_cast<double>(pts.size());
  std::array<std::array<double, 3>, 3> m{};
  for (const auto& p : pts) {
    const Vec3 d = p - c;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) m[i][j] += d(i) * d(j);
  }
  return {c, jacobi_eigen(m).vectors[0]};
}

template <typename Points>
double residual(const PointNormal& pl, const Points& pts) {
  double r = 0.0;
  for (const auto& p : pts) {
    const double d = (p - pl.point).dot(pl.normal) / pl.normal.norm();
    r += d * d;
  }
  return r;
}

/// Attribute labels recomputed from scratch: Jacobi plane over the five
/// anchors, front chosen by the hip x spine cross product, distance by
/// projection onto the normal relative to the anchor centroid.
inline poselift::AttributeVector labels(const poselift::Pose3D& p, double tau) {
  using poselift::JointId;
  const std::array<Vec3, 5> anchors = {p[JointId::LShoulder], p[JointId::RShoulder],
                                       p[JointId::LHip], p[JointId::RHip],
                                       p[JointId::Pelvis]};
  PointNormal pl = odr_plane(anchors);
  const Vec3 front = (p[JointId::LHip] - p[JointId::RHip])
                         .cross(p[JointId::Thorax] - p[JointId::Pelvis]);
  const double sign = pl.normal.dot(front) < 0.0 ? -1.0 : 1.0;
  poselift::AttributeVector out;
  for (std::size_t k = 0; k < poselift::kNumAttributeJoints; ++k) {
    const double d = sign * (p[poselift::kAttributeJoints[k]] - pl.point).dot(pl.normal);
    const double dist = std::abs(d);
    if (dist <= tau)
      out.labels[k] = poselift::Attribute::OnPlane;
    else
      out.labels[k] = d > 0 ? poselift::Attribute::Front : poselift::Attribute::Back;
  }
  return out;
}

/// Uniformly distributed rotation from a normalised Gaussian quaternion.
template <typename Rng>
Eigen::Matrix3d random_rotation(Rng& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::Quaterniond q(n(rng), n(rng), n(rng), n(rng));
  q.normalize();
  return q.toRotationMatrix();
}

template <typename Rng>
Vec3 random_unit(Rng& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  return Vec3(n(rng), n(rng), n(rng)).normalized();
}

}  // namespace oracle
