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

#include "poselift/model/evidence.hpp"

#include <cmath>
#include <string>

#include "poselift/error.hpp"
#include "poselift/geometry.hpp"

namespace poselift::model {

AttrProbs one_hot(const AttributeVector& a) {
  AttrProbs p{};
  for (std::size_t j = 0; j < kNumAttributeJoints; ++j)
    p[j][static_cast<std::size_t>(a.labels[j])] = 1.0;
  return p;
}

AttributeVector argmax_labels(const AttrProbs& p) {
  AttributeVector a;
  for (std::size_t j = 0; j < kNumAttributeJoints; ++j) {
    std::size_t best = 0;
    for (std::size_t c = 1; c < kNumAttributeClasses; ++c)
      if (p[j][c] > p[j][best]) best = c;
    a.labels[j] = static_cast<Attribute>(best);
  }
  return a;
}

Pose2D make_pose2d(std::span<const JointId> order, std::span<const Vec2> coords,
                   double width, double height) {
  if (order.size() != kNumJoints || coords.size() != kNumJoints)
    throw ShapeError("expected " + std::to_string(kNumJoints) + " joints, got " +
                     std::to_string(order.size()));
  Pose2D p;
  for (std::size_t k = 0; k < kNumJoints; ++k) {
    if (index(order[k]) != k)
      throw ShapeError("joint " + std::to_string(k) + " is " +
                       std::string(joint_name(order[k])) + ", expected " +
                       std::string(joint_name(static_cast<JointId>(k))));
    p.joints[k] = coords[k];
  }
  p.width = width;
  p.height = height;
  return p;
}

std::array<double, kCoordDim> normalize_coords(const Pose2D& p) {
  if (!(p.width > 0.0) || !(p.height > 0.0))
    throw DataError("image size must be positive");
  std::array<double, kCoordDim> out{};
  for (std::size_t k = 0; k < kNumJoints; ++k) {
    out[2 * k] = 2.0 * p.joints[k].x() / p.width - 1.0;
    out[2 * k + 1] = 2.0 * p.joints[k].y() / p.height - 1.0;
  }
  return out;
}

EvidenceVector encode_evidence(const Pose2D& p, const AttrProbs& probs) {
  EvidenceVector e;
  const auto c = normalize_coords(p);
  std::copy(c.begin(), c.end(), e.values.begin());
  for (std::size_t j = 0; j < kNumAttributeJoints; ++j) {
    double s = 0.0;
    for (std::size_t k = 0; k < kNumAttributeClasses; ++k) {
      const double v = probs[j][k];
      if (!(v >= 0.0)) throw DataError("attribute probabilities must be non-negative");
      s += v;
      e.values[kCoordDim + 3 * j + k] = v;
    }
    if (std::abs(s - 1.0) > 1e-9)
      throw DataError("attribute probabilities of " +
                      std::string(joint_name(kAttributeJoints[j])) + " sum to " +
                      std::to_string(s));
  }
  return e;
}

std::array<std::vector<double>, 3> split_groups(const Pose3D& p) {
  std::array<std::vector<double>, 3> out;
  for (int g = 0; g < 3; ++g)
    for (JointId j : group_joints(static_cast<JointGroup>(g)))
      for (int a = 0; a < 3; ++a) out[g].push_back(p[j][a]);
  return out;
}

Pose3D assemble_pose(std::span<const double> torso, std::span<const double> proximal,
                     std::span<const double> distal) {
  const std::array<std::span<const double>, 3> parts{torso, proximal, distal};
  Pose3D p;
  for (int g = 0; g < 3; ++g) {
    const auto grp = static_cast<JointGroup>(g);
    if (parts[g].size() != group_dim(grp))
      throw ShapeError(std::string(group_name(grp)) + " group needs " +
                       std::to_string(group_dim(grp)) + " values, got " +
                       std::to_string(parts[g].size()));
    const auto joints = group_joints(grp);
    for (std::size_t k = 0; k < joints.size(); ++k)
      p[joints[k]] = Vec3(parts[g][3 * k], parts[g][3 * k + 1], parts[g][3 * k + 2]);
  }
  p[JointId::Pelvis] = Vec3::Zero();
  return p;
}

ad::Tensor coord_batch(const Dataset& ds, std::span<const std::size_t> idx) {
  ad::Tensor t({idx.size(), kCoordDim});
  for (std::size_t r = 0; r < idx.size(); ++r) {
    const auto c = normalize_coords(ds.records.at(idx[r]).pose2d);
    std::copy(c.begin(), c.end(), t.data() + r * kCoordDim);
  }
  return t;
}

ad::Tensor attr_batch(std::span<const AttrProbs> probs) {
  ad::Tensor t({probs.size(), kAttrProbDim});
  for (std::size_t r = 0; r < probs.size(); ++r)
    for (std::size_t j = 0; j < kNumAttributeJoints; ++j)
      for (std::size_t k = 0; k < kNumAttributeClasses; ++k)
        t.at(r, 3 * j + k) = probs[r][j][k];
  return t;
}

std::array<ad::Tensor, 3> target_batch(const Dataset& ds, std::span<const std::size_t> idx) {
  std::array<ad::Tensor, 3> out;
  for (int g = 0; g < 3; ++g)
    out[g] = ad::Tensor({idx.size(), group_dim(static_cast<JointGroup>(g))});
  for (std::size_t r = 0; r < idx.size(); ++r) {
    const SampleRecord& rec = ds.records.at(idx[r]);
    if (!rec.pose3d) throw DataError("record '" + rec.id + "' has no 3D pose");
    const auto groups = split_groups(root_relative(*rec.pose3d));
    for (int g = 0; g < 3; ++g)
      for (std::size_t c = 0; c < groups[g].size(); ++c)
        out[g].at(r, c) = groups[g][c] * kInternalScale;
  }
  return out;
}

Pose3D assemble_row(const std::array<ad::Tensor, 3>& groups, std::size_t row) {
  std::array<std::vector<double>, 3> mm;
  for (int g = 0; g < 3; ++g) {
    const std::size_t n = groups[g].cols();
    mm[g].resize(n);
    for (std::size_t c = 0; c < n; ++c) mm[g][c] = groups[g].at(row, c) / kInternalScale;
  }
  return assemble_pose(mm[0], mm[1], mm[2]);
}

}  // namespace poselift::model
