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
#include <cstddef>
#include <span>
#include <vector>

#include "poselift/attributes.hpp"
#include "poselift/autodiff/tensor.hpp"
#include "poselift/skeleton.hpp"

namespace poselift::model {

inline constexpr std::size_t kCoordDim = 2 * kNumJoints;
inline constexpr std::size_t kAttrProbDim = kNumAttributeJoints * kNumAttributeClasses;
inline constexpr std::size_t kEvidenceDim = kCoordDim + kAttrProbDim;

/// 3D quantities inside the networks are root-relative metres.
inline constexpr double kInternalScale = 1e-3;

/// Class probabilities per attribute joint, J order, classes F/O/B.
using AttrProbs = std::array<std::array<double, kNumAttributeClasses>, kNumAttributeJoints>;

AttrProbs one_hot(const AttributeVector& a);
AttributeVector argmax_labels(const AttrProbs& p);

/// Builds a Pose2D from an explicitly ordered joint list. The order must be
/// the fixed MPII layout; anything else throws ShapeError.
Pose2D make_pose2d(std::span<const JointId> order, std::span<const Vec2> coords,
                   double width, double height);

/// Image coordinates mapped to [-1, 1] by image size: 2x/w - 1, 2y/h - 1.
std::array<double, kCoordDim> normalize_coords(const Pose2D& p);

/// Network input: 32 normalised coordinates (x, y per joint, MPII order)
/// followed by 27 attribute probabilities (J order, F/O/B per joint).
struct EvidenceVector {
  std::array<double, kEvidenceDim> values{};

  std::span<const double> coords() const { return {values.data(), kCoordDim}; }
  std::span<const double> attributes() const {
    return {values.data() + kCoordDim, kAttrProbDim};
  }
};

/// Throws DataError when a triple has a negative entry or does not sum to 1
/// within 1e-9.
EvidenceVector encode_evidence(const Pose2D& p, const AttrProbs& probs);

inline constexpr std::size_t group_dim(JointGroup g) {
  return g == JointGroup::Torso ? 21 : g == JointGroup::Proximal ? 15 : 12;
}

/// Joint coordinates laid out per group in group_joints() order.
std::array<std::vector<double>, 3> split_groups(const Pose3D& p);

/// Inverse of split_groups for root-relative poses. The pelvis is forced to
/// the origin whatever its group entry holds.
Pose3D assemble_pose(std::span<const double> torso, std::span<const double> proximal,
                     std::span<const double> distal);

// Batched forms over record indices.

/// [n x 32] normalised coordinates.
ad::Tensor coord_batch(const Dataset& ds, std::span<const std::size_t> idx);
/// [n x 27] probabilities.
ad::Tensor attr_batch(std::span<const AttrProbs> probs);
/// Root-relative ground truth per group, scaled to internal units.
std::array<ad::Tensor, 3> target_batch(const Dataset& ds, std::span<const std::size_t> idx);
/// Row `row` of three group tensors in internal units, as a pose in mm.
Pose3D assemble_row(const std::array<ad::Tensor, 3>& groups, std::size_t row);

}  // namespace poselift::model
