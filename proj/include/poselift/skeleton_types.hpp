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
#include <string_view>

#include <Eigen/Core>

namespace poselift {

inline constexpr std::size_t kNumJoints = 16;

/// MPII joint order. The numeric value is the on-disk index.
enum class JointId : int {
  RAnkle = 0,
  RKnee = 1,
  RHip = 2,
  LHip = 3,
  LKnee = 4,
  LAnkle = 5,
  Pelvis = 6,
  Thorax = 7,
  Neck = 8,
  Head = 9,
  RWrist = 10,
  RElbow = 11,
  RShoulder = 12,
  LShoulder = 13,
  LElbow = 14,
  LWrist = 15,
};

constexpr std::size_t index(JointId j) { return static_cast<std::size_t>(j); }

enum class JointGroup : int { Torso = 0, Proximal = 1, Distal = 2 };

inline constexpr std::array<JointId, 7> kTorsoJoints = {
    JointId::Pelvis, JointId::RHip,      JointId::LHip,     JointId::Thorax,
    JointId::Neck,   JointId::RShoulder, JointId::LShoulder};
inline constexpr std::array<JointId, 5> kProximalJoints = {
    JointId::Head, JointId::RElbow, JointId::LElbow, JointId::RKnee,
    JointId::LKnee};
inline constexpr std::array<JointId, 4> kDistalJoints = {
    JointId::RWrist, JointId::LWrist, JointId::RAnkle, JointId::LAnkle};

JointGroup group_of(JointId j);
std::string_view joint_name(JointId j);
std::string_view group_name(JointGroup g);

/// Group members in the order their coordinates are laid out in group
/// tensors.
std::span<const JointId> group_joints(JointGroup g);

/// Kinematic parent of each joint; the pelvis is its own parent.
JointId parent_of(JointId j);

using Vec3 = Eigen::Vector3d;
using Vec2 = Eigen::Vector2d;

}  // namespace poselift
