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

#include <cmath>

#include "poselift/attributes.hpp"
#include "poselift/error.hpp"
#include "poselift/skeleton.hpp"

namespace poselift {

JointGroup group_of(JointId j) {
  switch (j) {
    case JointId::Pelvis:
    case JointId::RHip:
    case JointId::LHip:
    case JointId::Thorax:
    case JointId::Neck:
    case JointId::RShoulder:
    case JointId::LShoulder:
      return JointGroup::Torso;
    case JointId::Head:
    case JointId::RElbow:
    case JointId::LElbow:
    case JointId::RKnee:
    case JointId::LKnee:
      return JointGroup::Proximal;
    case JointId::RWrist:
    case JointId::LWrist:
    case JointId::RAnkle:
    case JointId::LAnkle:
      return JointGroup::Distal;
  }
  throw ConfigError("invalid joint id");
}

std::string_view joint_name(JointId j) {
  static constexpr std::array<std::string_view, kNumJoints> kNames = {
      "r-ankle", "r-knee",  "r-hip",   "l-hip",      "l-knee",     "l-ankle",
      "pelvis",  "thorax",  "neck",    "head",       "r-wrist",    "r-elbow",
      "r-shoulder", "l-shoulder", "l-elbow", "l-wrist"};
  return kNames.at(index(j));
}

std::string_view group_name(JointGroup g) {
  switch (g) {
    case JointGroup::Torso:
      return "torso";
    case JointGroup::Proximal:
      return "proximal";
    case JointGroup::Distal:
      return "distal";
  }
  return "?";
}

std::span<const JointId> group_joints(JointGroup g) {
  switch (g) {
    case JointGroup::Torso:
      return kTorsoJoints;
    case JointGroup::Proximal:
      return kProximalJoints;
    case JointGroup::Distal:
      return kDistalJoints;
  }
  return {};
}

JointId parent_of(JointId j) {
  switch (j) {
    case JointId::RAnkle:
      return JointId::RKnee;
    case JointId::RKnee:
      return JointId::RHip;
    case JointId::RHip:
    case JointId::LHip:
    case JointId::Thorax:
    case JointId::Pelvis:
      return JointId::Pelvis;
    case JointId::LKnee:
      return JointId::LHip;
    case JointId::LAnkle:
      return JointId::LKnee;
    case JointId::Neck:
    case JointId::RShoulder:
    case JointId::LShoulder:
      return JointId::Thorax;
    case JointId::Head:
      return JointId::Neck;
    case JointId::RWrist:
      return JointId::RElbow;
    case JointId::RElbow:
      return JointId::RShoulder;
    case JointId::LElbow:
      return JointId::LShoulder;
    case JointId::LWrist:
      return JointId::LElbow;
  }
  return JointId::Pelvis;
}

double bone_length(const Pose3D& p, JointId j) {
  return (p[j] - p[parent_of(j)]).norm();
}

bool Pose2D::in_frame() const {
  for (const auto& v : joints) {
    if (!(v.x() >= 0.0 && v.x() <= width && v.y() >= 0.0 && v.y() <= height))
      return false;
  }
  return true;
}

char attribute_token(Attribute a) {
  switch (a) {
    case Attribute::Front:
      return 'F';
    case Attribute::OnPlane:
      return 'O';
    case Attribute::Back:
      return 'B';
  }
  return '?';
}

Attribute attribute_from_token(std::string_view token) {
  if (token == "F") return Attribute::Front;
  if (token == "O") return Attribute::OnPlane;
  if (token == "B") return Attribute::Back;
  throw ParseError("unknown attribute token '" + std::string(token) + "'");
}

}  // namespace poselift
