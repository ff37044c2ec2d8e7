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
#include <string_view>

#include "poselift/skeleton_types.hpp"

namespace poselift {

/// Side of the torso plane a limb joint lies on. The integer value is the
/// class index used by the classifiers.
enum class Attribute : int { Front = 0, OnPlane = 1, Back = 2 };

inline constexpr std::size_t kNumAttributeJoints = 9;
inline constexpr std::size_t kNumAttributeClasses = 3;

/// Limb joints that carry an attribute, in contract order.
inline constexpr std::array<JointId, kNumAttributeJoints> kAttributeJoints = {
    JointId::LShoulder, JointId::LElbow, JointId::RShoulder,
    JointId::RElbow,    JointId::LKnee,  JointId::LAnkle,
    JointId::RKnee,     JointId::RAnkle, JointId::Head};

struct AttributeVector {
  std::array<Attribute, kNumAttributeJoints> labels{};

  bool operator==(const AttributeVector&) const = default;
};

char attribute_token(Attribute a);
/// Throws ParseError for anything other than "F", "O" or "B".
Attribute attribute_from_token(std::string_view token);

}  // namespace poselift
