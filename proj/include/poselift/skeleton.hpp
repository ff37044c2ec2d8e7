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
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "poselift/attributes.hpp"
#include "poselift/skeleton_types.hpp"

namespace poselift {

/// 16 joints in millimeters, camera frame.
struct Pose3D {
  std::array<Vec3, kNumJoints> joints;

  Pose3D() { joints.fill(Vec3::Zero()); }

  const Vec3& operator[](JointId j) const { return joints[index(j)]; }
  Vec3& operator[](JointId j) { return joints[index(j)]; }

  bool operator==(const Pose3D& o) const { return joints == o.joints; }
};

/// 16 joints in pixels plus the image extent they live in.
struct Pose2D {
  std::array<Vec2, kNumJoints> joints;
  double width = 0.0;
  double height = 0.0;

  Pose2D() { joints.fill(Vec2::Zero()); }

  const Vec2& operator[](JointId j) const { return joints[index(j)]; }
  Vec2& operator[](JointId j) { return joints[index(j)]; }

  bool operator==(const Pose2D& o) const {
    return joints == o.joints && width == o.width && height == o.height;
  }
  /// True when every joint lies inside [0,width]x[0,height].
  bool in_frame() const;
};

enum class Domain { Labeled3D, Labeled2D };

struct SampleRecord {
  std::string id;
  Domain domain = Domain::Labeled3D;
  Pose2D pose2d;
  std::optional<Pose3D> pose3d;
  std::optional<AttributeVector> attributes;
  double subject_scale = 1.0;

  bool operator==(const SampleRecord&) const = default;
};

struct DatasetMeta {
  std::string name;
  std::uint64_t seed = 0;
  /// Absolute threshold, or the canonical-skeleton value when labels were
  /// produced with a pose-relative threshold (then tau_rel is set).
  double tau_mm = 1.0;
  std::optional<double> tau_rel;

  bool operator==(const DatasetMeta&) const = default;
};

struct Dataset {
  DatasetMeta meta;
  std::vector<SampleRecord> records;

  bool operator==(const Dataset&) const = default;

  /// Throws DataError on duplicate ids, non-positive tau, or a Labeled3D
  /// record without a 3D pose.
  void validate() const;
};

/// Bone length along the parent map; the pelvis has none.
double bone_length(const Pose3D& p, JointId j);

// Dataset file: one JSON header line, then one flat JSON object per record.
Dataset load_dataset(const std::filesystem::path& path);
void save_dataset(const Dataset& ds, const std::filesystem::path& path);
/// Text form used by save_dataset. Exposed for in-memory round-trip tests.
std::string dataset_to_string(const Dataset& ds);
Dataset dataset_from_string(const std::string& text);

/// Per-joint spread of root-centred 3D positions: sqrt of the trace of the
/// population covariance, in mm. `mean` averages the 16 entries.
struct JointStd {
  std::array<double, kNumJoints> per_joint{};
  double mean = 0.0;
};
JointStd joint_std(const Dataset& ds);

}  // namespace poselift
