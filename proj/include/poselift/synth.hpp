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

#include <cstdint>
#include <string>

#include "poselift/geometry.hpp"
#include "poselift/skeleton.hpp"

namespace poselift {

/// Closed interval of joint angles in degrees.
struct AngleRange {
  double lo = 0.0;
  double hi = 0.0;
};

/// Articulation ranges of the synthetic skeleton. Body frame: +X is the
/// subject's left, +Y up, +Z the facing direction. Every range set to
/// {0,0} reproduces the canonical rest pose.
struct Articulation {
  AngleRange torso_bend{-10, 40};
  AngleRange torso_side{-15, 15};
  AngleRange torso_twist{-40, 40};
  AngleRange clavicle{-25, 25};
  AngleRange neck_flex{-30, 45};
  AngleRange neck_side{-20, 20};
  AngleRange shoulder_flex{-60, 150};
  AngleRange shoulder_abd{0, 90};
  AngleRange elbow_flex{0, 140};
  AngleRange hip_flex{-30, 100};
  AngleRange hip_abd{-10, 40};
  AngleRange knee_flex{0, 130};

  static Articulation rest();
};

struct CameraConfig {
  double focal_px = 1000.0;
  double image_w = 1000.0;
  double image_h = 1000.0;
  /// Principal point offset from the image centre, in pixels.
  double cx_offset = 0.0;
  double cy_offset = 0.0;
};

struct PlacementConfig {
  AngleRange yaw{-180, 180};
  AngleRange pitch{-10, 10};
  double depth_min_mm = 4500.0;
  double depth_max_mm = 7000.0;
  double lateral_mm = 500.0;
  double vertical_mm = 300.0;
};

struct GeneratorConfig {
  std::string name = "synth";
  std::size_t n = 1000;
  Domain domain = Domain::Labeled3D;
  double scale_min = 0.85;
  double scale_max = 1.15;
  TauSpec tau;
  Articulation articulation;
  CameraConfig camera;
  PlacementConfig placement;
  /// Std-dev of Gaussian pixel noise added to the 2D projection.
  double noise_px = 0.0;

  void validate() const;
};

/// Canonical rest skeleton in the body frame, pelvis at the origin.
Pose3D canonical_pose();

/// Pure function of (cfg, seed).
Dataset synth_generate(const GeneratorConfig& cfg, std::uint64_t seed);

/// Pinhole projection used by the generator.
Pose2D project(const Pose3D& camera_frame_pose, const CameraConfig& cam);

}  // namespace poselift
