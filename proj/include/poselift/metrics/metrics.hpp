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
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "poselift/attributes.hpp"
#include "poselift/skeleton.hpp"

namespace poselift::metrics {

inline constexpr double kPckThresholdMm = 150.0;
inline constexpr double kAucStepMm = 5.0;
/// PCK and AUC count the 15 non-root joints; the root-relative pelvis error
/// is zero by construction.
inline constexpr std::size_t kPckJoints = kNumJoints - 1;

struct JointErrors {
  std::array<double, kNumJoints> per_joint{};
  double mean = 0.0;

  bool operator==(const JointErrors&) const = default;
};

/// Protocol #1: both poses made root-relative (all three axes), then the
/// Euclidean error per joint.
JointErrors mpjpe_p1(const Pose3D& pred, const Pose3D& gt);

/// Protocol #2: mean joint error after rigid Procrustes alignment of the
/// root-relative prediction onto the root-relative ground truth.
double mpjpe_p2(const Pose3D& pred, const Pose3D& gt);

/// Fraction of (sample, non-root joint) pairs whose root-relative error is
/// strictly below `threshold_mm`.
double pck3d(std::span<const Pose3D> preds, std::span<const Pose3D> gts,
             double threshold_mm = kPckThresholdMm);

/// 5, 10, ..., 150 mm.
std::vector<double> auc_thresholds();
/// Mean of pck3d over auc_thresholds().
double auc(std::span<const Pose3D> preds, std::span<const Pose3D> gts);

struct AttributeAccuracy {
  std::array<double, kNumAttributeJoints> per_joint{};
  double mean = 0.0;

  bool operator==(const AttributeAccuracy&) const = default;
};
AttributeAccuracy attribute_accuracy(std::span<const AttributeVector> pred,
                                     std::span<const AttributeVector> gt);

struct EvalInput {
  std::span<const Pose3D> preds;
  std::span<const Pose3D> gts;
  /// Both empty when attributes are not evaluated.
  std::span<const AttributeVector> pred_attrs;
  std::span<const AttributeVector> gt_attrs;
  std::optional<double> domain_accuracy;
};

struct EvalReport {
  std::size_t samples = 0;
  std::array<double, kNumJoints> mpjpe_per_joint{};
  double mpjpe_p1 = 0.0;
  double mpjpe_p2 = 0.0;
  double pck_threshold_mm = kPckThresholdMm;
  double pck = 0.0;
  double auc = 0.0;
  /// (threshold, pck) from 0 to the pck threshold in kAucStepMm steps.
  std::vector<std::pair<double, double>> pck_curve;
  std::optional<AttributeAccuracy> attributes;
  std::optional<double> domain_accuracy;

  bool operator==(const EvalReport&) const = default;
};

/// Per-sample terms are computed across `workers` threads over contiguous
/// index ranges and reduced sequentially in index order, so the result does
/// not depend on the worker count. workers == 0 uses eval_workers().
EvalReport evaluate(const EvalInput& in, std::size_t workers = 0);

/// Hardware concurrency, capped by POSELIFT_THREADS when set.
std::size_t eval_workers();

/// Flat CSV: a '#' line with the protocol parameters, then
/// section,name,value rows (one per joint, then summary rows).
std::string report_csv(const EvalReport& r);
nlohmann::json report_json(const EvalReport& r);
/// Self-contained SVG line plot of the PCK curve.
std::string pck_svg(const EvalReport& r);

/// Method rows against 16 per-joint MPJPE columns plus the mean.
std::string comparison_csv(std::span<const std::pair<std::string, EvalReport>> rows);

}  // namespace poselift::metrics
