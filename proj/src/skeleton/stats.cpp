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

#include "poselift/error.hpp"
#include "poselift/skeleton.hpp"

namespace poselift {

JointStd joint_std(const Dataset& ds) {
  JointStd out;
  if (ds.records.empty()) return out;
  const double n = static_cast<double>(ds.records.size());
  for (const auto& r : ds.records)
    if (!r.pose3d)
      throw DataError("joint_std: record '" + r.id + "' has no 3D pose");

  // Two passes over data shifted by the first pose keep identical poses at
  // exactly zero.
  auto centred = [](const Pose3D& p, std::size_t k) -> Vec3 {
    return p.joints[k] - p[JointId::Pelvis];
  };
  const Pose3D& ref = *ds.records.front().pose3d;
  std::array<Vec3, kNumJoints> mean;
  mean.fill(Vec3::Zero());
  for (const auto& r : ds.records)
    for (std::size_t k = 0; k < kNumJoints; ++k)
      mean[k] += centred(*r.pose3d, k) - centred(ref, k);
  for (auto& m : mean) m /= n;
  std::array<double, kNumJoints> sq{};
  for (const auto& r : ds.records)
    for (std::size_t k = 0; k < kNumJoints; ++k)
      sq[k] += (centred(*r.pose3d, k) - centred(ref, k) - mean[k]).squaredNorm();
  double total = 0.0;
  for (std::size_t k = 0; k < kNumJoints; ++k) {
    out.per_joint[k] = std::sqrt(sq[k] / n);
    total += out.per_joint[k];
  }
  out.mean = total / static_cast<double>(kNumJoints);
  return out;
}

}  // namespace poselift
