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

#include "poselift/model/losses.hpp"

#include <string>

#include "poselift/error.hpp"

namespace poselift::model {

using ad::Var;

ad::Var loss_3d(const GroupOutputs& block1, const GroupOutputs& block2,
                const GroupOutputs& gt) {
  const GroupOutputs blocks[] = {block1, block2};
  return loss_3d(blocks, gt);
}

ad::Var loss_3d(std::span<const GroupOutputs> blocks, const GroupOutputs& gt) {
  if (blocks.empty()) throw ConfigError("loss_3d needs at least one block");
  const Var target = ad::concat({gt[0], gt[1], gt[2]}, 1);
  Var total;
  for (const auto& b : blocks) {
    Var term = ad::l1_loss(ad::concat({b[0], b[1], b[2]}, 1), target);
    total = total.valid() ? ad::add(total, term) : term;
  }
  return total;
}

ad::Var loss_attr(Var logits, std::span<const AttributeVector> labels) {
  const auto& s = logits.shape();
  if (s.size() != 2 || s[1] != kAttrProbDim || s[0] != labels.size())
    throw ShapeError("loss_attr: logits " + ad::shape_string(s) + " for " +
                     std::to_string(labels.size()) + " label vectors");
  std::vector<int> flat;
  flat.reserve(labels.size() * kNumAttributeJoints);
  for (const auto& a : labels)
    for (auto l : a.labels) flat.push_back(static_cast<int>(l));
  Var rows = ad::reshape(logits, {labels.size() * kNumAttributeJoints, 3});
  return ad::cross_entropy(ad::softmax_rows(rows), flat);
}

ad::Var loss_domain(Var logits, std::span<const int> domains) {
  return ad::cross_entropy(ad::softmax_rows(logits), domains);
}

ad::Var heatmap_loss(Var pred, Var target) { return ad::mse_loss(pred, target); }

}  // namespace poselift::model
