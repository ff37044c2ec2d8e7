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

#include <span>
#include <vector>

#include "poselift/attributes.hpp"
#include "poselift/model/networks.hpp"

namespace poselift::model {

/// Sum over blocks of the mean absolute error between the concatenated group
/// predictions and the concatenated ground truth. Unit-agnostic.
ad::Var loss_3d(const GroupOutputs& block1, const GroupOutputs& block2,
                const GroupOutputs& gt);
ad::Var loss_3d(std::span<const GroupOutputs> blocks, const GroupOutputs& gt);

/// Mean over the 9 joints (and rows) of softmax cross-entropy. `logits` is
/// [n x 27] with n == labels.size().
ad::Var loss_attr(ad::Var logits, std::span<const AttributeVector> labels);

/// Softmax cross-entropy of [n x 2] logits against domain indices.
ad::Var loss_domain(ad::Var logits, std::span<const int> domains);

/// Mean squared error between predicted and target heatmaps.
ad::Var heatmap_loss(ad::Var pred, ad::Var target);

}  // namespace poselift::model
