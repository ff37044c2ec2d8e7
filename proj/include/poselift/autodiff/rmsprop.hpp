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

#include "poselift/autodiff/params.hpp"
#include "poselift/autodiff/tape.hpp"

namespace poselift::ad {

struct RmsPropConfig {
  double lr = 1e-3;
  double alpha = 0.99;
  double eps = 1e-8;

  void validate() const;
};

/// acc <- alpha*acc + (1-alpha)*g^2;  theta <- theta - lr*g/(sqrt(acc)+eps).
/// Only parameters present in `grads` are touched.
void rmsprop_step(Params& params, const Gradients& grads,
                  const RmsPropConfig& cfg);

}  // namespace poselift::ad
