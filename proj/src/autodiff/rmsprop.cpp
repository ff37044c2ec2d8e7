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

#include "poselift/autodiff/rmsprop.hpp"

#include <cmath>

#include "poselift/error.hpp"

namespace poselift::ad {

void RmsPropConfig::validate() const {
  if (!(lr > 0.0)) throw ConfigError("rmsprop: lr must be > 0");
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("rmsprop: alpha must be in (0,1)");
  if (!(eps > 0.0)) throw ConfigError("rmsprop: eps must be > 0");
}

void rmsprop_step(Params& params, const Gradients& grads,
                  const RmsPropConfig& cfg) {
  cfg.validate();
  for (const auto& [name, g] : grads) {
    if (!params.contains(name))
      throw ShapeError("rmsprop: gradient for unknown parameter '" + name + "'");
    if (params.value(name).shape() != g.shape())
      throw ShapeError("rmsprop: gradient shape " + shape_string(g.shape()) +
                       " does not match parameter '" + name + "' " +
                       shape_string(params.value(name).shape()));
  }
  for (const auto& [name, g] : grads) {
    Tensor& theta = params.value(name);
    Tensor& acc = params.accumulator(name);
    for (std::size_t i = 0; i < g.size(); ++i) {
      acc[i] = cfg.alpha * acc[i] + (1.0 - cfg.alpha) * g[i] * g[i];
      theta[i] -= cfg.lr * g[i] / (std::sqrt(acc[i]) + cfg.eps);
    }
  }
}

}  // namespace poselift::ad
