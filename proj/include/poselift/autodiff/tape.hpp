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

#include <cstddef>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "poselift/autodiff/params.hpp"
#include "poselift/autodiff/tensor.hpp"

namespace poselift::ad {

class Tape;

/// Handle to a value recorded on a Tape. Cheap to copy; valid while the
/// tape is alive and not cleared.
class Var {
 public:
  Var() = default;

  const Tensor& value() const;
  const Shape& shape() const { return value().shape(); }
  Tape* tape() const { return tape_; }
  std::size_t id() const { return id_; }
  bool valid() const { return tape_ != nullptr; }

 private:
  friend class Tape;
  Var(Tape* t, std::size_t id) : tape_(t), id_(id) {}
  Tape* tape_ = nullptr;
  std::size_t id_ = 0;
};

/// Gradients of a loss keyed by parameter name.
using Gradients = std::map<std::string, Tensor>;

/// Linear record of a forward pass. Nodes are appended in execution order,
/// which is a topological order; backward walks it once in reverse.
class Tape {
 public:
  /// Accumulates d(loss)/d(input k) given the node's output gradient.
  using BackwardFn = std::function<void(Tape&, std::size_t self)>;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  /// Leaf that never receives a gradient.
  Var constant(Tensor value);
  /// Leaf whose gradient is kept and readable through grad().
  Var variable(Tensor value);
  /// Leaf bound to a named parameter; its gradient is returned by backward.
  Var param(const Params& params, const std::string& name);

  /// Reverse sweep from a scalar loss. Gradients are recomputed from
  /// scratch on every call.
  Gradients backward(Var loss);
  /// Gradient of a variable or parameter after backward().
  const Tensor& grad(Var v) const;

  std::size_t size() const { return nodes_.size(); }
  void clear() {
    nodes_.clear();
    have_grads_ = false;
  }

  // Op implementation interface.
  Var record(Tensor value, std::vector<std::size_t> inputs, BackwardFn fn);
  const Tensor& value(std::size_t id) const { return nodes_.at(id).value; }
  const Tensor& out_grad(std::size_t id) const { return nodes_[id].grad; }
  /// Gradient buffer of input `id`, or nullptr if it takes no gradient.
  Tensor* grad_sink(std::size_t id);
  std::size_t input(std::size_t self, std::size_t k) const {
    return nodes_[self].inputs[k];
  }
  void check_owns(Var v, const char* op) const;

 private:
  struct Node {
    Tensor value;
    Tensor grad;
    std::vector<std::size_t> inputs;
    BackwardFn backward;
    bool requires_grad = false;
    bool keep_grad = false;
    std::string param_name;
  };
  std::vector<Node> nodes_;
  bool have_grads_ = false;
};

}  // namespace poselift::ad
