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

#include "poselift/autodiff/tape.hpp"

#include "poselift/error.hpp"

namespace poselift::ad {

const Tensor& Var::value() const {
  if (!tape_) throw Error("shape", "use of an empty Var");
  return tape_->value(id_);
}

void Tape::check_owns(Var v, const char* op) const {
  if (v.tape_ != this || v.id_ >= nodes_.size())
    throw Error("shape", std::string(op) + ": value is not recorded on this tape");
}

Var Tape::record(Tensor value, std::vector<std::size_t> inputs, BackwardFn fn) {
#ifndef NDEBUG
  if (!value.all_finite()) throw Error("data", "non-finite value produced in forward pass");
#endif
  Node n;
  n.value = std::move(value);
  for (auto i : inputs) n.requires_grad = n.requires_grad || nodes_[i].requires_grad;
  if (n.requires_grad) {
    n.inputs = std::move(inputs);
    n.backward = std::move(fn);
  }
  nodes_.push_back(std::move(n));
  return Var(this, nodes_.size() - 1);
}

Var Tape::constant(Tensor value) {
  Node n;
  n.value = std::move(value);
  nodes_.push_back(std::move(n));
  return Var(this, nodes_.size() - 1);
}

Var Tape::variable(Tensor value) {
  Node n;
  n.value = std::move(value);
  n.requires_grad = true;
  n.keep_grad = true;
  nodes_.push_back(std::move(n));
  return Var(this, nodes_.size() - 1);
}

Var Tape::param(const Params& params, const std::string& name) {
  Node n;
  n.value = params.value(name);
  n.requires_grad = true;
  n.keep_grad = true;
  n.param_name = name;
  nodes_.push_back(std::move(n));
  return Var(this, nodes_.size() - 1);
}

Tensor* Tape::grad_sink(std::size_t id) {
  Node& n = nodes_[id];
  if (!n.requires_grad) return nullptr;
  if (n.grad.size() == 0) n.grad = Tensor(n.value.shape(), 0.0);
  return &n.grad;
}

Gradients Tape::backward(Var loss) {
  check_owns(loss, "backward");
  if (nodes_[loss.id_].value.size() != 1)
    throw ShapeError("backward: loss must be a scalar, got " +
                     shape_string(nodes_[loss.id_].value.shape()));
  for (auto& n : nodes_) n.grad = Tensor();
  Node& root = nodes_[loss.id_];
  Gradients out;
  if (root.requires_grad) {
    root.grad = Tensor(root.value.shape(), 1.0);
    for (std::size_t i = loss.id_ + 1; i-- > 0;) {
      Node& n = nodes_[i];
      if (!n.requires_grad || n.grad.size() == 0 || !n.backward) continue;
      n.backward(*this, i);
    }
  }
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    Node& n = nodes_[i];
    if (!n.keep_grad) continue;
    if (n.grad.size() == 0) n.grad = Tensor(n.value.shape(), 0.0);
    if (n.param_name.empty()) continue;
    auto it = out.find(n.param_name);
    if (it == out.end()) {
      out.emplace(n.param_name, n.grad);
    } else {
      for (std::size_t k = 0; k < n.grad.size(); ++k) it->second[k] += n.grad[k];
    }
  }
  have_grads_ = true;
  return out;
}

const Tensor& Tape::grad(Var v) const {
  check_owns(v, "grad");
  const Node& n = nodes_[v.id_];
  if (!n.keep_grad)
    throw Error("shape", "grad: value is not a trainable variable or parameter");
  if (!have_grads_ || n.grad.size() == 0)
    throw Error("shape", "grad: backward has not been run since this value was recorded");
  return n.grad;
}

}  // namespace poselift::ad
