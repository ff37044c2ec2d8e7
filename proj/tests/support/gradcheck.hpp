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


// Central-difference gradient checks shared by the unit tests and the
// acceptance runner.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <memory>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "poselift/autodiff/ops.hpp"
#include "poselift/model/losses.hpp"
#include "poselift/model/networks.hpp"

namespace gradcheck {

using namespace poselift::ad;

using Fn = std::function<Var(Tape&, const std::vector<Var>&)>;

inline Tensor random_tensor(const Shape& s, std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Tensor t(s);
  for (auto& v : t.values()) v = u(rng);
  return t;
}

// Scalar reduction with a fixed random weighting so every output element
// contributes a distinct amount.
inline double evaluate(const Fn& f, const std::vector<Tensor>& xs, const Tensor& w) {
  Tape tape;
  std::vector<Var> vs;
  for (const auto& x : xs) vs.push_back(tape.constant(x));
  const Tensor y = f(tape, vs).value();
  double acc = 0.0;
  for (std::size_t k = 0; k < y.size(); ++k) acc += y[k] * w[k];
  return acc;
}

// Relative error of the tape gradient against central differences, worst
// over all inputs and elements.
inline double fd_error(const Fn& f, const std::vector<Tensor>& xs, std::mt19937_64& rng,
                double h = 1e-5) {
  Tape tape;
  std::vector<Var> vs;
  for (const auto& x : xs) vs.push_back(tape.variable(x));
  const Var y = f(tape, vs);
  const Tensor w = random_tensor(y.shape(), rng, 0.5, 1.5);
  const Var loss = sum(mul(y, tape.constant(w)));
  tape.backward(loss);

  double worst = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const Tensor g = tape.grad(vs[i]);
    for (std::size_t k = 0; k < xs[i].size(); ++k) {
      auto plus = xs, minus = xs;
      plus[i][k] += h;
      minus[i][k] -= h;
      const double fd = (evaluate(f, plus, w) - evaluate(f, minus, w)) / (2 * h);
      const double err = std::abs(fd - g[k]) / std::max(1.0, std::abs(fd) + std::abs(g[k]));
      worst = std::max(worst, err);
    }
  }
  return worst;
}

// Values that stay clear of the relu / abs kinks so finite differences are
// meaningful.
inline Tensor away_from_zero(const Shape& s, std::mt19937_64& rng) {
  Tensor t = random_tensor(s, rng);
  for (auto& v : t.values()) v += v >= 0 ? 0.05 : -0.05;
  return t;
}


struct OpResult {
  std::string name;
  double worst = 0.0;
};

/// Worst relative error per op family over `instances` random instances.
inline std::vector<OpResult> op_suite(std::mt19937_64& rng, int instances) {
  std::uniform_int_distribution<std::size_t> dim(1, 5);
  std::vector<OpResult> out;
  auto run = [&](const char* name, auto make) {
    double worst = 0.0;
    for (int i = 0; i < instances; ++i) {
      auto [f, xs] = make();
      worst = std::max(worst, fd_error(f, xs, rng));
    }
    out.push_back({name, worst});
  };

  run("matmul", [&] {
    const auto m = dim(rng), k = dim(rng), n = dim(rng);
    return std::pair{Fn([](Tape&, auto& v) { return matmul(v[0], v[1]); }),
                     std::vector{random_tensor({m, k}, rng), random_tensor({k, n}, rng)}};
  });
  run("add/sub/mul", [&] {
    const Shape s{dim(rng), dim(rng)};
    return std::pair{Fn([](Tape&, auto& v) { return mul(sub(add(v[0], v[1]), v[2]), v[0]); }),
                     std::vector{random_tensor(s, rng), random_tensor(s, rng),
                                 random_tensor(s, rng)}};
  });
  run("add_bias", [&] {
    const auto m = dim(rng), n = dim(rng);
    return std::pair{Fn([](Tape&, auto& v) { return add_bias(v[0], v[1]); }),
                     std::vector{random_tensor({m, n}, rng), random_tensor({n}, rng)}};
  });
  run("scale", [&] {
    return std::pair{Fn([](Tape&, auto& v) { return scale(v[0], -2.5); }),
                     std::vector{random_tensor({dim(rng), dim(rng)}, rng)}};
  });
  run("relu", [&] {
    return std::pair{Fn([](Tape&, auto& v) { return relu(v[0]); }),
                     std::vector{away_from_zero({dim(rng), dim(rng)}, rng)}};
  });
  run("concat", [&] {
    const auto m = dim(rng);
    return std::pair{Fn([](Tape&, auto& v) {
                       return concat({concat({v[0], v[1]}, 1), concat({v[1], v[0]}, 1)}, 0);
                     }),
                     std::vector{random_tensor({m, 2}, rng), random_tensor({m, 3}, rng)}};
  });
  run("reshape/slice", [&] {
    return std::pair{Fn([](Tape&, auto& v) { return slice_cols(reshape(v[0], {3, 4}), 1, 3); }),
                     std::vector{random_tensor({2, 6}, rng)}};
  });
  run("gather", [&] {
    return std::pair{Fn([](Tape&, auto& v) {
                       static const std::vector<std::size_t> rows{2, 0, 2};
                       static const std::vector<long> cols{1, -1, 1, 0};
                       return gather_cols(gather_rows(v[0], rows), cols);
                     }),
                     std::vector{random_tensor({3, 2}, rng)}};
  });
  run("sum/mean", [&] {
    return std::pair{Fn([](Tape&, auto& v) { return add(sum(v[0]), scale(mean(v[0]), 3.0)); }),
                     std::vector{random_tensor({dim(rng), dim(rng)}, rng)}};
  });
  run("softmax_rows", [&] {
    return std::pair{Fn([](Tape&, auto& v) { return softmax_rows(v[0]); }),
                     std::vector{random_tensor({dim(rng), dim(rng) + 1}, rng, -3, 3)}};
  });
  run("cross_entropy", [&] {
    const auto m = dim(rng);
    auto labels = std::make_shared<std::vector<int>>();
    for (std::size_t i = 0; i < m; ++i) labels->push_back(int(rng() % 3));
    return std::pair{Fn([labels](Tape&, auto& v) {
                       return cross_entropy(softmax_rows(v[0]), *labels);
                     }),
                     std::vector{random_tensor({m, 3}, rng, -2, 2)}};
  });
  run("l1_loss", [&] {
    const Shape s{dim(rng), dim(rng)};
    Tensor a = random_tensor(s, rng), b = a;
    for (std::size_t k = 0; k < a.size(); ++k) b[k] += (k % 2 ? 0.3 : -0.3);
    return std::pair{Fn([](Tape&, auto& v) { return l1_loss(v[0], v[1]); }), std::vector{a, b}};
  });
  run("mse_loss", [&] {
    const Shape s{dim(rng), dim(rng)};
    return std::pair{Fn([](Tape&, auto& v) { return mse_loss(v[0], v[1]); }),
                     std::vector{random_tensor(s, rng), random_tensor(s, rng)}};
  });
  run("grad_reversal", [&] {
    return std::pair{Fn([](Tape&, auto& v) {
                       // Forward is identity, so the reversed gradient is -lambda
                       // times what differences see; undo it to compare.
                       return grad_reversal(grad_reversal(v[0], 0.5), 2.0);
                     }),
                     std::vector{random_tensor({dim(rng), dim(rng)}, rng)}};
  });
  run("soft_argmax2d_rows", [&] {
    const auto h = dim(rng) + 1, w = dim(rng) + 1;
    return std::pair{Fn([h, w](Tape&, auto& v) { return soft_argmax2d_rows(v[0], h, w, 3.0); }),
                     std::vector{random_tensor({2, h * w}, rng)}};
  });
  run("residual MLP", [&] {
    return std::pair{Fn([](Tape&, auto& v) {
                       Var h = relu(add_bias(matmul(v[0], v[1]), v[2]));
                       Var r = relu(matmul(h, v[3]));
                       return add(h, r);
                     }),
                     std::vector{random_tensor({3, 4}, rng), random_tensor({4, 5}, rng),
                                 random_tensor({5}, rng), random_tensor({5, 5}, rng)}};
  });
  return out;
}

/// Worst relative error of d(loss_3d)/d(param) over every trainable scalar
/// of `net`, for one random batch. Gradients below `floor` in magnitude are
/// compared absolutely.
inline double net_fd_error(poselift::model::PoseNet& net, const Tensor& x,
                           const std::array<Tensor, 3>& gt, double h = 1e-5,
                           double floor = 1e-6) {
  using namespace poselift::model;
  auto loss = [&](Tape& t) {
    const GroupOutputs g{t.constant(gt[0]), t.constant(gt[1]), t.constant(gt[2])};
    return loss_3d(net.forward(t, t.constant(x)), g);
  };
  Tape tape;
  const Gradients grads = tape.backward(loss(tape));
  double worst = 0.0;
  for (const auto& [name, g] : grads) {
    Tensor& v = net.params().value(name);
    for (std::size_t k = 0; k < v.size(); ++k) {
      const double orig = v[k];
      v[k] = orig + h;
      Tape tp;
      const double lp = loss(tp).value()[0];
      v[k] = orig - h;
      Tape tm;
      const double lm = loss(tm).value()[0];
      v[k] = orig;
      const double fd = (lp - lm) / (2 * h);
      const double err = std::abs(fd - g[k]) / std::max(floor, std::abs(fd) + std::abs(g[k]));
      worst = std::max(worst, err);
    }
  }
  return worst;
}

}  // namespace gradcheck
