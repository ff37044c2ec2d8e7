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
#include <functional>
#include <random>
#include <vector>

#include <doctest.h>

#include "poselift/autodiff/checkpoint.hpp"
#include "poselift/autodiff/ops.hpp"
#include "poselift/autodiff/rmsprop.hpp"
#include "poselift/error.hpp"
#include "gradcheck.hpp"

using namespace poselift;
using namespace poselift::ad;

using gradcheck::random_tensor;

TEST_CASE("gradients match central differences") {
  std::mt19937_64 rng(2024);
  for (const auto& r : gradcheck::op_suite(rng, 20)) {
    INFO(r.name);
    CHECK(r.worst < 1e-4);
  }
}

TEST_CASE("softmax is stable for large logits") {
  Tape t;
  const Var p = softmax_rows(t.constant(Tensor::matrix(2, 3, {1000, 1001, 1002, -1000, -1000, -1000})));
  CHECK(p.value().all_finite());
  CHECK(p.value().at(0, 2) == doctest::Approx(std::exp(2.0) / (1 + std::exp(1.0) + std::exp(2.0))));
  CHECK(p.value().at(1, 0) == doctest::Approx(1.0 / 3));
}

TEST_CASE("losses on known values") {
  Tape t;
  SUBCASE("cross entropy") {
    const int labels[] = {0, 2};
    const Var uniform = t.constant(Tensor({2, 3}, 1.0 / 3));
    CHECK(cross_entropy(uniform, labels).value()[0] == doctest::Approx(std::log(3.0)));
    const Var sure = t.constant(Tensor::matrix(2, 3, {1, 0, 0, 0, 0, 1}));
    CHECK(cross_entropy(sure, labels).value()[0] == doctest::Approx(0.0));
    const Var wrong = t.constant(Tensor::matrix(2, 3, {0, 1, 0, 0, 1, 0}));
    CHECK(cross_entropy(wrong, labels).value()[0] == doctest::Approx(-std::log(1e-12)));
    const int bad[] = {0, 3};
    CHECK_THROWS_AS(cross_entropy(uniform, bad), ShapeError);
  }
  SUBCASE("l1 and mse") {
    const Var a = t.constant(Tensor::matrix(2, 2, {1, 2, 3, 4}));
    const Var b = t.constant(Tensor::matrix(2, 2, {2, 3, 4, 5}));
    CHECK(l1_loss(a, b).value()[0] == 1.0);
    CHECK(mse_loss(a, scale(b, 1.0)).value()[0] == 1.0);
    const Var v = t.variable(Tensor::matrix(1, 2, {1, 2}));
    const Var l = l1_loss(v, t.constant(Tensor::matrix(1, 2, {1, 5})));
    t.backward(l);
    CHECK(t.grad(v)[0] == 0.0);
    CHECK(t.grad(v)[1] == -0.5);
  }
  SUBCASE("shape mismatch names both shapes") {
    const Var a = t.constant(Tensor({2, 3}));
    const Var b = t.constant(Tensor({3, 2}));
    try {
      add(a, b);
      FAIL("expected ShapeError");
    } catch (const ShapeError& e) {
      const std::string msg = e.what();
      CHECK(msg.find("[2x3]") != std::string::npos);
      CHECK(msg.find("[3x2]") != std::string::npos);
    }
  }
}

TEST_CASE("gradient reversal") {
  std::mt19937_64 rng(3);
  for (double lambda : {0.1, 1.0, 10.0}) {
    Tape t;
    const Tensor x0 = random_tensor({3, 4}, rng);
    const Var x = t.variable(x0);
    const Var y = grad_reversal(x, lambda);
    CHECK(y.value() == x0);
    const Tensor w = random_tensor({3, 4}, rng);
    t.backward(sum(mul(y, t.constant(w))));
    for (std::size_t k = 0; k < w.size(); ++k)
      CHECK(t.grad(x)[k] == doctest::Approx(-lambda * w[k]));
  }
  Tape t;
  const Var x = t.variable(Tensor({2, 2}, 1.0));
  t.backward(sum(grad_reversal(grad_reversal(x, 1.0), 1.0)));
  for (double g : t.grad(x).values()) CHECK(g == 1.0);
  CHECK_THROWS_AS(grad_reversal(x, 0.0), ConfigError);
  CHECK_THROWS_AS(grad_reversal(x, -1.0), ConfigError);

  Tape s;
  const Var z = s.variable(Tensor({2, 2}, 1.0));
  s.backward(sum(add(stop_gradient(z), s.constant(Tensor({2, 2}, 1.0)))));
  for (double g : s.grad(z).values()) CHECK(g == 0.0);
}

TEST_CASE("soft argmax") {
  SUBCASE("one-hot map at high temperature") {
    Tape t;
    Tensor h({8, 8}, 0.0);
    h.at(5, 2) = 1.0;
    const Var c = soft_argmax2d(t.constant(h), 50.0);
    CHECK(c.value()[0] == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(c.value()[1] == doctest::Approx(5.0).epsilon(1e-6));
  }
  SUBCASE("gaussian blob centre") {
    const double cx = 20.3, cy = 27.6, sigma = 4.0;
    Tensor h({64, 64});
    for (std::size_t r = 0; r < 64; ++r)
      for (std::size_t c = 0; c < 64; ++c)
        h.at(r, c) = std::exp(-((c - cx) * (c - cx) + (r - cy) * (r - cy)) / (2 * sigma * sigma));
    Tape t;
    const Var p = soft_argmax2d(t.constant(h), 20.0);
    CHECK(std::abs(p.value()[0] - cx) < 0.1);
    CHECK(std::abs(p.value()[1] - cy) < 0.1);
  }
  SUBCASE("stays inside the grid") {
    std::mt19937_64 rng(9);
    Tape t;
    const Var p = soft_argmax2d_rows(t.constant(random_tensor({50, 12}, rng, -5, 5)), 3, 4, 2.0);
    for (std::size_t r = 0; r < 50; ++r) {
      CHECK(p.value().at(r, 0) >= 0.0);
      CHECK(p.value().at(r, 0) <= 3.0);
      CHECK(p.value().at(r, 1) >= 0.0);
      CHECK(p.value().at(r, 1) <= 2.0);
    }
  }
}

TEST_CASE("tape semantics") {
  SUBCASE("x*x at 3 has gradient 6") {
    Tape t;
    const Var x = t.variable(Tensor::scalar(3.0));
    t.backward(mul(x, x));
    CHECK(t.grad(x)[0] == 6.0);
    // Repeated backward recomputes rather than accumulates.
    t.backward(mul(x, x));
    CHECK(t.grad(x)[0] == 6.0);
  }
  SUBCASE("constants have no gradient") {
    Tape t;
    const Var c = t.constant(Tensor::scalar(2.0));
    const Var x = t.variable(Tensor::scalar(1.0));
    t.backward(mul(c, x));
    CHECK_THROWS(t.grad(c));
    CHECK(t.grad(x)[0] == 2.0);
  }
  SUBCASE("unused variable gets a zero gradient") {
    Tape t;
    const Var x = t.variable(Tensor::scalar(1.0));
    const Var y = t.variable(Tensor({2}, 1.0));
    t.backward(scale(x, 2.0));
    CHECK(t.grad(y)[0] == 0.0);
  }
  SUBCASE("grad before backward") {
    Tape t;
    const Var x = t.variable(Tensor::scalar(1.0));
    CHECK_THROWS(t.grad(x));
  }
  SUBCASE("non-scalar loss") {
    Tape t;
    CHECK_THROWS_AS(t.backward(t.variable(Tensor({2}, 1.0))), ShapeError);
  }
  SUBCASE("foreign tape") {
    Tape a, b;
    const Var x = a.variable(Tensor::scalar(1.0));
    const Var y = b.variable(Tensor::scalar(1.0));
    CHECK_THROWS(add(x, y));
    CHECK_THROWS(b.backward(x));
  }
  SUBCASE("parameter used twice sums its gradient") {
    Params p;
    p.add("w", Tensor::scalar(2.0));
    Tape t;
    const Var a = t.param(p, "w");
    const Var b = t.param(p, "w");
    const Gradients g = t.backward(mul(a, b));
    CHECK(g.at("w")[0] == 4.0);
  }
}

TEST_CASE("rmsprop") {
  SUBCASE("first step from zero accumulator") {
    Params p;
    p.add("w", Tensor::scalar(0.0));
    // acc = 0.01 after one step, so g / sqrt(acc) = 10 and lr 0.1 moves by 1.
    rmsprop_step(p, {{"w", Tensor::scalar(1.0)}}, {0.1, 0.99, 1e-12});
    CHECK(p.value("w")[0] == doctest::Approx(-1.0));
    CHECK(p.accumulator("w")[0] == doctest::Approx(0.01));
  }
  SUBCASE("zero gradient decays the accumulator") {
    Params p;
    p.add("w", Tensor::scalar(5.0));
    p.accumulator("w")[0] = 1.0;
    rmsprop_step(p, {{"w", Tensor::scalar(0.0)}}, {});
    CHECK(p.value("w")[0] == 5.0);
    CHECK(p.accumulator("w")[0] == doctest::Approx(0.99));
  }
  SUBCASE("constant gradient drives the accumulator to g^2") {
    Params p;
    p.add("w", Tensor::scalar(0.0));
    for (int i = 0; i < 5000; ++i) rmsprop_step(p, {{"w", Tensor::scalar(3.0)}}, {1e-6});
    CHECK(p.accumulator("w")[0] == doctest::Approx(9.0).epsilon(1e-6));
  }
  SUBCASE("only listed parameters move") {
    Params p;
    p.add("a", Tensor::scalar(1.0));
    p.add("b", Tensor::scalar(1.0));
    rmsprop_step(p, {{"a", Tensor::scalar(1.0)}}, {});
    CHECK(p.value("b")[0] == 1.0);
    CHECK(p.value("a")[0] < 1.0);
  }
  SUBCASE("errors") {
    Params p;
    p.add("a", Tensor({2}, 1.0));
    CHECK_THROWS(rmsprop_step(p, {{"zz", Tensor({2})}}, {}));
    CHECK_THROWS_AS(rmsprop_step(p, {{"a", Tensor({3})}}, {}), ShapeError);
    CHECK_THROWS_AS(RmsPropConfig({-1.0}).validate(), ConfigError);
  }
  SUBCASE("minimises a quadratic") {
    std::mt19937_64 rng(1);
    Params p;
    p.add("w", random_tensor({4, 3}, rng));
    const Tensor target = random_tensor({4, 3}, rng);
    double first = 0.0, last = 0.0;
    for (int i = 0; i < 2000; ++i) {
      Tape t;
      const Var loss = mse_loss(t.param(p, "w"), t.constant(target));
      if (i == 0) first = loss.value()[0];
      last = loss.value()[0];
      rmsprop_step(p, t.backward(loss), {1e-2});
    }
    CHECK(last < 1e-3 * first);
  }
}

TEST_CASE("checkpoint round trip") {
  std::mt19937_64 rng(77);
  Params p;
  p.add("g1.in.w", random_tensor({32, 16}, rng));
  p.add("g1.in.b", random_tensor({16}, rng));
  p.add("head.attr.w", random_tensor({16, 27}, rng));
  p.value("g1.in.b")[0] = -0.0;
  p.value("g1.in.b")[1] = 1e-310;
  CheckpointHeader h;
  h.kind = "progressive";
  h.layer_sizes = {{"width", 16}, {"depth", 1}};
  h.seed = 123;

  const auto path = std::filesystem::temp_directory_path() / "poselift_ckpt_test.ckpt";
  save_checkpoint(path, h, p);
  const Checkpoint c = load_checkpoint(path);
  CHECK(c.header == h);
  CHECK(c.params == p);
  for (const auto& name : p.names())
    for (std::size_t k = 0; k < p.value(name).size(); ++k)
      CHECK(std::bit_cast<std::uint64_t>(c.params.value(name)[k]) ==
            std::bit_cast<std::uint64_t>(p.value(name)[k]));
  std::filesystem::remove(path);

  const std::string bytes = checkpoint_to_bytes(h, p);
  CHECK_THROWS(checkpoint_from_bytes(bytes.substr(0, bytes.size() - 3)));
  CHECK_THROWS(checkpoint_from_bytes(bytes + "x"));
  CHECK_THROWS(load_checkpoint("/nonexistent/dir/x.ckpt"));
}
