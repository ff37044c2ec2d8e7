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

#include "poselift/autodiff/ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

#include <Eigen/Core>

#include "poselift/error.hpp"

namespace poselift::ad {

namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using CMap = Eigen::Map<const RowMat>;
using MMap = Eigen::Map<RowMat>;

constexpr double kLogClamp = 1e-12;

Tape& owner(Var a, const char* op) {
  if (!a.valid()) throw ShapeError(std::string(op) + ": empty input");
  Tape& t = *a.tape();
  t.check_owns(a, op);
  return t;
}

Tape& owner(Var a, Var b, const char* op) {
  Tape& t = owner(a, op);
  t.check_owns(b, op);
  return t;
}

void require_rank2(Var x, const char* op) {
  if (x.value().rank() != 2)
    throw ShapeError(std::string(op) + ": expected a rank-2 tensor, got " +
                     shape_string(x.shape()));
}

void require_same(Var a, Var b, const char* op) {
  if (a.shape() != b.shape())
    throw ShapeError(std::string(op) + ": shape mismatch " +
                     shape_string(a.shape()) + " vs " + shape_string(b.shape()));
}

CMap cmap(const Tensor& t) { return CMap(t.data(), t.rows(), t.cols()); }
MMap mmap(Tensor& t) { return MMap(t.data(), t.rows(), t.cols()); }

}  // namespace

Var matmul(Var a, Var b) {
  Tape& t = owner(a, b, "matmul");
  require_rank2(a, "matmul");
  require_rank2(b, "matmul");
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  if (av.cols() != bv.rows())
    throw ShapeError("matmul: shape mismatch " + shape_string(av.shape()) +
                     " vs " + shape_string(bv.shape()));
  Tensor out({av.rows(), bv.cols()});
  mmap(out).noalias() = cmap(av) * cmap(bv);
  return t.record(std::move(out), {a.id(), b.id()}, [](Tape& tp, std::size_t self) {
    const auto ia = tp.input(self, 0);
    const auto ib = tp.input(self, 1);
    const auto g = cmap(tp.out_grad(self));
    if (Tensor* ga = tp.grad_sink(ia))
      mmap(*ga).noalias() += g * cmap(tp.value(ib)).transpose();
    if (Tensor* gb = tp.grad_sink(ib))
      mmap(*gb).noalias() += cmap(tp.value(ia)).transpose() * g;
  });
}

Var add(Var a, Var b) {
  Tape& t = owner(a, b, "add");
  require_same(a, b, "add");
  Tensor out = a.value();
  const Tensor& bv = b.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += bv[i];
  return t.record(std::move(out), {a.id(), b.id()}, [](Tape& tp, std::size_t self) {
    const Tensor& g = tp.out_grad(self);
    for (int k = 0; k < 2; ++k)
      if (Tensor* s = tp.grad_sink(tp.input(self, k)))
        for (std::size_t i = 0; i < g.size(); ++i) (*s)[i] += g[i];
  });
}

Var sub(Var a, Var b) {
  Tape& t = owner(a, b, "sub");
  require_same(a, b, "sub");
  Tensor out = a.value();
  const Tensor& bv = b.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= bv[i];
  return t.record(std::move(out), {a.id(), b.id()}, [](Tape& tp, std::size_t self) {
    const Tensor& g = tp.out_grad(self);
    if (Tensor* s = tp.grad_sink(tp.input(self, 0)))
      for (std::size_t i = 0; i < g.size(); ++i) (*s)[i] += g[i];
    if (Tensor* s = tp.grad_sink(tp.input(self, 1)))
      for (std::size_t i = 0; i < g.size(); ++i) (*s)[i] -= g[i];
  });
}

Var mul(Var a, Var b) {
  Tape& t = owner(a, b, "mul");
  require_same(a, b, "mul");
  Tensor out = a.value();
  const Tensor& bv = b.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= bv[i];
  return t.record(std::move(out), {a.id(), b.id()}, [](Tape& tp, std::size_t self) {
    const Tensor& g = tp.out_grad(self);
    const auto ia = tp.input(self, 0);
    const auto ib = tp.input(self, 1);
    if (Tensor* s = tp.grad_sink(ia)) {
      const Tensor& bv = tp.value(ib);
      for (std::size_t i = 0; i < g.size(); ++i) (*s)[i] += g[i] * bv[i];
    }
    if (Tensor* s = tp.grad_sink(ib)) {
      const Tensor& av = tp.value(ia);
      for (std::size_t i = 0; i < g.size(); ++i) (*s)[i] += g[i] * av[i];
    }
  });
}

Var add_bias(Var x, Var bias) {
  Tape& t = owner(x, bias, "add_bias");
  require_rank2(x, "add_bias");
  const Tensor& xv = x.value();
  const Tensor& bv = bias.value();
  if (bv.size() != xv.cols() || (bv.rank() == 2 && bv.rows() != 1) || bv.rank() > 2)
    throw ShapeError("add_bias: shape mismatch " + shape_string(xv.shape()) +
                     " vs " + shape_string(bv.shape()));
  Tensor out = xv;
  const std::size_t n = xv.cols();
  for (std::size_t r = 0; r < xv.rows(); ++r)
    for (std::size_t c = 0; c < n; ++c) out[r * n + c] += bv[c];
  return t.record(std::move(out), {x.id(), bias.id()}, [](Tape& tp, std::size_t self) {
    const Tensor& g = tp.out_grad(self);
    const std::size_t n = g.cols();
    if (Tensor* s = tp.grad_sink(tp.input(self, 0)))
      for (std::size_t i = 0; i < g.size(); ++i) (*s)[i] += g[i];
    if (Tensor* s = tp.grad_sink(tp.input(self, 1)))
      for (std::size_t r = 0; r < g.rows(); ++r)
        for (std::size_t c = 0; c < n; ++c) (*s)[c] += g[r * n + c];
  });
}

Var scale(Var x, double c) {
  Tape& t = owner(x, "scale");
  Tensor out = x.value();
  for (auto& v : out.values()) v *= c;
  return t.record(std::move(out), {x.id()}, [c](Tape& tp, std::size_t self) {
    const Tensor& g = tp.out_grad(self);
    if (Tensor* s = tp.grad_sink(tp.input(self, 0)))
      for (std::size_t i = 0; i < g.size(); ++i) (*s)[i] += c * g[i];
  });
}

Var relu(Var x) {
  Tape& t = owner(x, "relu");
  Tensor out = x.value();
  for (auto& v : out.values()) v = v > 0.0 ? v : 0.0;
  return t.record(std::move(out), {x.id()}, [](Tape& tp, std::size_t self) {
    const Tensor& g = tp.out_grad(self);
    const auto ix = tp.input(self, 0);
    if (Tensor* s = tp.grad_sink(ix)) {
      const Tensor& xv = tp.value(ix);
      for (std::size_t i = 0; i < g.size(); ++i)
        if (xv[i] > 0.0) (*s)[i] += g[i];
    }
  });
}

Var concat(std::initializer_list<Var> parts, std::size_t axis) {
  return concat(std::span<const Var>(parts.begin(), parts.size()), axis);
}

Var concat(std::span<const Var> parts, std::size_t axis) {
  if (parts.empty()) throw ShapeError("concat: no inputs");
  if (axis > 1) throw ShapeError("concat: axis must be 0 or 1");
  Tape& t = owner(parts[0], "concat");
  std::vector<std::size_t> ids;
  std::size_t rows = parts[0].value().rows();
  std::size_t cols = parts[0].value().cols();
  std::size_t total = 0;
  for (const Var& p : parts) {
    t.check_owns(p, "concat");
    require_rank2(p, "concat");
    const std::size_t fixed = axis == 1 ? p.value().rows() : p.value().cols();
    if (fixed != (axis == 1 ? rows : cols))
      throw ShapeError("concat: shape mismatch " + shape_string(parts[0].shape()) +
                       " vs " + shape_string(p.shape()));
    total += axis == 1 ? p.value().cols() : p.value().rows();
    ids.push_back(p.id());
  }
  Tensor out(axis == 1 ? Shape{rows, total} : Shape{total, cols});
  std::size_t off = 0;
  for (const Var& p : parts) {
    const Tensor& v = p.value();
    if (axis == 1) {
      mmap(out).block(0, off, rows, v.cols()) = cmap(v);
      off += v.cols();
    } else {
      mmap(out).block(off, 0, v.rows(), cols) = cmap(v);
      off += v.rows();
    }
  }
  return t.record(std::move(out), ids, [axis](Tape& tp, std::size_t self) {
    const Tensor& g = tp.out_grad(self);
    const auto gm = cmap(g);
    std::size_t off = 0;
    for (std::size_t k = 0;; ++k) {
      if (off >= (axis == 1 ? g.cols() : g.rows())) break;
      const auto id = tp.input(self, k);
      const Tensor& v = tp.value(id);
      if (Tensor* s = tp.grad_sink(id)) {
        if (axis == 1)
          mmap(*s) += gm.block(0, off, v.rows(), v.cols());
        else
          mmap(*s) += gm.block(off, 0, v.rows(), v.cols());
      }
      off += axis == 1 ? v.cols() : v.rows();
    }
  });
}

Var reshape(Var x, Shape shape) {
  Tape& t = owner(x, "reshape");
  Tensor out = x.value().reshaped(std::move(shape));
  return t.record(std::move(out), {x.id()}, [](Tape& tp, std::size_t self) {
    const Tensor& g = tp.out_grad(self);
    if (Tensor* s = tp.grad_sink(tp.input(self, 0)))
      for (std::size_t i = 0; i < g.size(); ++i) (*s)[i] += g[i];
  });
}

Var slice_cols(Var x, std::size_t begin, std::size_t end) {
  Tape& t = owner(x, "slice_cols");
  require_rank2(x, "slice_cols");
  const Tensor& xv = x.value();
  if (begin >= end || end > xv.cols())
    throw ShapeError("slice_cols: range [" + std::to_string(begin) + "," +
                     std::to_string(end) + ") invalid for " + shape_string(xv.shape()));
  Tensor out({xv.rows(), end - begin});
  mmap(out) = cmap(xv).block(0, begin, xv.rows(), end - begin);
  return t.record(std::move(out), {x.id()}, [begin](Tape& tp, std::size_t self) {
    const Tensor& g = tp.out_grad(self);
    if (Tensor* s = tp.grad_sink(tp.input(self, 0)))
      mmap(*s).block(0, begin, g.rows(), g.cols()) += cmap(g);
  });
}

Var gather_rows(Var x, std::span<const std::size_t> rows) {
  Tape& t = owner(x, "gather_rows");
  require_rank2(x, "gather_rows");
  const Tensor& xv = x.value();
  if (rows.empty()) throw ShapeError("gather_rows: empty row set");
  const std::size_t n = xv.cols();
  Tensor out({rows.size(), n});
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r] >= xv.rows())
      throw ShapeError("gather_rows: row " + std::to_string(rows[r]) +
                       " out of range for " + shape_string(xv.shape()));
    std::copy_n(xv.data() + rows[r] * n, n, out.data() + r * n);
  }
  std::vector<std::size_t> idx(rows.begin(), rows.end());
  return t.record(std::move(out), {x.id()}, [idx, n](Tape& tp, std::size_t self) {
    const Tensor& g = tp.out_grad(self);
    if (Tensor* s = tp.grad_sink(tp.input(self, 0)))
      for (std::size_t r = 0; r < idx.size(); ++r)
        for (std::size_t c = 0; c < n; ++c) (*s)[idx[r] * n + c] += g[r * n + c];
  });
}

Var gather_cols(Var x, std::span<const long> index) {
  Tape& t = owner(x, "gather_cols");
  require_rank2(x, "gather_cols");
  const Tensor& xv = x.value();
  if (index.empty()) throw ShapeError("gather_cols: empty column set");
  const std::size_t m = xv.rows();
  const std::size_t n = xv.cols();
  for (long c : index)
    if (c >= static_cast<long>(n))
      throw ShapeError("gather_cols: column " + std::to_string(c) +
                       " out of range for " + shape_string(xv.shape()));
  const std::size_t k = index.size();
  Tensor out({m, k});
  for (std::size_t r = 0; r < m; ++r)
    for (std::size_t j = 0; j < k; ++j)
      out[r * k + j] = index[j] < 0 ? 0.0 : xv[r * n + index[j]];
  std::vector<long> idx(index.begin(), index.end());
  return t.record(std::move(out), {x.id()}, [idx, n](Tape& tp, std::size_t self) {
    const Tensor& g = tp.out_grad(self);
    const std::size_t k = idx.size();
    if (Tensor* s = tp.grad_sink(tp.input(self, 0)))
      for (std::size_t r = 0; r < g.rows(); ++r)
        for (std::size_t j = 0; j < k; ++j)
          if (idx[j] >= 0) (*s)[r * n + idx[j]] += g[r * k + j];
  });
}

Var sum(Var x) {
  Tape& t = owner(x, "sum");
  double acc = 0.0;
  for (double v : x.value().values()) acc += v;
  return t.record(Tensor::scalar(acc), {x.id()}, [](Tape& tp, std::size_t self) {
    const double g = tp.out_grad(self)[0];
    if (Tensor* s = tp.grad_sink(tp.input(self, 0)))
      for (auto& v : s->values()) v += g;
  });
}

Var mean(Var x) {
  return scale(sum(x), 1.0 / static_cast<double>(x.value().size()));
}

Var softmax_rows(Var x) {
  Tape& t = owner(x, "softmax_rows");
  require_rank2(x, "softmax_rows");
  const Tensor& xv = x.value();
  const std::size_t m = xv.rows();
  const std::size_t c = xv.cols();
  Tensor out({m, c});
  for (std::size_t r = 0; r < m; ++r) {
    const double* in = xv.data() + r * c;
    double* o = out.data() + r * c;
    const double mx = *std::max_element(in, in + c);
    double z = 0.0;
    for (std::size_t j = 0; j < c; ++j) z += (o[j] = std::exp(in[j] - mx));
    for (std::size_t j = 0; j < c; ++j) o[j] /= z;
  }
  return t.record(std::move(out), {x.id()}, [](Tape& tp, std::size_t self) {
    Tensor* s = tp.grad_sink(tp.input(self, 0));
    if (!s) return;
    const Tensor& y = tp.value(self);
    const Tensor& g = tp.out_grad(self);
    const std::size_t c = y.cols();
    for (std::size_t r = 0; r < y.rows(); ++r) {
      double dot = 0.0;
      for (std::size_t j = 0; j < c; ++j) dot += g[r * c + j] * y[r * c + j];
      for (std::size_t j = 0; j < c; ++j)
        (*s)[r * c + j] += y[r * c + j] * (g[r * c + j] - dot);
    }
  });
}

Var cross_entropy(Var probs, std::span<const int> labels) {
  Tape& t = owner(probs, "cross_entropy");
  require_rank2(probs, "cross_entropy");
  const Tensor& p = probs.value();
  const std::size_t m = p.rows();
  const std::size_t c = p.cols();
  if (labels.size() != m)
    throw ShapeError("cross_entropy: " + std::to_string(labels.size()) +
                     " labels for probabilities " + shape_string(p.shape()));
  double loss = 0.0;
  for (std::size_t r = 0; r < m; ++r) {
    if (labels[r] < 0 || labels[r] >= static_cast<int>(c))
      throw ShapeError("cross_entropy: class index " + std::to_string(labels[r]) +
                       " out of range [0," + std::to_string(c) + ")");
    loss -= std::log(std::max(p[r * c + labels[r]], kLogClamp));
  }
  loss /= static_cast<double>(m);
  std::vector<int> y(labels.begin(), labels.end());
  return t.record(Tensor::scalar(loss), {probs.id()}, [y](Tape& tp, std::size_t self) {
    Tensor* s = tp.grad_sink(tp.input(self, 0));
    if (!s) return;
    const Tensor& p = tp.value(tp.input(self, 0));
    const double g = tp.out_grad(self)[0];
    const std::size_t c = p.cols();
    const double inv_m = 1.0 / static_cast<double>(y.size());
    for (std::size_t r = 0; r < y.size(); ++r) {
      const double pr = p[r * c + y[r]];
      if (pr > kLogClamp) (*s)[r * c + y[r]] -= g * inv_m / pr;
    }
  });
}

Var l1_loss(Var pred, Var target) {
  Tape& t = owner(pred, target, "l1_loss");
  require_same(pred, target, "l1_loss");
  const Tensor& a = pred.value();
  const Tensor& b = target.value();
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += std::abs(a[i] - b[i]);
  acc /= static_cast<double>(a.size());
  return t.record(Tensor::scalar(acc), {pred.id(), target.id()},
                  [](Tape& tp, std::size_t self) {
    const auto ia = tp.input(self, 0);
    const auto ib = tp.input(self, 1);
    const Tensor& a = tp.value(ia);
    const Tensor& b = tp.value(ib);
    const double g = tp.out_grad(self)[0] / static_cast<double>(a.size());
    Tensor* sa = tp.grad_sink(ia);
    Tensor* sb = tp.grad_sink(ib);
    for (std::size_t i = 0; i < a.size(); ++i) {
      const double d = a[i] - b[i];
      const double sg = d > 0.0 ? g : (d < 0.0 ? -g : 0.0);
      if (sa) (*sa)[i] += sg;
      if (sb) (*sb)[i] -= sg;
    }
  });
}

Var mse_loss(Var pred, Var target) {
  Tape& t = owner(pred, target, "mse_loss");
  require_same(pred, target, "mse_loss");
  const Tensor& a = pred.value();
  const Tensor& b = target.value();
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += (a[i] - b[i]) * (a[i] - b[i]);
  acc /= static_cast<double>(a.size());
  return t.record(Tensor::scalar(acc), {pred.id(), target.id()},
                  [](Tape& tp, std::size_t self) {
    const auto ia = tp.input(self, 0);
    const auto ib = tp.input(self, 1);
    const Tensor& a = tp.value(ia);
    const Tensor& b = tp.value(ib);
    const double g = 2.0 * tp.out_grad(self)[0] / static_cast<double>(a.size());
    Tensor* sa = tp.grad_sink(ia);
    Tensor* sb = tp.grad_sink(ib);
    for (std::size_t i = 0; i < a.size(); ++i) {
      const double d = g * (a[i] - b[i]);
      if (sa) (*sa)[i] += d;
      if (sb) (*sb)[i] -= d;
    }
  });
}

Var grad_reversal(Var x, double lambda) {
  Tape& t = owner(x, "grad_reversal");
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    throw ConfigError("grad_reversal: lambda must be > 0");
  return t.record(x.value(), {x.id()}, [lambda](Tape& tp, std::size_t self) {
    const Tensor& g = tp.out_grad(self);
    if (Tensor* s = tp.grad_sink(tp.input(self, 0)))
      for (std::size_t i = 0; i < g.size(); ++i) (*s)[i] += -lambda * g[i];
  });
}

Var stop_gradient(Var x) {
  Tape& t = owner(x, "stop_gradient");
  return t.constant(x.value());
}

Var soft_argmax2d_rows(Var x, std::size_t height, std::size_t width,
                       double beta) {
  Tape& t = owner(x, "soft_argmax2d");
  require_rank2(x, "soft_argmax2d");
  if (!(beta > 0.0)) throw ConfigError("soft_argmax2d: beta must be > 0");
  const Tensor& xv = x.value();
  const std::size_t cells = height * width;
  if (xv.cols() != cells)
    throw ShapeError("soft_argmax2d: rows of " + shape_string(xv.shape()) +
                     " do not hold " + std::to_string(height) + "x" +
                     std::to_string(width) + " maps");
  const std::size_t m = xv.rows();
  // Saved softmax weights for the backward pass.
  auto weights = std::make_shared<std::vector<double>>(m * cells);
  Tensor out({m, 2});
  for (std::size_t r = 0; r < m; ++r) {
    const double* in = xv.data() + r * cells;
    double* w = weights->data() + r * cells;
    const double mx = *std::max_element(in, in + cells);
    double z = 0.0;
    for (std::size_t i = 0; i < cells; ++i) z += (w[i] = std::exp(beta * (in[i] - mx)));
    double ex = 0.0;
    double ey = 0.0;
    for (std::size_t i = 0; i < cells; ++i) {
      w[i] /= z;
      ex += w[i] * static_cast<double>(i % width);
      ey += w[i] * static_cast<double>(i / width);
    }
    out[2 * r] = ex;
    out[2 * r + 1] = ey;
  }
  return t.record(std::move(out), {x.id()},
                  [weights, width, cells, beta](Tape& tp, std::size_t self) {
    Tensor* s = tp.grad_sink(tp.input(self, 0));
    if (!s) return;
    const Tensor& o = tp.value(self);
    const Tensor& g = tp.out_grad(self);
    for (std::size_t r = 0; r < o.rows(); ++r) {
      const double* w = weights->data() + r * cells;
      const double gx = g[2 * r], gy = g[2 * r + 1];
      const double ex = o[2 * r], ey = o[2 * r + 1];
      for (std::size_t i = 0; i < cells; ++i) {
        const double cx = static_cast<double>(i % width) - ex;
        const double cy = static_cast<double>(i / width) - ey;
        (*s)[r * cells + i] += beta * w[i] * (gx * cx + gy * cy);
      }
    }
  });
}

Var soft_argmax2d(Var heatmap, double beta) {
  require_rank2(heatmap, "soft_argmax2d");
  const std::size_t h = heatmap.value().rows();
  const std::size_t w = heatmap.value().cols();
  Var flat = reshape(heatmap, {1, h * w});
  return reshape(soft_argmax2d_rows(flat, h, w, beta), {2});
}

}  // namespace poselift::ad
