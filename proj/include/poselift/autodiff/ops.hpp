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
#include <span>
#include <vector>

#include "poselift/autodiff/tape.hpp"

namespace poselift::ad {

// All ops record onto the tape that owns their inputs. Inputs from
// different tapes are an error. Shape mismatches throw ShapeError naming
// both shapes.

/// [m x k] . [k x n] -> [m x n]
Var matmul(Var a, Var b);
/// Elementwise, identical shapes.
Var add(Var a, Var b);
Var sub(Var a, Var b);
Var mul(Var a, Var b);
/// [m x n] + bias[n], bias broadcast over rows.
Var add_bias(Var x, Var bias);
Var scale(Var x, double c);
Var relu(Var x);
/// Concatenation of rank-2 tensors along axis 0 (rows) or 1 (columns).
Var concat(std::span<const Var> parts, std::size_t axis);
Var concat(std::initializer_list<Var> parts, std::size_t axis);
Var reshape(Var x, Shape shape);
/// Columns [begin, end) of a rank-2 tensor.
Var slice_cols(Var x, std::size_t begin, std::size_t end);
/// Selected rows of a rank-2 tensor, in the given order.
Var gather_rows(Var x, std::span<const std::size_t> rows);
/// Output column k is input column index[k]; a negative index yields a
/// constant zero column.
Var gather_cols(Var x, std::span<const long> index);
Var sum(Var x);
Var mean(Var x);

/// Row-wise softmax of a rank-2 tensor, max-subtracted.
Var softmax_rows(Var x);
/// Mean over rows of -log(p[row, label[row]]), log clamped at 1e-12.
Var cross_entropy(Var probs, std::span<const int> labels);
/// Mean absolute difference; the subgradient at a tie is 0.
Var l1_loss(Var pred, Var target);
/// Mean squared difference.
Var mse_loss(Var pred, Var target);

/// Identity forward; backward multiplies the upstream gradient by -lambda.
/// Throws ConfigError unless lambda > 0.
Var grad_reversal(Var x, double lambda);
/// Identity forward; no gradient flows back.
Var stop_gradient(Var x);

/// Expected (x, y) grid coordinate under softmax(beta * h) over all cells of
/// an [H x W] map. Returns a [2] tensor (x = column, y = row).
Var soft_argmax2d(Var heatmap, double beta);
/// Row-batched form: each row of x is an H*W map in row-major order;
/// returns [rows x 2].
Var soft_argmax2d_rows(Var x, std::size_t height, std::size_t width,
                       double beta);

}  // namespace poselift::ad
