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
#include <cstdint>
#include <vector>

#include "poselift/skeleton.hpp"

namespace poselift {

/// Record indices into the two source datasets.
struct MixedBatch {
  std::vector<std::size_t> a;
  std::vector<std::size_t> b;

  bool operator==(const MixedBatch&) const = default;
};

/// Half-and-half batches drawn from two datasets. Each epoch is a fresh
/// permutation of both index sets derived from (seed, epoch); records are
/// drawn without replacement and the shorter dataset bounds the epoch.
class MixedBatcher {
 public:
  MixedBatcher(std::size_t size_a, std::size_t size_b, std::size_t batch_size,
               std::uint64_t seed);

  std::size_t batches_per_epoch() const { return batches_per_epoch_; }
  std::vector<MixedBatch> epoch(std::size_t e) const;

 private:
  std::size_t size_a_;
  std::size_t size_b_;
  std::size_t half_;
  std::size_t batches_per_epoch_;
  std::uint64_t seed_;
};

MixedBatcher mixed_batches(const Dataset& a, const Dataset& b,
                           std::size_t batch_size, std::uint64_t seed);

/// Shuffled single-source batches; the final partial batch is kept.
std::vector<std::vector<std::size_t>> shuffled_batches(std::size_t n,
                                                       std::size_t batch_size,
                                                       std::uint64_t seed,
                                                       std::size_t epoch);

/// Stream seed for (seed, epoch, salt) used wherever a per-epoch RNG is
/// derived.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a,
                          std::uint64_t b = 0);

}  // namespace poselift
