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

#include "poselift/batching.hpp"

#include <algorithm>
#include <numeric>
#include <random>

#include "poselift/error.hpp"

namespace poselift {

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a,
                          std::uint64_t b) {
  // splitmix64 finaliser over a simple combination of the inputs.
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (a + 1) +
                    0xBF58476D1CE4E5B9ULL * (b + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

namespace {

std::vector<std::size_t> permutation(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  std::shuffle(idx.begin(), idx.end(), rng);
  return idx;
}

}  // namespace

MixedBatcher::MixedBatcher(std::size_t size_a, std::size_t size_b,
                           std::size_t batch_size, std::uint64_t seed)
    : size_a_(size_a), size_b_(size_b), seed_(seed) {
  if (batch_size == 0 || batch_size % 2 != 0)
    throw ConfigError("mixed batches: batch_size must be a positive even number");
  if (size_a == 0 || size_b == 0)
    throw ConfigError("mixed batches: both datasets must be non-empty");
  half_ = batch_size / 2;
  batches_per_epoch_ = 2 * std::min(size_a, size_b) / batch_size;
}

std::vector<MixedBatch> MixedBatcher::epoch(std::size_t e) const {
  const auto pa = permutation(size_a_, derive_seed(seed_, e, 1));
  const auto pb = permutation(size_b_, derive_seed(seed_, e, 2));
  std::vector<MixedBatch> out(batches_per_epoch_);
  for (std::size_t k = 0; k < batches_per_epoch_; ++k) {
    out[k].a.assign(pa.begin() + k * half_, pa.begin() + (k + 1) * half_);
    out[k].b.assign(pb.begin() + k * half_, pb.begin() + (k + 1) * half_);
  }
  return out;
}

MixedBatcher mixed_batches(const Dataset& a, const Dataset& b,
                           std::size_t batch_size, std::uint64_t seed) {
  return MixedBatcher(a.records.size(), b.records.size(), batch_size, seed);
}

std::vector<std::vector<std::size_t>> shuffled_batches(std::size_t n,
                                                       std::size_t batch_size,
                                                       std::uint64_t seed,
                                                       std::size_t epoch) {
  if (batch_size == 0) throw ConfigError("batch_size must be > 0");
  const auto p = permutation(n, derive_seed(seed, epoch, 3));
  std::vector<std::vector<std::size_t>> out;
  for (std::size_t s = 0; s < n; s += batch_size)
    out.emplace_back(p.begin() + s, p.begin() + std::min(n, s + batch_size));
  return out;
}

}  // namespace poselift
