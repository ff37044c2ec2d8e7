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

#include <cstdint>
#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "poselift/autodiff/params.hpp"

namespace poselift::ad {

struct CheckpointHeader {
  int format_version = 1;
  std::string kind;
  /// Free-form architecture description (widths, depths, flags).
  nlohmann::json layer_sizes = nlohmann::json::object();
  std::uint64_t seed = 0;

  bool operator==(const CheckpointHeader&) const = default;
};

struct Checkpoint {
  CheckpointHeader header;
  Params params;
};

/// Layout: the header as one JSON line, then a little-endian u64 tensor
/// count and per tensor (u32 name length, name bytes, u32 rank, u64 dims,
/// raw IEEE-754 doubles, little-endian). Accumulators are not stored.
void save_checkpoint(const std::filesystem::path& path,
                     const CheckpointHeader& header, const Params& params);
Checkpoint load_checkpoint(const std::filesystem::path& path);

std::string checkpoint_to_bytes(const CheckpointHeader& header,
                                const Params& params);
Checkpoint checkpoint_from_bytes(const std::string& bytes);

}  // namespace poselift::ad
