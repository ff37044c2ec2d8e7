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
#include <map>
#include <string>
#include <vector>

#include "poselift/autodiff/tensor.hpp"

namespace poselift::ad {

/// Named trainable tensors plus per-tensor RMSprop accumulators.
class Params {
 public:
  void add(const std::string& name, Tensor init);
  bool contains(const std::string& name) const { return entries_.count(name) > 0; }
  const Tensor& value(const std::string& name) const;
  Tensor& value(const std::string& name);
  const Tensor& accumulator(const std::string& name) const;
  Tensor& accumulator(const std::string& name);
  std::vector<std::string> names() const;
  std::size_t size() const { return entries_.size(); }
  std::size_t parameter_count() const;

  /// Copies every entry of `other` whose name is present here, checking
  /// shapes; unknown names are an error.
  void assign_from(const Params& other);
  /// Adds every entry of `other` under `prefix`.
  void merge(const Params& other, const std::string& prefix = "");
  /// Entries whose name starts with `prefix`, prefix stripped.
  Params extract(const std::string& prefix) const;

  bool operator==(const Params& o) const;

 private:
  struct Entry {
    Tensor value;
    Tensor acc;
  };
  std::map<std::string, Entry> entries_;
};

}  // namespace poselift::ad
