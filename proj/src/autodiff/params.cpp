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

#include "poselift/autodiff/params.hpp"

#include "poselift/error.hpp"

namespace poselift::ad {

void Params::add(const std::string& name, Tensor init) {
  if (contains(name)) throw ConfigError("duplicate parameter '" + name + "'");
  Tensor acc(init.shape(), 0.0);
  entries_.emplace(name, Entry{std::move(init), std::move(acc)});
}

const Tensor& Params::value(const std::string& name) const {
  auto it = entries_.find(name);
  if (it == entries_.end()) throw ShapeError("unknown parameter '" + name + "'");
  return it->second.value;
}

Tensor& Params::value(const std::string& name) {
  auto it = entries_.find(name);
  if (it == entries_.end()) throw ShapeError("unknown parameter '" + name + "'");
  return it->second.value;
}

const Tensor& Params::accumulator(const std::string& name) const {
  auto it = entries_.find(name);
  if (it == entries_.end()) throw ShapeError("unknown parameter '" + name + "'");
  return it->second.acc;
}

Tensor& Params::accumulator(const std::string& name) {
  auto it = entries_.find(name);
  if (it == entries_.end()) throw ShapeError("unknown parameter '" + name + "'");
  return it->second.acc;
}

std::vector<std::string> Params::names() const {
  std::vector<std::string> out;
  out.reserve(entries_.size());
  for (const auto& [k, v] : entries_) out.push_back(k);
  return out;
}

std::size_t Params::parameter_count() const {
  std::size_t n = 0;
  for (const auto& [k, v] : entries_) n += v.value.size();
  return n;
}

void Params::assign_from(const Params& other) {
  for (const auto& [k, v] : other.entries_) {
    auto it = entries_.find(k);
    if (it == entries_.end())
      throw ShapeError("checkpoint tensor '" + k + "' has no matching parameter");
    if (it->second.value.shape() != v.value.shape())
      throw ShapeError("parameter '" + k + "' expects shape " +
                       shape_string(it->second.value.shape()) + ", checkpoint has " +
                       shape_string(v.value.shape()));
    it->second.value = v.value;
  }
}

void Params::merge(const Params& other, const std::string& prefix) {
  for (const auto& [k, v] : other.entries_) {
    if (contains(prefix + k)) throw ConfigError("duplicate parameter '" + prefix + k + "'");
    entries_.emplace(prefix + k, v);
  }
}

Params Params::extract(const std::string& prefix) const {
  Params out;
  for (const auto& [k, v] : entries_)
    if (k.compare(0, prefix.size(), prefix) == 0)
      out.entries_.emplace(k.substr(prefix.size()), v);
  return out;
}

bool Params::operator==(const Params& o) const {
  if (entries_.size() != o.entries_.size()) return false;
  for (auto a = entries_.begin(), b = o.entries_.begin(); a != entries_.end(); ++a, ++b)
    if (a->first != b->first || !(a->second.value == b->second.value)) return false;
  return true;
}

}  // namespace poselift::ad
