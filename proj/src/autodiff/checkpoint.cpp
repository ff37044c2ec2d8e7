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

#include "poselift/autodiff/checkpoint.hpp"

#include <bit>
#include <fstream>
#include <sstream>

#include "poselift/error.hpp"

namespace poselift::ad {

namespace {

template <typename U>
void put_le(std::string& out, U v) {
  for (std::size_t i = 0; i < sizeof(U); ++i)
    out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

class Reader {
 public:
  explicit Reader(const std::string& s, std::size_t pos) : s_(s), pos_(pos) {}

  template <typename U>
  U get_le() {
    need(sizeof(U));
    U v = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i)
      v |= static_cast<U>(static_cast<unsigned char>(s_[pos_ + i])) << (8 * i);
    pos_ += sizeof(U);
    return v;
  }
  std::string bytes(std::size_t n) {
    need(n);
    std::string out = s_.substr(pos_, n);
    pos_ += n;
    return out;
  }
  bool done() const { return pos_ == s_.size(); }

 private:
  void need(std::size_t n) const {
    if (pos_ + n > s_.size()) throw ParseError("checkpoint: truncated file");
  }
  const std::string& s_;
  std::size_t pos_;
};

}  // namespace

std::string checkpoint_to_bytes(const CheckpointHeader& header,
                                const Params& params) {
  nlohmann::json h;
  h["format_version"] = header.format_version;
  h["kind"] = header.kind;
  h["layer_sizes"] = header.layer_sizes;
  h["seed"] = header.seed;
  std::string out = h.dump();
  out.push_back('\n');
  put_le<std::uint64_t>(out, params.size());
  for (const auto& name : params.names()) {
    const Tensor& t = params.value(name);
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(name.size()));
    out += name;
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(t.rank()));
    for (auto d : t.shape()) put_le<std::uint64_t>(out, d);
    for (double v : t.values()) put_le<std::uint64_t>(out, std::bit_cast<std::uint64_t>(v));
  }
  return out;
}

Checkpoint checkpoint_from_bytes(const std::string& bytes) {
  const auto nl = bytes.find('\n');
  if (nl == std::string::npos) throw ParseError("checkpoint: missing header line");
  Checkpoint ck;
  try {
    const auto h = nlohmann::json::parse(bytes.substr(0, nl));
    ck.header.format_version = h.at("format_version").get<int>();
    ck.header.kind = h.at("kind").get<std::string>();
    ck.header.layer_sizes = h.at("layer_sizes");
    ck.header.seed = h.at("seed").get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("checkpoint: bad header: ") + e.what());
  }
  if (ck.header.format_version != 1)
    throw ParseError("checkpoint: unsupported format_version");
  Reader rd(bytes, nl + 1);
  const auto count = rd.get_le<std::uint64_t>();
  for (std::uint64_t k = 0; k < count; ++k) {
    const auto len = rd.get_le<std::uint32_t>();
    std::string name = rd.bytes(len);
    const auto rank = rd.get_le<std::uint32_t>();
    if (rank == 0 || rank > 8) throw ParseError("checkpoint: bad rank for '" + name + "'");
    Shape shape(rank);
    for (auto& d : shape) d = rd.get_le<std::uint64_t>();
    const std::size_t n = shape_size(shape);
    if (n > (1ULL << 32)) throw ParseError("checkpoint: tensor '" + name + "' too large");
    std::vector<double> data(n);
    for (auto& v : data) v = std::bit_cast<double>(rd.get_le<std::uint64_t>());
    ck.params.add(name, Tensor(std::move(shape), std::move(data)));
  }
  if (!rd.done()) throw ParseError("checkpoint: trailing bytes");
  return ck;
}

void save_checkpoint(const std::filesystem::path& path,
                     const CheckpointHeader& header, const Params& params) {
  const std::string bytes = checkpoint_to_bytes(header, params);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write checkpoint '" + path.string() + "'");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return checkpoint_from_bytes(buf.str());
}

}  // namespace poselift::ad
