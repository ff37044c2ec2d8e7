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

#include "poselift/model/networks.hpp"

#include <cmath>
#include <string>

#include "poselift/batching.hpp"
#include "poselift/error.hpp"

namespace poselift::model {

using ad::Tensor;
using ad::Var;

void Linear::init(ad::Params& p, std::mt19937_64& rng, double gain) const {
  std::normal_distribution<double> n(0.0, gain / std::sqrt(static_cast<double>(in)));
  Tensor w({in, out});
  for (auto& v : w.values()) v = n(rng);
  p.add(name + ".w", std::move(w));
  p.add(name + ".b", Tensor({out}, 0.0));
}

Var Linear::forward(ad::Tape& t, const ad::Params& p, Var x) const {
  return ad::add_bias(ad::matmul(x, t.param(p, name + ".w")), t.param(p, name + ".b"));
}

RegressorG::RegressorG(std::string name, std::size_t in_dim, std::size_t out_dim,
                       std::size_t width, std::size_t depth)
    : name_(std::move(name)),
      input_{name_ + ".in", in_dim, width},
      output_{name_ + ".out", width, out_dim} {
  for (std::size_t d = 0; d < depth; ++d) {
    const std::string b = name_ + ".res" + std::to_string(d);
    blocks_.push_back({Linear{b + ".l1", width, width}, Linear{b + ".l2", width, width}});
  }
}

void RegressorG::init(ad::Params& p, std::mt19937_64& rng) const {
  input_.init(p, rng, std::sqrt(2.0));
  for (const auto& b : blocks_) {
    b[0].init(p, rng, std::sqrt(2.0));
    b[1].init(p, rng, 0.5);
  }
  output_.init(p, rng, 0.1);
}

void RegressorG::zero_output(ad::Params& p) const {
  for (auto* s : {".w", ".b"})
    for (auto& v : p.value(output_.name + s).values()) v = 0.0;
}

Var RegressorG::forward(ad::Tape& t, const ad::Params& p, Var x) const {
  if (x.shape().size() != 2 || x.shape()[1] != in_dim())
    throw ShapeError(name_ + ": expected input [n x " + std::to_string(in_dim()) +
                     "], got " + ad::shape_string(x.shape()));
  Var h = ad::relu(input_.forward(t, p, x));
  for (const auto& b : blocks_)
    h = ad::add(h, b[1].forward(t, p, ad::relu(b[0].forward(t, p, h))));
  return output_.forward(t, p, h);
}

void NetConfig::validate() const {
  if (width == 0) throw ConfigError("width must be positive");
}

void PoseNet::zero_output_layers() {
  for (const auto* g : regressors()) g->zero_output(params_);
}

void PoseNet::fit_input_normalization(const Tensor& x) {
  const std::size_t d = cfg_.evidence_dim();
  if (x.rank() != 2 || x.cols() != d)
    throw ShapeError("input normalization: expected [n x " + std::to_string(d) + "], got " +
                     ad::shape_string(x.shape()));
  Tensor& mean = params_.value("xnorm.mean");
  Tensor& inv = params_.value("xnorm.inv_std");
  const double n = static_cast<double>(x.rows());
  for (std::size_t c = 0; c < d; ++c) {
    double m = 0.0;
    for (std::size_t r = 0; r < x.rows(); ++r) m += x.at(r, c);
    m /= n;
    double v = 0.0;
    for (std::size_t r = 0; r < x.rows(); ++r) v += (x.at(r, c) - m) * (x.at(r, c) - m);
    const double sd = std::sqrt(v / n);
    mean[c] = m;
    // Probabilities keep their unit scale; standardising a rare class would
    // blow it up.
    inv[c] = c >= kCoordDim || sd <= 1e-8 ? 1.0 : 1.0 / sd;
  }
}

Var PoseNet::normalized_input(ad::Tape& t, Var x) const {
  const Tensor& mean = params_.value("xnorm.mean");
  const Tensor& inv = params_.value("xnorm.inv_std");
  if (x.shape().size() != 2 || x.shape()[1] != mean.size())
    throw ShapeError(kind() + " net: expected X [n x " + std::to_string(mean.size()) +
                     "], got " + ad::shape_string(x.shape()));
  const std::size_t n = x.shape()[0];
  Tensor neg({mean.size()}), scale({n, mean.size()});
  for (std::size_t c = 0; c < mean.size(); ++c) neg[c] = -mean[c];
  for (std::size_t r = 0; r < n; ++r)
    std::copy(inv.values().begin(), inv.values().end(), scale.data() + r * mean.size());
  return ad::mul(ad::add_bias(x, t.constant(std::move(neg))), t.constant(std::move(scale)));
}

void PoseNet::init_all(std::uint64_t seed) {
  params_.add("xnorm.mean", Tensor({cfg_.evidence_dim()}, 0.0));
  params_.add("xnorm.inv_std", Tensor({cfg_.evidence_dim()}, 1.0));
  std::uint64_t k = 0;
  for (const auto* g : regressors()) {
    std::mt19937_64 rng(derive_seed(seed, k++, 0x6e6574));
    g->init(params_, rng);
  }
}

nlohmann::json PoseNet::describe() const {
  nlohmann::json j;
  j["net"] = kind();
  j["width"] = cfg_.width;
  j["depth"] = cfg_.depth;
  j["use_attributes"] = cfg_.use_attributes;
  j["evidence_dim"] = cfg_.evidence_dim();
  for (const auto* g : regressors())
    j["input_dims"][g->name()] = g->in_dim();
  return j;
}

namespace {

constexpr std::size_t kT = group_dim(JointGroup::Torso);
constexpr std::size_t kP = group_dim(JointGroup::Proximal);
constexpr std::size_t kD = group_dim(JointGroup::Distal);

Var tapped(const Tap& tap, ad::Tape& t, int block, int group, Var y) {
  return tap ? tap(t, block, group, y) : y;
}

}  // namespace

ProgressiveNet::ProgressiveNet(NetConfig cfg, std::uint64_t seed) : PoseNet(cfg) {
  cfg.validate();
  const std::size_t x = cfg.evidence_dim(), w = cfg.width, d = cfg.depth;
  g_.emplace_back("g11", x, kT, w, d);
  g_.emplace_back("g12", x + kT, kP, w, d);
  g_.emplace_back("g13", x + kP + kT, kD, w, d);
  g_.emplace_back("g21", x + kP + kD, kT, w, d);
  g_.emplace_back("g22", x + kT + kD, kP, w, d);
  g_.emplace_back("g23", x + kT + kP, kD, w, d);
  init_all(seed);
}

const RegressorG& ProgressiveNet::g(int block, int group) const {
  if (block < 1 || block > 2 || group < 1 || group > 3)
    throw ConfigError("no regressor G" + std::to_string(block) + std::to_string(group));
  return g_[(block - 1) * 3 + (group - 1)];
}

std::vector<const RegressorG*> ProgressiveNet::regressors() const {
  std::vector<const RegressorG*> out;
  for (const auto& g : g_) out.push_back(&g);
  return out;
}

GroupOutputs ProgressiveNet::forward_block1(ad::Tape& t, Var x, const Tap& tap) const {
  const auto& p = params_;
  Var y11 = tapped(tap, t, 1, 1, g(1, 1).forward(t, p, x));
  Var y12 = tapped(tap, t, 1, 2, g(1, 2).forward(t, p, ad::concat({x, y11}, 1)));
  Var y13 = tapped(tap, t, 1, 3, g(1, 3).forward(t, p, ad::concat({x, y12, y11}, 1)));
  return {y11, y12, y13};
}

GroupOutputs ProgressiveNet::forward_block2(ad::Tape& t, Var x, Var y12, Var y13,
                                            const Tap& tap) const {
  const auto& p = params_;
  Var y21 = tapped(tap, t, 2, 1, g(2, 1).forward(t, p, ad::concat({x, y12, y13}, 1)));
  Var y22 = tapped(tap, t, 2, 2, g(2, 2).forward(t, p, ad::concat({x, y21, y13}, 1)));
  Var y23 = tapped(tap, t, 2, 3, g(2, 3).forward(t, p, ad::concat({x, y21, y22}, 1)));
  return {y21, y22, y23};
}

std::vector<GroupOutputs> ProgressiveNet::forward(ad::Tape& t, Var x, const Tap& tap) const {
  x = normalized_input(t, x);
  const GroupOutputs b1 = forward_block1(t, x, tap);
  return {b1, forward_block2(t, x, b1[1], b1[2], tap)};
}

BaselineNet::BaselineNet(NetConfig cfg, std::uint64_t seed) : PoseNet(cfg) {
  cfg.validate();
  const std::size_t x = cfg.evidence_dim();
  g_.emplace_back("g1", x, kT, cfg.width, cfg.depth);
  g_.emplace_back("g2", x, kP, cfg.width, cfg.depth);
  g_.emplace_back("g3", x, kD, cfg.width, cfg.depth);
  init_all(seed);
}

const RegressorG& BaselineNet::g(int group) const {
  if (group < 1 || group > 3) throw ConfigError("no regressor G" + std::to_string(group));
  return g_[group - 1];
}

std::vector<const RegressorG*> BaselineNet::regressors() const {
  std::vector<const RegressorG*> out;
  for (const auto& g : g_) out.push_back(&g);
  return out;
}

std::vector<GroupOutputs> BaselineNet::forward(ad::Tape& t, Var x, const Tap& tap) const {
  x = normalized_input(t, x);
  GroupOutputs out;
  for (int k = 0; k < 3; ++k)
    out[k] = tapped(tap, t, 1, k + 1, g_[k].forward(t, params_, x));
  return {out};
}

std::unique_ptr<PoseNet> make_net(const std::string& kind, const NetConfig& cfg,
                                  std::uint64_t seed) {
  if (kind == "progressive") return std::make_unique<ProgressiveNet>(cfg, seed);
  if (kind == "baseline") return std::make_unique<BaselineNet>(cfg, seed);
  throw ConfigError("unknown net '" + kind + "' (expected progressive or baseline)");
}

void HeadConfig::validate() const {
  if (width == 0 || depth == 0 || domain_width == 0)
    throw ConfigError("head width, depth and domain_width must be positive");
  if (heatmaps && (heatmap_size < 2 || !(heatmap_sigma > 0.0) || !(beta_softargmax > 0.0)))
    throw ConfigError("heatmap_size must be >= 2 and sigma, beta positive");
}

MultiTaskHead::MultiTaskHead(HeadConfig cfg, std::uint64_t seed) : cfg_(cfg) {
  cfg_.validate();
  std::size_t in = cfg_.input_dim();
  for (std::size_t d = 0; d < cfg_.depth; ++d) {
    trunk_.push_back(Linear{std::string(kTrunk) + "." + std::to_string(d), in, cfg_.width});
    in = cfg_.width;
  }
  attr_ = Linear{std::string(kAttr) + ".out", cfg_.width, kAttrProbDim};
  domain_hidden_ = Linear{std::string(kDomain) + ".hidden", cfg_.width, cfg_.domain_width};
  domain_out_ = Linear{std::string(kDomain) + ".out", cfg_.domain_width, 2};

  std::mt19937_64 rng(derive_seed(seed, 0x68656164));
  for (const auto& l : trunk_) l.init(params_, rng, std::sqrt(2.0));
  attr_.init(params_, rng, 1.0);
  domain_hidden_.init(params_, rng, std::sqrt(2.0));
  domain_out_.init(params_, rng, 1.0);
}

MultiTaskHead::Output MultiTaskHead::forward(ad::Tape& t, Var coords, double lambda_grl) const {
  if (coords.shape().size() != 2 || coords.shape()[1] != kCoordDim)
    throw ShapeError("head: expected coordinates [n x 32], got " +
                     ad::shape_string(coords.shape()));
  const std::size_t n = coords.shape()[0];
  Var h = coords;
  if (cfg_.heatmaps) {
    const std::size_t s = cfg_.heatmap_size;
    Var maps = t.constant(render_heatmaps(coords.value(), s, cfg_.heatmap_sigma));
    Var grid = ad::soft_argmax2d_rows(maps, s, s, cfg_.beta_softargmax);
    // Grid cells back to [-1, 1].
    Var unit = ad::add(ad::scale(grid, 2.0 / static_cast<double>(s - 1)),
                       t.constant(Tensor({n * kNumJoints, 2}, -1.0)));
    h = ad::concat({coords, ad::reshape(unit, {n, kCoordDim})}, 1);
  }
  for (const auto& l : trunk_) h = ad::relu(l.forward(t, params_, h));

  Output out;
  out.feature = h;
  out.attr_logits = attr_.forward(t, params_, h);
  out.attr_probs = ad::reshape(
      ad::softmax_rows(ad::reshape(out.attr_logits, {n * kNumAttributeJoints, 3})),
      {n, kAttrProbDim});
  Var f = lambda_grl > 0.0 ? ad::grad_reversal(h, lambda_grl) : ad::stop_gradient(h);
  out.domain_logits =
      domain_out_.forward(t, params_, ad::relu(domain_hidden_.forward(t, params_, f)));
  return out;
}

nlohmann::json MultiTaskHead::describe() const {
  return {{"width", cfg_.width},
          {"depth", cfg_.depth},
          {"domain_width", cfg_.domain_width},
          {"heatmaps", cfg_.heatmaps},
          {"heatmap_size", cfg_.heatmap_size},
          {"heatmap_sigma", cfg_.heatmap_sigma},
          {"beta_softargmax", cfg_.beta_softargmax},
          {"input_dim", cfg_.input_dim()}};
}

Tensor render_heatmaps(const Tensor& coords, std::size_t size, double sigma) {
  if (coords.rank() != 2 || coords.cols() != kCoordDim)
    throw ShapeError("render_heatmaps: expected [n x 32], got " +
                     ad::shape_string(coords.shape()));
  const std::size_t n = coords.rows();
  Tensor maps({n * kNumJoints, size * size});
  const double span = static_cast<double>(size - 1);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t j = 0; j < kNumJoints; ++j) {
      const double cx = (coords.at(r, 2 * j) + 1.0) * 0.5 * span;
      const double cy = (coords.at(r, 2 * j + 1) + 1.0) * 0.5 * span;
      double* row = maps.data() + (r * kNumJoints + j) * size * size;
      for (std::size_t y = 0; y < size; ++y)
        for (std::size_t x = 0; x < size; ++x) {
          const double dx = static_cast<double>(x) - cx, dy = static_cast<double>(y) - cy;
          row[y * size + x] = std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma));
        }
    }
  return maps;
}

}  // namespace poselift::model
