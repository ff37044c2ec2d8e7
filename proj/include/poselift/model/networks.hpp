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

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "poselift/autodiff/ops.hpp"
#include "poselift/autodiff/params.hpp"
#include "poselift/model/evidence.hpp"

namespace poselift::model {

/// Dense layer `name.w` [in x out], `name.b` [out].
struct Linear {
  std::string name;
  std::size_t in = 0;
  std::size_t out = 0;

  void init(ad::Params& p, std::mt19937_64& rng, double gain) const;
  ad::Var forward(ad::Tape& t, const ad::Params& p, ad::Var x) const;
};

/// Residual MLP: input linear to width w and relu, `depth` blocks of
/// h + lin2(relu(lin1(h))), then an output linear layer.
class RegressorG {
 public:
  RegressorG(std::string name, std::size_t in_dim, std::size_t out_dim,
             std::size_t width, std::size_t depth);

  const std::string& name() const { return name_; }
  std::size_t in_dim() const { return input_.in; }
  std::size_t out_dim() const { return output_.out; }

  void init(ad::Params& p, std::mt19937_64& rng) const;
  void zero_output(ad::Params& p) const;
  ad::Var forward(ad::Tape& t, const ad::Params& p, ad::Var x) const;

 private:
  std::string name_;
  Linear input_;
  std::vector<std::array<Linear, 2>> blocks_;
  Linear output_;
};

struct NetConfig {
  std::size_t width = 256;
  std::size_t depth = 2;
  /// Whether X carries the 27 attribute probabilities after the coordinates.
  bool use_attributes = true;

  std::size_t evidence_dim() const { return use_attributes ? kEvidenceDim : kCoordDim; }
  void validate() const;
};

/// Predicted group tensors (torso, proximal, distal), each [n x 3*|group|].
using GroupOutputs = std::array<ad::Var, 3>;

/// Called on every group prediction before anything downstream reads it;
/// block and group are 1-based. Used to inject perturbations in tests.
using Tap = std::function<ad::Var(ad::Tape&, int block, int group, ad::Var)>;

class PoseNet {
 public:
  virtual ~PoseNet() = default;

  /// "progressive" or "baseline".
  virtual std::string kind() const = 0;
  /// Group outputs of every block in internal units; the last block is the
  /// final prediction.
  virtual std::vector<GroupOutputs> forward(ad::Tape& t, ad::Var x,
                                            const Tap& tap = {}) const = 0;
  virtual std::vector<const RegressorG*> regressors() const = 0;

  const NetConfig& config() const { return cfg_; }
  ad::Params& params() { return params_; }
  const ad::Params& params() const { return params_; }
  void zero_output_layers();
  nlohmann::json describe() const;

  /// Per-dimension standardisation of X applied before every regressor,
  /// fitted on training evidence. Stored as the untrained parameters
  /// "xnorm.mean" and "xnorm.inv_std"; identity until fitted.
  void fit_input_normalization(const ad::Tensor& x);

 protected:
  /// Standardised X; forward() implementations call this first.
  ad::Var normalized_input(ad::Tape& t, ad::Var x) const;

  explicit PoseNet(NetConfig cfg) : cfg_(cfg) {}
  void init_all(std::uint64_t seed);

  NetConfig cfg_;
  ad::Params params_;
};

/// Two progressive blocks of three group regressors. Block I runs torso,
/// proximal, distal; block II re-estimates torso from the block-I limbs and
/// then proximal and distal from the refined torso.
class ProgressiveNet : public PoseNet {
 public:
  ProgressiveNet(NetConfig cfg, std::uint64_t seed);

  std::string kind() const override { return "progressive"; }
  std::vector<GroupOutputs> forward(ad::Tape& t, ad::Var x,
                                    const Tap& tap = {}) const override;
  std::vector<const RegressorG*> regressors() const override;

  GroupOutputs forward_block1(ad::Tape& t, ad::Var x, const Tap& tap = {}) const;
  GroupOutputs forward_block2(ad::Tape& t, ad::Var x, ad::Var y12, ad::Var y13,
                              const Tap& tap = {}) const;
  /// Regressor G_ij, i in {1,2}, j in {1,2,3}.
  const RegressorG& g(int block, int group) const;

 private:
  std::vector<RegressorG> g_;
};

/// Three independent group regressors reading only X.
class BaselineNet : public PoseNet {
 public:
  BaselineNet(NetConfig cfg, std::uint64_t seed);

  std::string kind() const override { return "baseline"; }
  std::vector<GroupOutputs> forward(ad::Tape& t, ad::Var x,
                                    const Tap& tap = {}) const override;
  std::vector<const RegressorG*> regressors() const override;
  const RegressorG& g(int group) const;

 private:
  std::vector<RegressorG> g_;
};

/// Throws ConfigError for an unknown kind.
std::unique_ptr<PoseNet> make_net(const std::string& kind, const NetConfig& cfg,
                                  std::uint64_t seed);

struct HeadConfig {
  std::size_t width = 128;
  /// Hidden layers of the shared trunk.
  std::size_t depth = 2;
  std::size_t domain_width = 64;
  /// Also feed soft-argmax coordinates of rendered Gaussian heatmaps.
  bool heatmaps = false;
  std::size_t heatmap_size = 16;
  double heatmap_sigma = 1.0;
  double beta_softargmax = 20.0;

  std::size_t input_dim() const { return heatmaps ? 2 * kCoordDim : kCoordDim; }
  void validate() const;
};

/// Shared trunk over the normalised 2D pose with an attribute branch (nine
/// 3-way classifiers) and a domain branch behind gradient reversal.
class MultiTaskHead {
 public:
  MultiTaskHead(HeadConfig cfg, std::uint64_t seed);

  struct Output {
    ad::Var feature;
    /// [n x 27] logits and their per-joint softmax.
    ad::Var attr_logits;
    ad::Var attr_probs;
    /// [n x 2]
    ad::Var domain_logits;
  };

  /// `coords` is [n x 32] normalised coordinates. With lambda_grl > 0 the
  /// domain branch sits behind grad_reversal(lambda_grl); otherwise behind
  /// stop_gradient, so the trunk never sees the domain loss.
  Output forward(ad::Tape& t, ad::Var coords, double lambda_grl) const;

  const HeadConfig& config() const { return cfg_; }
  ad::Params& params() { return params_; }
  const ad::Params& params() const { return params_; }
  nlohmann::json describe() const;

  /// Parameter-name prefixes of the trunk and the two branches.
  static constexpr const char* kTrunk = "trunk";
  static constexpr const char* kAttr = "attr";
  static constexpr const char* kDomain = "domain";

 private:
  HeadConfig cfg_;
  ad::Params params_;
  std::vector<Linear> trunk_;
  Linear attr_;
  Linear domain_hidden_;
  Linear domain_out_;
};

/// Gaussian heatmaps of the joints in `coords` ([n x 32], normalised), one
/// row per (sample, joint): [16n x size*size].
ad::Tensor render_heatmaps(const ad::Tensor& coords, std::size_t size, double sigma);

}  // namespace poselift::model
