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
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "poselift/geometry.hpp"
#include "poselift/model/losses.hpp"
#include "poselift/model/networks.hpp"

namespace poselift::model {

/// Training configuration. Zero for epochs, lr or batch_size means "use the
/// stage default".
struct TrainConfig {
  int stage = 2;
  std::size_t epochs = 0;
  double lr = 0.0;
  std::size_t batch_size = 0;
  /// "cosine" anneals per step from lr to lr_final_fraction * lr;
  /// "constant" keeps lr.
  std::string lr_schedule = "cosine";
  double lr_final_fraction = 0.01;
  double lambda_grl = 1.0;
  double lambda_attr = 1.0;
  double lambda_domain = 0.1;
  /// False trains the domain classifier behind stop_gradient instead of the
  /// reversal layer.
  bool domain_adaptation = true;
  std::uint64_t seed = 0;
  /// "relative" or "absolute"; attribute labels are recomputed from pose3d
  /// with this threshold before training.
  std::string tau_mode = "relative";
  double tau_value = 0.1;
  std::string net = "progressive";
  NetConfig net_cfg;
  HeadConfig head_cfg;

  /// Stage defaults: 60 epochs, lr 5e-4, batch 12 for stage 1; 60 epochs,
  /// lr 2.5e-4, batch 64 for stage 2; 40 epochs, lr 1e-4, batch 64 for
  /// stage 3.
  std::size_t resolved_epochs() const;
  double resolved_lr() const;
  std::size_t resolved_batch_size() const;
  TauSpec tau() const;
  /// Learning rate at optimizer step `step` of `total`.
  double lr_at(std::size_t step, std::size_t total) const;

  void validate() const;
  nlohmann::json to_json() const;
  /// Unknown keys are a ConfigError.
  static TrainConfig from_json(const nlohmann::json& j);
};

struct EpochStats {
  std::size_t epoch = 0;
  double loss_total = 0.0;
  double loss_3d = 0.0;
  double loss_attr = 0.0;
  double loss_domain = 0.0;
  /// Training-batch domain classifier accuracy.
  double domain_acc = 0.0;
  double attr_acc = 0.0;
};
using History = std::vector<EpochStats>;

/// Copy of `ds` with attributes recomputed from pose3d. Records whose torso
/// is degenerate keep their stored labels.
Dataset relabel(const Dataset& ds, const TauSpec& tau);

/// Stage 1. Attribute loss on the Labeled3D half of every mixed batch,
/// domain loss on both halves (A = 0, B = 1).
History train_multitask(MultiTaskHead& head, const Dataset& a, const Dataset& b,
                        const TrainConfig& cfg);

/// Stage 2 trains `net` on ground-truth attributes with the 3D loss; `head`
/// is unused. Stage 3 fine-tunes head and net jointly on
/// L3D + lambda_attr * Lattr + lambda_domain * Ldomain, the evidence
/// carrying the head's attribute probabilities; `unlabeled` supplies the
/// second domain when given.
History train_pose(PoseNet& net, MultiTaskHead* head, const Dataset& ds,
                   const TrainConfig& cfg, const Dataset* unlabeled = nullptr);

enum class AttrSource { Head, Oracle };

struct Prediction {
  Pose3D pose;    // final, block II for the progressive net
  Pose3D block1;  // first block, equal to `pose` for the baseline
  AttrProbs attrs{};
};

/// Single-sample inference.
Prediction predict(const PoseNet& net, const MultiTaskHead& head, const Pose2D& p);

/// Inference over records in fixed 64-row chunks aligned to index 0, so a
/// record's output never depends on which other records share its call.
/// Oracle attributes need every record to carry labels.
std::vector<Prediction> predict_records(const PoseNet& net, const MultiTaskHead* head,
                                        std::span<const SampleRecord> records,
                                        AttrSource source);
inline constexpr std::size_t kPredictChunk = 64;

std::vector<AttrProbs> predict_attributes(const MultiTaskHead& head,
                                          std::span<const SampleRecord> records);
/// Argmax of the domain branch per record.
std::vector<int> predict_domains(const MultiTaskHead& head,
                                 std::span<const SampleRecord> records);

// Checkpoints. Header kind is "multitask" for a head alone, "pose" for a net
// with its head. Parameters are stored under "head." and "net.".

void save_head(const std::filesystem::path& path, const MultiTaskHead& head,
               std::uint64_t seed);
void save_model(const std::filesystem::path& path, const PoseNet& net,
                const MultiTaskHead& head, std::uint64_t seed);

struct LoadedModel {
  std::unique_ptr<MultiTaskHead> head;
  std::unique_ptr<PoseNet> net;  // null for a head-only checkpoint
  std::uint64_t seed = 0;
};
LoadedModel load_model(const std::filesystem::path& path);

}  // namespace poselift::model
