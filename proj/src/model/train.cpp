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

#include "poselift/model/train.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "poselift/autodiff/checkpoint.hpp"
#include "poselift/autodiff/rmsprop.hpp"
#include "poselift/batching.hpp"
#include "poselift/error.hpp"

namespace poselift::model {

using ad::Tensor;
using ad::Var;
using nlohmann::json;

std::size_t TrainConfig::resolved_epochs() const {
  if (epochs) return epochs;
  return stage == 3 ? 40 : 60;
}

double TrainConfig::resolved_lr() const {
  if (lr > 0.0) return lr;
  return stage == 1 ? 5e-4 : stage == 2 ? 2.5e-4 : 1e-4;
}

std::size_t TrainConfig::resolved_batch_size() const {
  if (batch_size) return batch_size;
  return stage == 1 ? 12 : 64;
}

TauSpec TrainConfig::tau() const {
  return tau_mode == "absolute" ? TauSpec::absolute(tau_value) : TauSpec::relative(tau_value);
}

double TrainConfig::lr_at(std::size_t step, std::size_t total) const {
  const double base = resolved_lr();
  if (lr_schedule == "constant" || total <= 1) return base;
  const double t = static_cast<double>(step) / static_cast<double>(total - 1);
  const double f = lr_final_fraction;
  return base * (f + (1.0 - f) * 0.5 * (1.0 + std::cos(std::numbers::pi * t)));
}

void TrainConfig::validate() const {
  if (stage < 1 || stage > 3) throw ConfigError("stage must be 1, 2 or 3");
  if (lr < 0.0) throw ConfigError("lr must be >= 0");
  if (lr_schedule != "cosine" && lr_schedule != "constant")
    throw ConfigError("lr_schedule must be 'cosine' or 'constant', got '" + lr_schedule + "'");
  if (!(lr_final_fraction > 0.0) || lr_final_fraction > 1.0)
    throw ConfigError("lr_final_fraction must be in (0, 1]");
  if (domain_adaptation && !(lambda_grl > 0.0))
    throw ConfigError("lambda_grl must be > 0 (set domain_adaptation=false to disable)");
  if (lambda_attr < 0.0 || lambda_domain < 0.0)
    throw ConfigError("lambda_attr and lambda_domain must be >= 0");
  if (tau_mode != "relative" && tau_mode != "absolute")
    throw ConfigError("tau_mode must be 'relative' or 'absolute', got '" + tau_mode + "'");
  tau().validate();
  if (net != "progressive" && net != "baseline")
    throw ConfigError("net must be 'progressive' or 'baseline', got '" + net + "'");
  if (stage == 1 && resolved_batch_size() % 2 != 0)
    throw ConfigError("stage 1 batch_size must be even (half from each domain)");
  net_cfg.validate();
  head_cfg.validate();
}

json TrainConfig::to_json() const {
  return {{"stage", stage},
          {"epochs", resolved_epochs()},
          {"lr", resolved_lr()},
          {"batch_size", resolved_batch_size()},
          {"lr_schedule", lr_schedule},
          {"lr_final_fraction", lr_final_fraction},
          {"lambda_grl", lambda_grl},
          {"lambda_attr", lambda_attr},
          {"lambda_domain", lambda_domain},
          {"domain_adaptation", domain_adaptation},
          {"seed", seed},
          {"tau_mode", tau_mode},
          {"tau_value", tau_value},
          {"net", net},
          {"width", net_cfg.width},
          {"depth", net_cfg.depth},
          {"use_attributes", net_cfg.use_attributes},
          {"head_width", head_cfg.width},
          {"head_depth", head_cfg.depth},
          {"domain_width", head_cfg.domain_width},
          {"heatmaps", head_cfg.heatmaps},
          {"heatmap_size", head_cfg.heatmap_size},
          {"heatmap_sigma", head_cfg.heatmap_sigma},
          {"beta_softargmax", head_cfg.beta_softargmax}};
}

TrainConfig TrainConfig::from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("training config must be a JSON object");
  TrainConfig c;
  for (const auto& [k, v] : j.items()) {
    try {
      if (k == "stage") c.stage = v.get<int>();
      else if (k == "epochs") c.epochs = v.get<std::size_t>();
      else if (k == "lr") c.lr = v.get<double>();
      else if (k == "batch_size") c.batch_size = v.get<std::size_t>();
      else if (k == "lr_schedule") c.lr_schedule = v.get<std::string>();
      else if (k == "lr_final_fraction") c.lr_final_fraction = v.get<double>();
      else if (k == "lambda_grl") c.lambda_grl = v.get<double>();
      else if (k == "lambda_attr") c.lambda_attr = v.get<double>();
      else if (k == "lambda_domain") c.lambda_domain = v.get<double>();
      else if (k == "domain_adaptation") c.domain_adaptation = v.get<bool>();
      else if (k == "seed") c.seed = v.get<std::uint64_t>();
      else if (k == "tau_mode") c.tau_mode = v.get<std::string>();
      else if (k == "tau_value") c.tau_value = v.get<double>();
      else if (k == "net") c.net = v.get<std::string>();
      else if (k == "width") c.net_cfg.width = v.get<std::size_t>();
      else if (k == "depth") c.net_cfg.depth = v.get<std::size_t>();
      else if (k == "use_attributes") c.net_cfg.use_attributes = v.get<bool>();
      else if (k == "head_width") c.head_cfg.width = v.get<std::size_t>();
      else if (k == "head_depth") c.head_cfg.depth = v.get<std::size_t>();
      else if (k == "domain_width") c.head_cfg.domain_width = v.get<std::size_t>();
      else if (k == "heatmaps") c.head_cfg.heatmaps = v.get<bool>();
      else if (k == "heatmap_size") c.head_cfg.heatmap_size = v.get<std::size_t>();
      else if (k == "heatmap_sigma") c.head_cfg.heatmap_sigma = v.get<double>();
      else if (k == "beta_softargmax") c.head_cfg.beta_softargmax = v.get<double>();
      else throw ConfigError("unknown training config key '" + k + "'");
    } catch (const json::exception& e) {
      throw ConfigError("training config key '" + k + "': " + e.what());
    }
  }
  return c;
}

Dataset relabel(const Dataset& ds, const TauSpec& tau) {
  Dataset out = ds;
  for (auto& r : out.records) {
    if (!r.pose3d) continue;
    try {
      r.attributes = compute_attributes(*r.pose3d, tau);
    } catch (const DegenerateError&) {
      if (!r.attributes)
        throw DataError("record '" + r.id + "' has a degenerate torso and no stored attributes");
    }
  }
  return out;
}

namespace {

std::vector<std::size_t> iota(std::size_t n) {
  std::vector<std::size_t> v(n);
  std::iota(v.begin(), v.end(), std::size_t{0});
  return v;
}

const AttributeVector& labels_of(const SampleRecord& r) {
  if (!r.attributes) throw DataError("record '" + r.id + "' has no attribute labels");
  return *r.attributes;
}

void require_3d(const Dataset& ds, const char* what) {
  if (ds.records.empty()) throw DataError(std::string(what) + " dataset is empty");
  for (const auto& r : ds.records)
    if (!r.pose3d)
      throw DataError(std::string(what) + " dataset record '" + r.id + "' has no 3D pose");
}

Tensor stack_rows(const Tensor& top, const Tensor& bottom) {
  Tensor out({top.rows() + bottom.rows(), top.cols()});
  std::copy(top.values().begin(), top.values().end(), out.data());
  std::copy(bottom.values().begin(), bottom.values().end(), out.data() + top.size());
  return out;
}

int argmax_row(const Tensor& t, std::size_t r) {
  int best = 0;
  for (std::size_t c = 1; c < t.cols(); ++c)
    if (t.at(r, c) > t.at(r, static_cast<std::size_t>(best))) best = static_cast<int>(c);
  return best;
}

// Correct attribute predictions among the first `rows` rows of logits.
std::size_t attr_hits(const Tensor& logits, std::span<const AttributeVector> labels) {
  std::size_t hits = 0;
  for (std::size_t r = 0; r < labels.size(); ++r)
    for (std::size_t j = 0; j < kNumAttributeJoints; ++j) {
      std::size_t best = 0;
      for (std::size_t c = 1; c < 3; ++c)
        if (logits.at(r, 3 * j + c) > logits.at(r, 3 * j + best)) best = c;
      hits += best == static_cast<std::size_t>(labels[r].labels[j]);
    }
  return hits;
}

void split_step(const ad::Gradients& grads, ad::Params& a, ad::Params* b,
                const ad::RmsPropConfig& opt) {
  ad::Gradients ga, gb;
  for (const auto& [k, v] : grads) {
    if (a.contains(k)) ga.emplace(k, v);
    else if (b && b->contains(k)) gb.emplace(k, v);
    else throw ShapeError("gradient for unknown parameter '" + k + "'");
  }
  ad::rmsprop_step(a, ga, opt);
  if (b) ad::rmsprop_step(*b, gb, opt);
}

double head_lambda(const TrainConfig& cfg) {
  return cfg.domain_adaptation ? cfg.lambda_grl : 0.0;
}

}  // namespace

History train_multitask(MultiTaskHead& head, const Dataset& a_in, const Dataset& b,
                        const TrainConfig& cfg) {
  cfg.validate();
  require_3d(a_in, "labeled");
  if (b.records.empty()) throw DataError("unlabeled dataset is empty");
  const Dataset a = relabel(a_in, cfg.tau());
  const std::size_t bs = cfg.resolved_batch_size();
  const MixedBatcher batcher(a.records.size(), b.records.size(), bs, cfg.seed);
  const std::size_t total_steps = cfg.resolved_epochs() * batcher.batches_per_epoch();
  std::size_t step = 0;

  History hist;
  for (std::size_t e = 0; e < cfg.resolved_epochs(); ++e) {
    EpochStats st;
    st.epoch = e;
    std::size_t rows = 0, dom_hits = 0, attr_total = 0, a_hits = 0, batches = 0;
    for (const MixedBatch& mb : batcher.epoch(e)) {
      const std::size_t h = mb.a.size();
      ad::Tape t;
      Var coords = t.constant(stack_rows(coord_batch(a, mb.a), coord_batch(b, mb.b)));
      const auto out = head.forward(t, coords, head_lambda(cfg));

      std::vector<AttributeVector> labels;
      for (auto i : mb.a) labels.push_back(labels_of(a.records[i]));
      const auto a_rows = iota(h);
      Var la = loss_attr(ad::gather_rows(out.attr_logits, a_rows), labels);
      std::vector<int> doms(2 * h, 0);
      std::fill(doms.begin() + static_cast<long>(h), doms.end(), 1);
      Var ld = loss_domain(out.domain_logits, doms);
      Var total = ad::add(la, ld);
      ad::rmsprop_step(head.params(), t.backward(total), {cfg.lr_at(step++, total_steps)});

      st.loss_attr += la.value()[0];
      st.loss_domain += ld.value()[0];
      st.loss_total += total.value()[0];
      for (std::size_t r = 0; r < 2 * h; ++r)
        dom_hits += argmax_row(out.domain_logits.value(), r) == doms[r];
      a_hits += attr_hits(out.attr_logits.value(), labels);
      attr_total += h * kNumAttributeJoints;
      rows += 2 * h;
      ++batches;
    }
    st.loss_attr /= static_cast<double>(batches);
    st.loss_domain /= static_cast<double>(batches);
    st.loss_total /= static_cast<double>(batches);
    st.domain_acc = static_cast<double>(dom_hits) / static_cast<double>(rows);
    st.attr_acc = static_cast<double>(a_hits) / static_cast<double>(attr_total);
    hist.push_back(st);
  }
  return hist;
}

namespace {

Tensor oracle_evidence(const Dataset& a, std::span<const std::size_t> idx, bool with_attr) {
  Tensor c = coord_batch(a, idx);
  if (!with_attr) return c;
  std::vector<AttrProbs> probs;
  for (auto i : idx) probs.push_back(one_hot(labels_of(a.records[i])));
  const Tensor p = attr_batch(probs);
  Tensor x({idx.size(), kEvidenceDim});
  for (std::size_t r = 0; r < idx.size(); ++r) {
    std::copy_n(c.data() + r * kCoordDim, kCoordDim, x.data() + r * kEvidenceDim);
    std::copy_n(p.data() + r * kAttrProbDim, kAttrProbDim, x.data() + r * kEvidenceDim + kCoordDim);
  }
  return x;
}

History train_stage2(PoseNet& net, const Dataset& a, const TrainConfig& cfg) {
  const bool with_attr = net.config().use_attributes;
  net.fit_input_normalization(oracle_evidence(a, iota(a.records.size()), with_attr));
  const std::size_t bs = cfg.resolved_batch_size();
  const std::size_t total_steps = cfg.resolved_epochs() * ((a.records.size() + bs - 1) / bs);
  std::size_t step = 0;
  History hist;
  for (std::size_t e = 0; e < cfg.resolved_epochs(); ++e) {
    EpochStats st;
    st.epoch = e;
    double sum = 0.0;
    for (const auto& idx : shuffled_batches(a.records.size(), bs, derive_seed(cfg.seed, 2), e)) {
      ad::Tape t;
      Var x = t.constant(oracle_evidence(a, idx, with_attr));
      const auto gt_t = target_batch(a, idx);
      const GroupOutputs gt{t.constant(gt_t[0]), t.constant(gt_t[1]), t.constant(gt_t[2])};
      Var l = loss_3d(net.forward(t, x), gt);
      ad::rmsprop_step(net.params(), t.backward(l), {cfg.lr_at(step++, total_steps)});
      sum += l.value()[0] * static_cast<double>(idx.size());
    }
    st.loss_3d = sum / static_cast<double>(a.records.size()) / kInternalScale;
    st.loss_total = st.loss_3d;
    hist.push_back(st);
  }
  return hist;
}

History train_stage3(PoseNet& net, MultiTaskHead& head, const Dataset& a,
                     const Dataset* b, const TrainConfig& cfg) {
  const bool with_attr = net.config().use_attributes;
  const std::size_t bs = cfg.resolved_batch_size();
  std::optional<MixedBatcher> mixed;
  if (b) mixed.emplace(a.records.size(), b->records.size(), bs + bs % 2, cfg.seed);
  const std::size_t per_epoch =
      mixed ? mixed->batches_per_epoch() : (a.records.size() + bs - 1) / bs;
  const std::size_t total_steps = cfg.resolved_epochs() * per_epoch;
  std::size_t step = 0;

  History hist;
  for (std::size_t e = 0; e < cfg.resolved_epochs(); ++e) {
    std::vector<MixedBatch> batches;
    if (mixed) {
      batches = mixed->epoch(e);
    } else {
      for (auto& idx : shuffled_batches(a.records.size(), bs, derive_seed(cfg.seed, 3), e))
        batches.push_back({std::move(idx), {}});
    }
    EpochStats st;
    st.epoch = e;
    std::size_t dom_rows = 0, dom_hits = 0, a_hits = 0, a_total = 0;
    for (const MixedBatch& mb : batches) {
      const std::size_t h = mb.a.size();
      ad::Tape t;
      Tensor c = coord_batch(a, mb.a);
      if (b) c = stack_rows(c, coord_batch(*b, mb.b));
      const auto out = head.forward(t, t.constant(c), head_lambda(cfg));
      const auto a_rows = iota(h);

      Var x = ad::gather_rows(t.constant(c), a_rows);
      if (with_attr) x = ad::concat({x, ad::gather_rows(out.attr_probs, a_rows)}, 1);
      const auto gt_t = target_batch(a, mb.a);
      const GroupOutputs gt{t.constant(gt_t[0]), t.constant(gt_t[1]), t.constant(gt_t[2])};
      Var l3 = loss_3d(net.forward(t, x), gt);

      std::vector<AttributeVector> labels;
      for (auto i : mb.a) labels.push_back(labels_of(a.records[i]));
      Var attr_logits = ad::gather_rows(out.attr_logits, a_rows);
      Var la = loss_attr(attr_logits, labels);
      Var total = ad::add(l3, ad::scale(la, cfg.lambda_attr));
      if (b) {
        std::vector<int> doms(h + mb.b.size(), 0);
        std::fill(doms.begin() + static_cast<long>(h), doms.end(), 1);
        Var ld = loss_domain(out.domain_logits, doms);
        total = ad::add(total, ad::scale(ld, cfg.lambda_domain));
        st.loss_domain += ld.value()[0] * static_cast<double>(h);
        for (std::size_t r = 0; r < doms.size(); ++r)
          dom_hits += argmax_row(out.domain_logits.value(), r) == doms[r];
        dom_rows += doms.size();
      }
      split_step(t.backward(total), net.params(), &head.params(),
                 {cfg.lr_at(step++, total_steps)});

      st.loss_3d += l3.value()[0] * static_cast<double>(h);
      st.loss_attr += la.value()[0] * static_cast<double>(h);
      st.loss_total += total.value()[0] * static_cast<double>(h);
      a_hits += attr_hits(attr_logits.value(), labels);
      a_total += h * kNumAttributeJoints;
    }
    const double n = static_cast<double>(a_total / kNumAttributeJoints);
    st.loss_3d = st.loss_3d / n / kInternalScale;
    st.loss_attr /= n;
    st.loss_domain /= n;
    st.loss_total /= n;
    st.domain_acc = dom_rows ? static_cast<double>(dom_hits) / static_cast<double>(dom_rows) : 0.0;
    st.attr_acc = static_cast<double>(a_hits) / static_cast<double>(a_total);
    hist.push_back(st);
  }
  return hist;
}

}  // namespace

History train_pose(PoseNet& net, MultiTaskHead* head, const Dataset& ds,
                   const TrainConfig& cfg, const Dataset* unlabeled) {
  cfg.validate();
  if (cfg.stage == 1) throw ConfigError("train_pose runs stage 2 or 3; stage 1 is train_multitask");
  require_3d(ds, "training");
  const Dataset a = relabel(ds, cfg.tau());
  if (cfg.stage == 2) return train_stage2(net, a, cfg);
  if (!head) throw ConfigError("stage 3 needs a trained multi-task head");
  if (unlabeled && unlabeled->records.empty()) unlabeled = nullptr;
  return train_stage3(net, *head, a, unlabeled, cfg);
}

namespace {

template <class Fn>
void for_each_chunk(std::size_t n, Fn fn) {
  for (std::size_t begin = 0; begin < n; begin += kPredictChunk)
    fn(begin, std::min(n, begin + kPredictChunk));
}

Tensor coords_of(std::span<const SampleRecord> recs, std::size_t begin, std::size_t end) {
  Tensor t({end - begin, kCoordDim});
  for (std::size_t r = begin; r < end; ++r) {
    const auto c = normalize_coords(recs[r].pose2d);
    std::copy(c.begin(), c.end(), t.data() + (r - begin) * kCoordDim);
  }
  return t;
}

AttrProbs probs_row(const Tensor& t, std::size_t r) {
  AttrProbs p{};
  for (std::size_t j = 0; j < kNumAttributeJoints; ++j)
    for (std::size_t k = 0; k < 3; ++k) p[j][k] = t.at(r, 3 * j + k);
  return p;
}

}  // namespace

std::vector<Prediction> predict_records(const PoseNet& net, const MultiTaskHead* head,
                                        std::span<const SampleRecord> records,
                                        AttrSource source) {
  const bool with_attr = net.config().use_attributes;
  if (with_attr && source == AttrSource::Head && !head)
    throw ConfigError("predicting with head attributes needs a multi-task head");
  std::vector<Prediction> out(records.size());
  for_each_chunk(records.size(), [&](std::size_t begin, std::size_t end) {
    ad::Tape t;
    const Tensor c = coords_of(records, begin, end);
    Var x = t.constant(c);
    std::vector<AttrProbs> probs(end - begin);
    if (head) {
      const Tensor p = head->forward(t, x, 0.0).attr_probs.value();
      for (std::size_t r = 0; r < probs.size(); ++r) probs[r] = probs_row(p, r);
    }
    if (with_attr) {
      std::vector<AttrProbs> feed = probs;
      if (source == AttrSource::Oracle)
        for (std::size_t r = begin; r < end; ++r) feed[r - begin] = one_hot(labels_of(records[r]));
      x = ad::concat({x, t.constant(attr_batch(feed))}, 1);
    }
    const auto blocks = net.forward(t, x);
    std::array<Tensor, 3> first, last;
    for (int g = 0; g < 3; ++g) {
      first[g] = blocks.front()[g].value();
      last[g] = blocks.back()[g].value();
    }
    for (std::size_t r = begin; r < end; ++r) {
      Prediction& pr = out[r];
      pr.pose = assemble_row(last, r - begin);
      pr.block1 = assemble_row(first, r - begin);
      pr.attrs = probs[r - begin];
    }
  });
  return out;
}

Prediction predict(const PoseNet& net, const MultiTaskHead& head, const Pose2D& p) {
  SampleRecord rec;
  rec.id = "input";
  rec.domain = Domain::Labeled2D;
  rec.pose2d = p;
  return predict_records(net, &head, std::span<const SampleRecord>(&rec, 1), AttrSource::Head)
      .front();
}

std::vector<AttrProbs> predict_attributes(const MultiTaskHead& head,
                                          std::span<const SampleRecord> records) {
  std::vector<AttrProbs> out(records.size());
  for_each_chunk(records.size(), [&](std::size_t begin, std::size_t end) {
    ad::Tape t;
    const Tensor p = head.forward(t, t.constant(coords_of(records, begin, end)), 0.0)
                         .attr_probs.value();
    for (std::size_t r = begin; r < end; ++r) out[r] = probs_row(p, r - begin);
  });
  return out;
}

std::vector<int> predict_domains(const MultiTaskHead& head,
                                 std::span<const SampleRecord> records) {
  std::vector<int> out(records.size());
  for_each_chunk(records.size(), [&](std::size_t begin, std::size_t end) {
    ad::Tape t;
    const Tensor l = head.forward(t, t.constant(coords_of(records, begin, end)), 0.0)
                         .domain_logits.value();
    for (std::size_t r = begin; r < end; ++r) out[r] = argmax_row(l, r - begin);
  });
  return out;
}

void save_head(const std::filesystem::path& path, const MultiTaskHead& head,
               std::uint64_t seed) {
  ad::CheckpointHeader h;
  h.kind = "multitask";
  h.layer_sizes = {{"head", head.describe()}};
  h.seed = seed;
  ad::Params p;
  p.merge(head.params(), "head.");
  ad::save_checkpoint(path, h, p);
}

void save_model(const std::filesystem::path& path, const PoseNet& net,
                const MultiTaskHead& head, std::uint64_t seed) {
  ad::CheckpointHeader h;
  h.kind = "pose";
  h.layer_sizes = {{"head", head.describe()}, {"net", net.describe()}};
  h.seed = seed;
  ad::Params p;
  p.merge(head.params(), "head.");
  p.merge(net.params(), "net.");
  ad::save_checkpoint(path, h, p);
}

namespace {

void load_into(ad::Params& dst, const ad::Params& src, const std::string& what) {
  if (src.size() != dst.size())
    throw ShapeError(what + ": checkpoint holds " + std::to_string(src.size()) +
                     " tensors, the architecture needs " + std::to_string(dst.size()));
  dst.assign_from(src);
}

}  // namespace

LoadedModel load_model(const std::filesystem::path& path) {
  const ad::Checkpoint ck = ad::load_checkpoint(path);
  const json& ls = ck.header.layer_sizes;
  LoadedModel m;
  m.seed = ck.header.seed;
  try {
    const json& hj = ls.at("head");
    HeadConfig hc;
    hc.width = hj.at("width").get<std::size_t>();
    hc.depth = hj.at("depth").get<std::size_t>();
    hc.domain_width = hj.at("domain_width").get<std::size_t>();
    hc.heatmaps = hj.at("heatmaps").get<bool>();
    hc.heatmap_size = hj.at("heatmap_size").get<std::size_t>();
    hc.heatmap_sigma = hj.at("heatmap_sigma").get<double>();
    hc.beta_softargmax = hj.at("beta_softargmax").get<double>();
    m.head = std::make_unique<MultiTaskHead>(hc, 0);
    load_into(m.head->params(), ck.params.extract("head."), "head");

    if (ck.header.kind == "pose") {
      const json& nj = ls.at("net");
      NetConfig nc;
      nc.width = nj.at("width").get<std::size_t>();
      nc.depth = nj.at("depth").get<std::size_t>();
      nc.use_attributes = nj.at("use_attributes").get<bool>();
      m.net = make_net(nj.at("net").get<std::string>(), nc, 0);
      for (const auto* g : m.net->regressors()) {
        const auto stored = nj.at("input_dims").at(g->name()).get<std::size_t>();
        if (stored != g->in_dim())
          throw ShapeError(g->name() + ": checkpoint input width " + std::to_string(stored) +
                           " does not match architecture width " + std::to_string(g->in_dim()));
      }
      load_into(m.net->params(), ck.params.extract("net."), "net");
    } else if (ck.header.kind != "multitask") {
      throw ParseError("checkpoint kind '" + ck.header.kind + "' is not a model checkpoint");
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("checkpoint architecture header: ") + e.what());
  }
  return m;
}

}  // namespace poselift::model
