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


#include "poselift/cli/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "poselift/batching.hpp"
#include "poselift/error.hpp"
#include "poselift/metrics/metrics.hpp"
#include "poselift/synth.hpp"

namespace poselift::cli {

namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;
using model::AttrSource;
using model::TrainConfig;

std::string num(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

json read_json_file(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw IoError("cannot open config '" + p.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError("config '" + p.string() + "': " + e.what());
  }
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw IoError("cannot write '" + p.string() + "'");
  out << text;
  if (!out) throw IoError("write failed for '" + p.string() + "'");
}

void make_dir(const fs::path& p) {
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec) throw IoError("cannot create output directory '" + p.string() + "': " + ec.message());
}

// Records CLI options that were given so they can override config values.
class Overrides {
 public:
  template <class T>
  void option(CLI::App* app, const std::string& flags, const std::string& key,
              const std::string& help) {
    auto value = std::make_shared<T>();
    CLI::Option* o = app->add_option(flags, *value, help);
    apply_.push_back([o, value, key](json& s) {
      if (o->count()) s[key] = *value;
    });
  }
  /// A switch that writes `value` under `key` when present.
  void flag(CLI::App* app, const std::string& flags, const std::string& key, bool value,
            const std::string& help) {
    CLI::Option* o = app->add_flag(flags, help);
    apply_.push_back([o, value, key](json& s) {
      if (o->count()) s[key] = value;
    });
  }
  void apply(json& s) const {
    for (const auto& f : apply_) f(s);
  }

 private:
  std::vector<std::function<void(json&)>> apply_;
};

struct Globals {
  std::uint64_t seed = 0;
  fs::path out = "out";
};

struct Command {
  std::string name;
  CLI::App* app = nullptr;
  json defaults;
  Overrides flags;
  std::function<void(const json& section, const Globals&, std::ostream& out, std::ostream& err)>
      run;
};

json merge_section(const Command& c, const json* file) {
  json s = c.defaults;
  if (file && file->contains(c.name)) {
    const json& sec = file->at(c.name);
    if (!sec.is_object()) throw ConfigError("config section '" + c.name + "' must be an object");
    for (const auto& [k, v] : sec.items()) {
      if (!c.defaults.contains(k))
        throw ConfigError("unknown key '" + k + "' in config section '" + c.name + "'");
      s[k] = v;
    }
  }
  c.flags.apply(s);
  return s;
}

std::string require_path(const json& s, const std::string& key, const std::string& cmd) {
  const std::string p = s.at(key).get<std::string>();
  if (p.empty()) throw ConfigError(cmd + ": '" + key + "' is required");
  return p;
}

TauSpec tau_from(const json& s) {
  const std::string mode = s.at("tau_mode").get<std::string>();
  const double v = s.at("tau_value").get<double>();
  TauSpec t;
  if (mode == "relative") t = TauSpec::relative(v);
  else if (mode == "absolute") t = TauSpec::absolute(v);
  else throw ConfigError("tau_mode must be 'relative' or 'absolute', got '" + mode + "'");
  t.validate();
  return t;
}

// ---------------------------------------------------------------- generate

json generate_defaults() {
  return {{"name", "synth"},      {"n", 5000},          {"train_frac", 0.8},
          {"val_frac", 0.1},      {"test_frac", 0.1},   {"unlabeled_n", 0},
          {"noise_px", 0.0},      {"focal_px", 1000.0}, {"image_w", 1000.0},
          {"image_h", 1000.0},    {"cx_offset", 0.0},   {"cy_offset", 0.0},
          {"unlabeled_focal_px", 1000.0}, {"unlabeled_cx_offset", 0.0},
          {"unlabeled_cy_offset", 0.0},   {"tau_mode", "relative"},
          {"tau_value", 0.1}};
}

void cmd_generate(const json& s, const Globals& g, std::ostream& out, std::ostream&) {
  GeneratorConfig gc;
  gc.name = s.at("name").get<std::string>();
  gc.noise_px = s.at("noise_px").get<double>();
  gc.camera.focal_px = s.at("focal_px").get<double>();
  gc.camera.image_w = s.at("image_w").get<double>();
  gc.camera.image_h = s.at("image_h").get<double>();
  gc.camera.cx_offset = s.at("cx_offset").get<double>();
  gc.camera.cy_offset = s.at("cy_offset").get<double>();
  gc.tau = tau_from(s);

  const auto n = s.at("n").get<std::size_t>();
  const std::array<std::string, 3> names = {"train", "val", "test"};
  std::array<double, 3> frac{};
  double total = 0.0;
  for (std::size_t k = 0; k < 3; ++k) {
    frac[k] = s.at(names[k] + "_frac").get<double>();
    if (!(frac[k] >= 0.0)) throw ConfigError(names[k] + "_frac must be >= 0");
    total += frac[k];
  }
  if (total > 1.0 + 1e-9)
    throw ConfigError("split fractions sum to " + num(total) + ", which exceeds 1");
  std::array<std::size_t, 3> count{};
  std::size_t used = 0;
  for (std::size_t k = 0; k < 3; ++k) {
    count[k] = std::min(n - used, static_cast<std::size_t>(std::llround(frac[k] * static_cast<double>(n))));
    used += count[k];
  }
  if (used == 0) throw ConfigError("generate: the splits hold no records (check n and the fractions)");

  gc.n = used;
  const std::uint64_t labeled_seed = derive_seed(g.seed, 1);
  const Dataset all = synth_generate(gc, labeled_seed);
  json manifest = {{"seed", g.seed},
                   {"labeled_seed", labeled_seed},
                   {"tau_mm", all.meta.tau_mm},
                   {"tau_mode", s.at("tau_mode")},
                   {"tau_value", s.at("tau_value")}};
  std::size_t begin = 0;
  for (std::size_t k = 0; k < 3; ++k) {
    Dataset part;
    part.meta = all.meta;
    part.meta.name = gc.name + "-" + names[k];
    part.records.assign(all.records.begin() + static_cast<long>(begin),
                        all.records.begin() + static_cast<long>(begin + count[k]));
    begin += count[k];
    const std::string file = names[k] + ".jsonl";
    save_dataset(part, g.out / file);
    manifest["splits"][names[k]] = {{"file", file}, {"records", count[k]}};
    out << names[k] << ": " << count[k] << " records -> " << (g.out / file).string() << "\n";
  }
  if (const auto un = s.at("unlabeled_n").get<std::size_t>(); un > 0) {
    GeneratorConfig gu = gc;
    gu.name = gc.name + "-unlabeled";
    gu.n = un;
    gu.domain = Domain::Labeled2D;
    gu.camera.focal_px = s.at("unlabeled_focal_px").get<double>();
    gu.camera.cx_offset = s.at("unlabeled_cx_offset").get<double>();
    gu.camera.cy_offset = s.at("unlabeled_cy_offset").get<double>();
    const std::uint64_t useed = derive_seed(g.seed, 2);
    save_dataset(synth_generate(gu, useed), g.out / "unlabeled.jsonl");
    manifest["unlabeled_seed"] = useed;
    manifest["splits"]["unlabeled"] = {{"file", "unlabeled.jsonl"}, {"records", un}};
    out << "unlabeled: " << un << " records -> " << (g.out / "unlabeled.jsonl").string() << "\n";
  }
  write_text(g.out / "manifest.json", manifest.dump(2) + "\n");
}

// ------------------------------------------------------------------- stats

void cmd_stats(const json& s, const Globals& g, std::ostream& out, std::ostream&) {
  const Dataset ds = load_dataset(require_path(s, "data", "stats"));
  if (ds.records.empty()) throw DataError("stats: dataset is empty");
  for (const auto& r : ds.records)
    if (!r.pose3d)
      throw DataError("stats needs 3D poses; record '" + r.id + "' is 2D-only");
  const JointStd st = joint_std(ds);
  std::ostringstream csv;
  csv << "joint,group,std_mm\n";
  std::array<double, 3> group_sum{};
  std::array<std::size_t, 3> group_n{};
  out << "per-joint STD of root-centred 3D positions (mm), " << ds.records.size() << " poses\n";
  for (std::size_t j = 0; j < kNumJoints; ++j) {
    const auto id = static_cast<JointId>(j);
    const auto grp = group_of(id);
    csv << joint_name(id) << "," << group_name(grp) << "," << num(st.per_joint[j]) << "\n";
    out << "  " << joint_name(id) << " (" << group_name(grp) << "): " << st.per_joint[j] << "\n";
    group_sum[static_cast<int>(grp)] += st.per_joint[j];
    ++group_n[static_cast<int>(grp)];
  }
  for (int k = 0; k < 3; ++k) {
    const double m = group_sum[k] / static_cast<double>(group_n[k]);
    const auto name = group_name(static_cast<JointGroup>(k));
    csv << "group_mean," << name << "," << num(m) << "\n";
    out << "  mean " << name << ": " << m << "\n";
  }
  csv << "mean,all," << num(st.mean) << "\n";
  out << "  mean all: " << st.mean << "\n";
  write_text(g.out / "stats.csv", csv.str());
}

// ------------------------------------------------------------------- attrs

void cmd_attrs(const json& s, const Globals& g, std::ostream& out, std::ostream& err) {
  const fs::path in = require_path(s, "data", "attrs");
  Dataset ds = load_dataset(in);
  const TauSpec tau = tau_from(s);
  for (const auto& r : ds.records)
    if (!r.pose3d)
      throw DataError("attrs needs 3D poses; record '" + r.id + "' is 2D-only");

  Dataset outds;
  outds.meta = ds.meta;
  if (tau.mode == TauSpec::Mode::Relative) {
    outds.meta.tau_rel = tau.value;
    outds.meta.tau_mm = tau.resolve(canonical_pose());
  } else {
    outds.meta.tau_rel.reset();
    outds.meta.tau_mm = tau.value;
  }
  std::array<std::array<std::size_t, 3>, kNumAttributeJoints> hist{};
  std::ostringstream errors;
  errors << "id,error\n";
  std::size_t skipped = 0;
  for (auto& r : ds.records) {
    try {
      r.attributes = compute_attributes(*r.pose3d, tau);
    } catch (const DegenerateError& e) {
      errors << r.id << "," << e.what() << "\n";
      ++skipped;
      continue;
    }
    for (std::size_t j = 0; j < kNumAttributeJoints; ++j)
      ++hist[j][static_cast<int>(r.attributes->labels[j])];
    outds.records.push_back(std::move(r));
  }
  std::string target = s.at("output").get<std::string>();
  const fs::path dst = target.empty() ? g.out / (in.stem().string() + "_attrs.jsonl") : fs::path(target);
  save_dataset(outds, dst);

  std::ostringstream csv;
  csv << "joint,F,O,B\n";
  out << "attribute histogram (F/O/B) over " << outds.records.size() << " records\n";
  for (std::size_t j = 0; j < kNumAttributeJoints; ++j) {
    const auto name = joint_name(kAttributeJoints[j]);
    csv << name << "," << hist[j][0] << "," << hist[j][1] << "," << hist[j][2] << "\n";
    out << "  " << name << ": " << hist[j][0] << " / " << hist[j][1] << " / " << hist[j][2] << "\n";
  }
  write_text(g.out / "attrs_histogram.csv", csv.str());
  write_text(g.out / "attrs_errors.csv", errors.str());
  out << "labelled dataset -> " << dst.string() << "\n";
  if (skipped)
    err << "warning: skipped " << skipped
        << " records with a degenerate torso plane (listed in attrs_errors.csv)\n";
}

// ------------------------------------------------------------------- train

const std::array<const char*, 3> kTrainDataKeys = {"train_data", "unlabeled_data", "from_checkpoint"};
const std::array<const char*, 8> kArchKeys = {"net",        "width",        "depth",
                                              "use_attributes", "head_width", "head_depth",
                                              "domain_width",   "heatmaps"};

json train_defaults() {
  TrainConfig c;
  json j = c.to_json();
  j.erase("seed");
  j["stage"] = 0;
  j["epochs"] = 0;
  j["lr"] = 0.0;
  j["batch_size"] = 0;
  for (const char* k : kTrainDataKeys) j[k] = "";
  return j;
}

TrainConfig train_config(const json& s, std::uint64_t seed) {
  json j = s;
  for (const char* k : kTrainDataKeys) j.erase(k);
  j["seed"] = seed;
  TrainConfig c = TrainConfig::from_json(j);
  c.validate();
  return c;
}

std::string history_csv(const model::History& h) {
  std::ostringstream os;
  os << "epoch,loss_total,loss_3d_mm,loss_attr,loss_domain,domain_acc,attr_acc\n";
  for (const auto& e : h)
    os << e.epoch << "," << num(e.loss_total) << "," << num(e.loss_3d) << "," << num(e.loss_attr)
       << "," << num(e.loss_domain) << "," << num(e.domain_acc) << "," << num(e.attr_acc) << "\n";
  return os.str();
}

json resolved_train(const TrainConfig& c, const json& s) {
  json j = c.to_json();
  for (const char* k : kTrainDataKeys) j[k] = s.at(k);
  return j;
}

void check_arch(const json& section, const json& defaults, const json& ck, const char* key) {
  if (section.at(key) != defaults.at(key) && section.at(key) != ck.at(key))
    throw ShapeError(std::string("configured ") + key + " " + section.at(key).dump() +
                     " does not match the checkpoint's " + key + " " + ck.at(key).dump());
}

void cmd_train(const json& s, const Globals& g, std::ostream& out, std::ostream&) {
  TrainConfig c = train_config(s, g.seed);
  const Dataset train = load_dataset(require_path(s, "train_data", "train"));
  std::optional<Dataset> unlabeled;
  if (const auto p = s.at("unlabeled_data").get<std::string>(); !p.empty())
    unlabeled = load_dataset(p);

  const fs::path ckpt = g.out / ("stage" + std::to_string(c.stage) + ".ckpt");
  fs::path from = s.at("from_checkpoint").get<std::string>();
  if (c.stage > 1 && from.empty())
    from = g.out / ("stage" + std::to_string(c.stage - 1) + ".ckpt");
  if (c.stage > 1 && !fs::exists(from))
    throw ConfigError("missing stage-" + std::to_string(c.stage - 1) + " checkpoint '" +
                      from.string() + "'; run train --stage " + std::to_string(c.stage - 1) +
                      " first or pass --from");

  model::History hist;
  json resolved;
  if (c.stage == 1) {
    if (!unlabeled) throw ConfigError("stage 1 needs an unlabeled dataset (--unlabeled)");
    resolved = resolved_train(c, s);
    write_text(g.out / "train_stage1_config.json", resolved.dump(2) + "\n");
    model::MultiTaskHead head(c.head_cfg, c.seed);
    hist = model::train_multitask(head, train, *unlabeled, c);
    model::save_head(ckpt, head, c.seed);
  } else {
    model::LoadedModel m = model::load_model(from);
    if (c.stage == 2) {
      resolved = resolved_train(c, s);
      write_text(g.out / "train_stage2_config.json", resolved.dump(2) + "\n");
      auto net = model::make_net(c.net, c.net_cfg, c.seed);
      hist = model::train_pose(*net, m.head.get(), train, c);
      model::save_model(ckpt, *net, *m.head, c.seed);
    } else {
      if (!m.net)
        throw ConfigError("stage 3 starts from a stage-2 checkpoint; '" + from.string() +
                          "' holds only a multi-task head");
      // The architecture comes from the checkpoint.
      TrainConfig arch;
      arch.net = m.net->kind();
      arch.net_cfg = m.net->config();
      arch.head_cfg = m.head->config();
      const json ck = arch.to_json(), defaults = train_defaults();
      for (const char* k : kArchKeys) check_arch(s, defaults, ck, k);
      c.net = arch.net;
      c.net_cfg = arch.net_cfg;
      c.head_cfg = arch.head_cfg;
      resolved = resolved_train(c, s);
      write_text(g.out / "train_stage3_config.json", resolved.dump(2) + "\n");
      hist = model::train_pose(*m.net, m.head.get(), train, c, unlabeled ? &*unlabeled : nullptr);
      model::save_model(ckpt, *m.net, *m.head, c.seed);
    }
  }
  for (const auto& e : hist) {
    out << "stage " << c.stage << " epoch " << e.epoch + 1 << "/" << hist.size();
    if (c.stage == 1)
      out << " attr_loss " << e.loss_attr << " attr_acc " << e.attr_acc;
    else
      out << " loss_3d_mm " << e.loss_3d;
    if (c.stage != 2) out << " domain_acc " << e.domain_acc;
    out << "\n";
  }
  write_text(g.out / ("stage" + std::to_string(c.stage) + "_history.csv"), history_csv(hist));
  out << "checkpoint -> " << ckpt.string() << "\n";
}

// -------------------------------------------------------------------- eval

json eval_defaults() {
  return {{"checkpoint", ""},  {"data", ""},          {"unlabeled_data", ""},
          {"attrs", "head"},   {"net", nullptr},      {"width", nullptr},
          {"depth", nullptr},  {"use_attributes", nullptr},
          {"ablation", false}, {"baseline", ""},      {"progressive", ""},
          {"progressive_attr", ""}};
}

AttrSource attr_source(const json& s) {
  const std::string a = s.at("attrs").get<std::string>();
  if (a == "head") return AttrSource::Head;
  if (a == "oracle") return AttrSource::Oracle;
  throw ConfigError("attrs must be 'head' or 'oracle', got '" + a + "'");
}

model::LoadedModel load_pose_model(const std::string& path) {
  model::LoadedModel m = model::load_model(path);
  if (!m.net)
    throw ConfigError("'" + path + "' holds only a multi-task head; evaluation needs a stage-2 or stage-3 checkpoint");
  return m;
}

void check_expected(const json& s, const model::LoadedModel& m) {
  const json have = m.net->describe();
  for (const char* k : {"net", "width", "depth", "use_attributes"}) {
    if (s.at(k).is_null()) continue;
    if (s.at(k) != have.at(k))
      throw ShapeError("checkpoint " + std::string(k) + " " + have.at(k).dump() +
                       " does not match configured " + k + " " + s.at(k).dump() +
                       " (regressor input widths " + have.at("input_dims").dump() + ")");
  }
}

metrics::EvalReport evaluate_model(const model::LoadedModel& m, const Dataset& test,
                                   const Dataset* unlabeled, AttrSource src) {
  const std::size_t workers = metrics::eval_workers();
  const auto preds = predict_parallel(*m.net, m.head.get(), test.records, src, workers);
  std::vector<Pose3D> p, gt;
  std::vector<AttributeVector> pa, ga;
  bool labelled = true;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    const auto& r = test.records[i];
    if (!r.pose3d) throw DataError("evaluation needs 3D ground truth; record '" + r.id + "' is 2D-only");
    p.push_back(preds[i].pose);
    gt.push_back(*r.pose3d);
    labelled = labelled && r.attributes.has_value();
    if (r.attributes) {
      pa.push_back(model::argmax_labels(preds[i].attrs));
      ga.push_back(*r.attributes);
    }
  }
  if (!labelled) pa.clear(), ga.clear();
  std::optional<double> dom;
  if (unlabeled) {
    const auto da = model::predict_domains(*m.head, test.records);
    const auto db = model::predict_domains(*m.head, unlabeled->records);
    std::size_t hits = 0;
    for (int d : da) hits += d == 0;
    for (int d : db) hits += d == 1;
    dom = static_cast<double>(hits) / static_cast<double>(da.size() + db.size());
  }
  return metrics::evaluate({p, gt, pa, ga, dom}, workers);
}

void print_report(std::ostream& out, const std::string& label, const metrics::EvalReport& r) {
  out << label << ": n=" << r.samples << " MPJPE-P1 " << r.mpjpe_p1 << " mm, P2 " << r.mpjpe_p2
      << " mm, 3DPCK " << r.pck << ", AUC " << r.auc;
  if (r.attributes) out << ", attribute acc " << r.attributes->mean;
  if (r.domain_accuracy) out << ", domain acc " << *r.domain_accuracy;
  out << "\n";
}

void cmd_eval(const json& s, const Globals& g, std::ostream& out, std::ostream&) {
  const Dataset test = load_dataset(require_path(s, "data", "eval"));
  std::optional<Dataset> unlabeled;
  if (const auto p = s.at("unlabeled_data").get<std::string>(); !p.empty())
    unlabeled = load_dataset(p);
  const AttrSource src = attr_source(s);

  if (s.at("ablation").get<bool>()) {
    const std::array<std::pair<std::string, std::string>, 3> methods = {
        std::pair{std::string("baseline"), std::string("baseline")},
        {"progressive", "progressive"},
        {"progressive+attr", "progressive_attr"}};
    std::vector<std::pair<std::string, metrics::EvalReport>> rows;
    json summary = json::object();
    for (const auto& [label, key] : methods) {
      const auto m = load_pose_model(require_path(s, key, "eval --ablation"));
      rows.emplace_back(label, evaluate_model(m, test, unlabeled ? &*unlabeled : nullptr, src));
      summary[label] = metrics::report_json(rows.back().second);
      print_report(out, label, rows.back().second);
    }
    write_text(g.out / "ablation.csv", metrics::comparison_csv(rows));
    write_text(g.out / "ablation.json", summary.dump(2) + "\n");
    out << "ablation table -> " << (g.out / "ablation.csv").string() << "\n";
    return;
  }
  const auto m = load_pose_model(require_path(s, "checkpoint", "eval"));
  check_expected(s, m);
  const auto r = evaluate_model(m, test, unlabeled ? &*unlabeled : nullptr, src);
  write_text(g.out / "eval_report.csv", metrics::report_csv(r));
  write_text(g.out / "eval_report.json", metrics::report_json(r).dump(2) + "\n");
  write_text(g.out / "pck.svg", metrics::pck_svg(r));
  print_report(out, "eval", r);
}

}  // namespace

std::vector<model::Prediction> predict_parallel(const model::PoseNet& net,
                                                const model::MultiTaskHead* head,
                                                std::span<const SampleRecord> records,
                                                model::AttrSource source, std::size_t workers) {
  const std::size_t n = records.size();
  const std::size_t chunks = (n + model::kPredictChunk - 1) / model::kPredictChunk;
  workers = std::max<std::size_t>(1, std::min(workers, chunks));
  std::vector<std::vector<model::Prediction>> parts(workers);
  std::vector<std::exception_ptr> failures(workers);
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      const std::size_t begin = std::min(n, chunks * w / workers * model::kPredictChunk);
      const std::size_t end = std::min(n, chunks * (w + 1) / workers * model::kPredictChunk);
      pool.emplace_back([&, w, begin, end] {
        try {
          parts[w] = model::predict_records(net, head, records.subspan(begin, end - begin), source);
        } catch (...) {
          failures[w] = std::current_exception();
        }
      });
    }
  }
  for (const auto& f : failures)
    if (f) std::rethrow_exception(f);
  std::vector<model::Prediction> out;
  out.reserve(n);
  for (auto& p : parts) std::move(p.begin(), p.end(), std::back_inserter(out));
  return out;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"poselift: 2D-to-3D pose lifting with pose attributes"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string config_path, out_dir;
  std::uint64_t seed = 0;
  CLI::Option* seed_opt = app.add_option("--seed", seed, "Random seed");
  CLI::Option* out_opt = app.add_option("--out", out_dir, "Output directory (default: out)");
  app.add_option("--config", config_path, "JSON config with per-command sections");

  std::vector<std::unique_ptr<Command>> cmds;
  auto add = [&](const std::string& name, const std::string& help, json defaults, auto fn) {
    auto c = std::make_unique<Command>();
    c->name = name;
    c->app = app.add_subcommand(name, help);
    c->defaults = std::move(defaults);
    c->run = fn;
    cmds.push_back(std::move(c));
    return cmds.back().get();
  };

  Command* gen = add("generate", "Write synthetic train/val/test splits and a manifest",
                     generate_defaults(), cmd_generate);
  gen->flags.option<std::size_t>(gen->app, "--n", "n", "Total labelled records");
  gen->flags.option<std::string>(gen->app, "--name", "name", "Dataset name prefix");
  gen->flags.option<double>(gen->app, "--train-frac", "train_frac", "Training fraction");
  gen->flags.option<double>(gen->app, "--val-frac", "val_frac", "Validation fraction");
  gen->flags.option<double>(gen->app, "--test-frac", "test_frac", "Test fraction");
  gen->flags.option<std::size_t>(gen->app, "--unlabeled-n", "unlabeled_n",
                                 "Records in an extra 2D-only set");
  gen->flags.option<double>(gen->app, "--noise-px", "noise_px", "2D keypoint noise (px)");
  gen->flags.option<double>(gen->app, "--focal", "focal_px", "Focal length (px)");
  gen->flags.option<double>(gen->app, "--cx-offset", "cx_offset", "Principal point x offset (px)");
  gen->flags.option<double>(gen->app, "--unlabeled-focal", "unlabeled_focal_px",
                            "Focal length of the 2D-only set");
  gen->flags.option<double>(gen->app, "--unlabeled-cx-offset", "unlabeled_cx_offset",
                            "Principal point x offset of the 2D-only set");
  gen->flags.option<std::string>(gen->app, "--tau-mode", "tau_mode", "relative or absolute");
  gen->flags.option<double>(gen->app, "--tau", "tau_value", "Attribute threshold");

  Command* stats = add("stats", "Per-joint STD of 3D joint positions", json{{"data", ""}}, cmd_stats);
  stats->flags.option<std::string>(stats->app, "--data", "data", "Labeled3D dataset");

  Command* attrs = add("attrs", "Recompute attribute labels",
                       json{{"data", ""}, {"output", ""}, {"tau_mode", "relative"}, {"tau_value", 0.1}},
                       cmd_attrs);
  attrs->flags.option<std::string>(attrs->app, "--data", "data", "Labeled3D dataset");
  attrs->flags.option<std::string>(attrs->app, "--output", "output", "Labelled dataset path");
  attrs->flags.option<std::string>(attrs->app, "--tau-mode", "tau_mode", "relative or absolute");
  attrs->flags.option<double>(attrs->app, "--tau", "tau_value", "Attribute threshold");

  Command* train = add("train", "Run one training stage", train_defaults(), cmd_train);
  train->flags.option<int>(train->app, "--stage", "stage", "1, 2 or 3");
  train->flags.option<std::string>(train->app, "--train", "train_data", "Labeled3D training set");
  train->flags.option<std::string>(train->app, "--unlabeled", "unlabeled_data", "2D-only set");
  train->flags.option<std::string>(train->app, "--from", "from_checkpoint",
                                   "Checkpoint of the previous stage");
  train->flags.option<std::size_t>(train->app, "--epochs", "epochs", "Epochs");
  train->flags.option<double>(train->app, "--lr", "lr", "Learning rate");
  train->flags.option<std::size_t>(train->app, "--batch-size", "batch_size", "Batch size");
  train->flags.option<std::string>(train->app, "--net", "net", "progressive or baseline");
  train->flags.option<std::size_t>(train->app, "--width", "width", "Regressor width");
  train->flags.option<std::size_t>(train->app, "--depth", "depth", "Residual blocks");
  train->flags.flag(train->app, "--no-attributes", "use_attributes", false,
                    "Feed only 2D coordinates to the 3D net");
  train->flags.option<double>(train->app, "--lambda-grl", "lambda_grl", "Gradient reversal weight");
  train->flags.flag(train->app, "--no-da", "domain_adaptation", false,
                    "Train the domain classifier without gradient reversal");

  Command* ev = add("eval", "Evaluate a checkpoint or run the ablation table", eval_defaults(),
                    cmd_eval);
  ev->flags.option<std::string>(ev->app, "--checkpoint", "checkpoint", "Stage-2/3 checkpoint");
  ev->flags.option<std::string>(ev->app, "--data", "data", "Labeled3D test set");
  ev->flags.option<std::string>(ev->app, "--unlabeled", "unlabeled_data",
                                "2D-only set for domain accuracy");
  ev->flags.option<std::string>(ev->app, "--attrs", "attrs", "head or oracle");
  ev->flags.flag(ev->app, "--ablation", "ablation", true, "Compare three checkpoints");
  ev->flags.option<std::string>(ev->app, "--baseline", "baseline", "Baseline checkpoint");
  ev->flags.option<std::string>(ev->app, "--progressive", "progressive",
                                "Progressive checkpoint without attributes");
  ev->flags.option<std::string>(ev->app, "--progressive-attr", "progressive_attr",
                                "Progressive checkpoint with attributes");
  ev->flags.option<std::string>(ev->app, "--expect-net", "net", "Expected net kind");
  ev->flags.option<std::size_t>(ev->app, "--expect-width", "width", "Expected regressor width");
  ev->flags.option<std::size_t>(ev->app, "--expect-depth", "depth", "Expected residual blocks");

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: usage: " << e.what() << "\n";
    return 2;
  }

  try {
    std::optional<json> file;
    if (!config_path.empty()) {
      file = read_json_file(config_path);
      if (!file->is_object()) throw ConfigError("config must be a JSON object");
      for (const auto& [k, v] : file->items()) {
        const bool known = k == "seed" || k == "out" ||
                           std::any_of(cmds.begin(), cmds.end(),
                                       [&](const auto& c) { return c->name == k; });
        if (!known) throw ConfigError("unknown top-level config key '" + k + "'");
      }
    }
    Globals g;
    if (file && file->contains("seed")) g.seed = file->at("seed").get<std::uint64_t>();
    if (file && file->contains("out")) g.out = file->at("out").get<std::string>();
    if (seed_opt->count()) g.seed = seed;
    if (out_opt->count()) g.out = out_dir;

    for (const auto& c : cmds) {
      if (!c->app->parsed()) continue;
      json section = merge_section(*c, file ? &*file : nullptr);
      make_dir(g.out);
      json resolved = {{"command", c->name},
                       {"seed", g.seed},
                       {"out", g.out.string()},
                       {c->name, section}};
      // Train writes its own file once the stage architecture is known.
      if (c->name != "train")
        write_text(g.out / (c->name + "_config.json"), resolved.dump(2) + "\n");
      c->run(section, g, out, err);
    }
  } catch (const Error& e) {
    err << "error: " << e.kind() << ": " << e.what() << "\n";
    return 1;
  } catch (const json::exception& e) {
    err << "error: config: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: internal: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace poselift::cli
