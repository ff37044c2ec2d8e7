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


#include "poselift/metrics/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <exception>
#include <sstream>
#include <thread>

#include "poselift/error.hpp"
#include "poselift/geometry.hpp"

namespace poselift::metrics {

namespace {

std::size_t count_below(std::span<const std::array<double, kNumJoints>> errs, double thr) {
  std::size_t n = 0;
  for (const auto& e : errs)
    for (std::size_t j = 0; j < kNumJoints; ++j)
      if (j != index(JointId::Pelvis)) n += e[j] < thr;
  return n;
}

std::size_t pairs(std::size_t samples) { return samples * kPckJoints; }

double fraction(std::size_t hits, std::size_t total) {
  return static_cast<double>(hits) / static_cast<double>(total);
}

double auc_of(std::span<const std::array<double, kNumJoints>> errs) {
  const auto ts = auc_thresholds();
  double acc = 0.0;
  for (double t : ts) acc += fraction(count_below(errs, t), pairs(errs.size()));
  return acc / static_cast<double>(ts.size());
}

std::vector<std::array<double, kNumJoints>> joint_errors(std::span<const Pose3D> preds,
                                                         std::span<const Pose3D> gts) {
  if (preds.size() != gts.size())
    throw ShapeError("metrics: " + std::to_string(preds.size()) + " predictions for " +
                     std::to_string(gts.size()) + " ground-truth poses");
  if (preds.empty()) throw DataError("metrics: no samples");
  std::vector<std::array<double, kNumJoints>> out(preds.size());
  for (std::size_t i = 0; i < preds.size(); ++i) out[i] = mpjpe_p1(preds[i], gts[i]).per_joint;
  return out;
}

std::string num(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace

JointErrors mpjpe_p1(const Pose3D& pred, const Pose3D& gt) {
  const Pose3D p = root_relative(pred), g = root_relative(gt);
  JointErrors e;
  double acc = 0.0;
  for (std::size_t j = 0; j < kNumJoints; ++j) {
    e.per_joint[j] = (p.joints[j] - g.joints[j]).norm();
    acc += e.per_joint[j];
  }
  e.mean = acc / static_cast<double>(kNumJoints);
  return e;
}

double mpjpe_p2(const Pose3D& pred, const Pose3D& gt) {
  const Pose3D g = root_relative(gt);
  return mpjpe_p1(procrustes_align(root_relative(pred), g), g).mean;
}

double pck3d(std::span<const Pose3D> preds, std::span<const Pose3D> gts, double threshold_mm) {
  if (!(threshold_mm > 0.0)) throw ConfigError("pck threshold must be positive");
  const auto errs = joint_errors(preds, gts);
  return fraction(count_below(errs, threshold_mm), pairs(errs.size()));
}

std::vector<double> auc_thresholds() {
  std::vector<double> t;
  for (int k = 1; k <= 30; ++k) t.push_back(kAucStepMm * k);
  return t;
}

double auc(std::span<const Pose3D> preds, std::span<const Pose3D> gts) {
  return auc_of(joint_errors(preds, gts));
}

AttributeAccuracy attribute_accuracy(std::span<const AttributeVector> pred,
                                     std::span<const AttributeVector> gt) {
  if (pred.size() != gt.size())
    throw ShapeError("attribute_accuracy: " + std::to_string(pred.size()) +
                     " predictions for " + std::to_string(gt.size()) + " labels");
  if (pred.empty()) throw DataError("attribute_accuracy: no samples");
  AttributeAccuracy a;
  double acc = 0.0;
  for (std::size_t j = 0; j < kNumAttributeJoints; ++j) {
    std::size_t hits = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) hits += pred[i].labels[j] == gt[i].labels[j];
    a.per_joint[j] = fraction(hits, pred.size());
    acc += a.per_joint[j];
  }
  a.mean = acc / static_cast<double>(kNumAttributeJoints);
  return a;
}

std::size_t eval_workers() {
  std::size_t n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("POSELIFT_THREADS")) {
    const std::string s(env);
    std::size_t cap = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), cap);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size() || cap == 0)
      throw ConfigError("POSELIFT_THREADS must be a positive integer, got '" + s + "'");
    n = std::min(n, cap);
  }
  return n;
}

EvalReport evaluate(const EvalInput& in, std::size_t workers) {
  const std::size_t n = in.preds.size();
  if (n != in.gts.size())
    throw ShapeError("evaluate: " + std::to_string(n) + " predictions for " +
                     std::to_string(in.gts.size()) + " ground-truth poses");
  if (n == 0) throw DataError("evaluate: no samples");
  if (workers == 0) workers = eval_workers();
  workers = std::min(workers, n);

  std::vector<std::array<double, kNumJoints>> errs(n);
  std::vector<double> p1(n), p2(n);
  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const JointErrors e = mpjpe_p1(in.preds[i], in.gts[i]);
      errs[i] = e.per_joint;
      p1[i] = e.mean;
      p2[i] = mpjpe_p2(in.preds[i], in.gts[i]);
    }
  };
  std::vector<std::exception_ptr> failures(workers);
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      const std::size_t begin = n * w / workers, end = n * (w + 1) / workers;
      pool.emplace_back([&, w, begin, end] {
        try {
          work(begin, end);
        } catch (...) {
          failures[w] = std::current_exception();
        }
      });
    }
  }
  for (const auto& f : failures)
    if (f) std::rethrow_exception(f);

  EvalReport r;
  r.samples = n;
  double s1 = 0.0, s2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < kNumJoints; ++j) r.mpjpe_per_joint[j] += errs[i][j];
    s1 += p1[i];
    s2 += p2[i];
  }
  for (auto& v : r.mpjpe_per_joint) v /= static_cast<double>(n);
  r.mpjpe_p1 = s1 / static_cast<double>(n);
  r.mpjpe_p2 = s2 / static_cast<double>(n);
  r.pck = fraction(count_below(errs, r.pck_threshold_mm), pairs(n));
  r.auc = auc_of(errs);
  for (double t = 0.0; t <= r.pck_threshold_mm; t += kAucStepMm)
    r.pck_curve.emplace_back(t, fraction(count_below(errs, t), pairs(n)));
  if (!in.pred_attrs.empty() || !in.gt_attrs.empty()) {
    if (in.gt_attrs.size() != n)
      throw ShapeError("evaluate: attribute labels for " + std::to_string(in.gt_attrs.size()) +
                       " of " + std::to_string(n) + " samples");
    r.attributes = attribute_accuracy(in.pred_attrs, in.gt_attrs);
  }
  r.domain_accuracy = in.domain_accuracy;
  return r;
}

std::string report_csv(const EvalReport& r) {
  std::ostringstream os;
  os << "# protocol1=root-relative-xyz protocol2=rigid-procrustes pck_joints=15 pck_threshold_mm="
     << num(r.pck_threshold_mm) << " auc_grid_mm=5:5:150 samples=" << r.samples << "\n";
  os << "section,name,value\n";
  for (std::size_t j = 0; j < kNumJoints; ++j)
    os << "mpjpe_mm," << joint_name(static_cast<JointId>(j)) << "," << num(r.mpjpe_per_joint[j])
       << "\n";
  if (r.attributes)
    for (std::size_t j = 0; j < kNumAttributeJoints; ++j)
      os << "attribute_accuracy," << joint_name(kAttributeJoints[j]) << ","
         << num(r.attributes->per_joint[j]) << "\n";
  os << "summary,mpjpe_p1_mm," << num(r.mpjpe_p1) << "\n";
  os << "summary,mpjpe_p2_mm," << num(r.mpjpe_p2) << "\n";
  os << "summary,pck3d," << num(r.pck) << "\n";
  os << "summary,auc," << num(r.auc) << "\n";
  if (r.attributes) os << "summary,attribute_accuracy," << num(r.attributes->mean) << "\n";
  if (r.domain_accuracy) os << "summary,domain_accuracy," << num(*r.domain_accuracy) << "\n";
  return os.str();
}

nlohmann::json report_json(const EvalReport& r) {
  nlohmann::json j;
  j["samples"] = r.samples;
  j["protocol1"] = "root-relative-xyz";
  j["protocol2"] = "rigid-procrustes";
  j["pck_threshold_mm"] = r.pck_threshold_mm;
  j["pck_joints"] = kPckJoints;
  j["auc_thresholds_mm"] = auc_thresholds();
  j["mpjpe_p1_mm"] = r.mpjpe_p1;
  j["mpjpe_p2_mm"] = r.mpjpe_p2;
  j["pck3d"] = r.pck;
  j["auc"] = r.auc;
  j["pck_curve"] = r.pck_curve;
  nlohmann::json per = nlohmann::json::object();
  for (std::size_t k = 0; k < kNumJoints; ++k)
    per[std::string(joint_name(static_cast<JointId>(k)))] = r.mpjpe_per_joint[k];
  j["mpjpe_per_joint_mm"] = per;
  if (r.attributes) {
    nlohmann::json a = nlohmann::json::object();
    for (std::size_t k = 0; k < kNumAttributeJoints; ++k)
      a[std::string(joint_name(kAttributeJoints[k]))] = r.attributes->per_joint[k];
    j["attribute_accuracy"] = {{"per_joint", a}, {"mean", r.attributes->mean}};
  }
  if (r.domain_accuracy) j["domain_accuracy"] = *r.domain_accuracy;
  return j;
}

std::string pck_svg(const EvalReport& r) {
  constexpr double W = 480, H = 320, L = 56, R = 16, T = 32, B = 44;
  const double xmax = r.pck_threshold_mm;
  auto px = [&](double t) { return L + (W - L - R) * t / xmax; };
  auto py = [&](double v) { return T + (H - T - B) * (1.0 - v); };
  auto f = [](double v) {
    std::ostringstream s;
    s.setf(std::ios::fixed);
    s.precision(2);
    s << v;
    return s.str();
  };
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
     << "\" viewBox=\"0 0 " << W << " " << H << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << W / 2 << "\" y=\"18\" text-anchor=\"middle\" font-size=\"13\">"
     << "3DPCK vs threshold (n=" << r.samples << ")</text>\n";
  for (int k = 0; k <= 4; ++k) {
    const double v = 0.25 * k, y = py(v);
    os << "<line x1=\"" << f(L) << "\" y1=\"" << f(y) << "\" x2=\"" << f(W - R) << "\" y2=\""
       << f(y) << "\" stroke=\"#ddd\"/>\n";
    os << "<text x=\"" << f(L - 6) << "\" y=\"" << f(y + 4) << "\" text-anchor=\"end\">" << f(v)
       << "</text>\n";
  }
  for (double t = 0.0; t <= xmax; t += 25.0)
    os << "<text x=\"" << f(px(t)) << "\" y=\"" << f(H - B + 16)
       << "\" text-anchor=\"middle\">" << t << "</text>\n";
  os << "<line x1=\"" << f(L) << "\" y1=\"" << f(py(0)) << "\" x2=\"" << f(W - R) << "\" y2=\""
     << f(py(0)) << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << f(L) << "\" y1=\"" << f(py(0)) << "\" x2=\"" << f(L) << "\" y2=\""
     << f(py(1)) << "\" stroke=\"black\"/>\n";
  os << "<text x=\"" << f((L + W - R) / 2) << "\" y=\"" << f(H - 8)
     << "\" text-anchor=\"middle\">threshold (mm)</text>\n";
  os << "<text transform=\"translate(14 " << f((T + H - B) / 2)
     << ") rotate(-90)\" text-anchor=\"middle\">3DPCK</text>\n";
  os << "<polyline fill=\"none\" stroke=\"#1f5fa8\" stroke-width=\"2\" points=\"";
  for (std::size_t k = 0; k < r.pck_curve.size(); ++k)
    os << (k ? " " : "") << f(px(r.pck_curve[k].first)) << "," << f(py(r.pck_curve[k].second));
  os << "\"/>\n</svg>\n";
  return os.str();
}

std::string comparison_csv(std::span<const std::pair<std::string, EvalReport>> rows) {
  std::ostringstream os;
  os << "method";
  for (std::size_t j = 0; j < kNumJoints; ++j) os << "," << joint_name(static_cast<JointId>(j));
  os << ",mean\n";
  for (const auto& [name, r] : rows) {
    os << name;
    for (double v : r.mpjpe_per_joint) os << "," << num(v);
    os << "," << num(r.mpjpe_p1) << "\n";
  }
  return os.str();
}

}  // namespace poselift::metrics
