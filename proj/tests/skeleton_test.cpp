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

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include <doctest.h>
#include <nlohmann/json.hpp>

#include "poselift/batching.hpp"
#include "poselift/error.hpp"
#include "poselift/geometry.hpp"
#include "poselift/skeleton.hpp"
#include "poselift/synth.hpp"

using namespace poselift;

namespace {

GeneratorConfig small_cfg(std::size_t n) {
  GeneratorConfig cfg;
  cfg.n = n;
  cfg.name = "t";
  return cfg;
}

std::string replace_line(const std::string& text, std::size_t lineno,
                         const std::string& repl) {
  std::istringstream in(text);
  std::string line, out;
  for (std::size_t k = 1; std::getline(in, line); ++k)
    out += (k == lineno ? repl : line) + "\n";
  return out;
}

}  // namespace

TEST_CASE("joint groups partition the skeleton") {
  std::set<int> seen;
  for (auto g : {JointGroup::Torso, JointGroup::Proximal, JointGroup::Distal})
    for (auto j : group_joints(g)) {
      CHECK(group_of(j) == g);
      CHECK(seen.insert(static_cast<int>(j)).second);
    }
  CHECK(seen.size() == kNumJoints);

  CHECK(group_of(JointId::LWrist) == JointGroup::Distal);
  CHECK(group_of(JointId::Head) == JointGroup::Proximal);
  CHECK(group_of(JointId::Pelvis) == JointGroup::Torso);
  CHECK(index(JointId::LWrist) == 15);
  CHECK(index(JointId::Pelvis) == 6);
}

TEST_CASE("dataset text format") {
  SUBCASE("empty dataset is only a header line") {
    Dataset ds;
    ds.meta = {"empty", 3, 12.5, std::nullopt};
    const std::string text = dataset_to_string(ds);
    CHECK(std::count(text.begin(), text.end(), '\n') == 1);
    Dataset back = dataset_from_string(text);
    CHECK(back.records.empty());
    CHECK(back.meta == ds.meta);
  }

  SUBCASE("single Labeled3D record round-trips byte-identically") {
    auto cfg = small_cfg(1);
    const std::string text = dataset_to_string(synth_generate(cfg, 5));
    CHECK(dataset_to_string(dataset_from_string(text)) == text);
  }

  SUBCASE("100 records round-trip at full precision") {
    auto cfg = small_cfg(100);
    cfg.noise_px = 1.5;
    Dataset ds = synth_generate(cfg, 11);
    CHECK(dataset_from_string(dataset_to_string(ds)) == ds);
  }

  SUBCASE("absent attributes serialise as null") {
    auto cfg = small_cfg(2);
    cfg.domain = Domain::Labeled2D;
    Dataset ds = synth_generate(cfg, 1);
    const std::string text = dataset_to_string(ds);
    CHECK(text.find("\"attributes\":null") != std::string::npos);
    CHECK(text.find("\"pose3d\":null") != std::string::npos);
    CHECK(dataset_from_string(text) == ds);
  }

  SUBCASE("malformed record names its line") {
    auto cfg = small_cfg(8);
    const std::string text = dataset_to_string(synth_generate(cfg, 2));
    // Line 1 is the header; line 7 holds the sixth record.
    std::istringstream in(text);
    std::string line;
    for (int k = 0; k < 7; ++k) std::getline(in, line);
    auto j = nlohmann::json::parse(line);
    j["pose2d"].erase(j["pose2d"].size() - 1);
    j["pose2d"].erase(j["pose2d"].size() - 1);
    const std::string bad = replace_line(text, 7, j.dump());
    try {
      dataset_from_string(bad);
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(std::string(e.what()).find("line 7: expected 16 joints") == 0);
    }
  }

  SUBCASE("duplicate id is rejected") {
    auto cfg = small_cfg(3);
    std::string text = dataset_to_string(synth_generate(cfg, 2));
    std::istringstream in(text);
    std::string header, r0, r1;
    std::getline(in, header);
    std::getline(in, r0);
    const std::string dup = header + "\n" + r0 + "\n" + r0 + "\n";
    CHECK_THROWS_WITH_AS(dataset_from_string(dup),
                         doctest::Contains("duplicate id"), ParseError);
  }

  SUBCASE("Labeled3D record without pose3d is rejected") {
    auto cfg = small_cfg(2);
    std::string text = dataset_to_string(synth_generate(cfg, 2));
    std::istringstream in(text);
    std::string header, r0;
    std::getline(in, header);
    std::getline(in, r0);
    auto j = nlohmann::json::parse(r0);
    j["pose3d"] = nullptr;
    CHECK_THROWS_WITH_AS(dataset_from_string(header + "\n" + j.dump() + "\n"),
                         doctest::Contains("line 2: Labeled3D"), ParseError);
  }

  SUBCASE("unwritable path is an io error") {
    Dataset ds;
    CHECK_THROWS_AS(save_dataset(ds, "/nonexistent-dir/x.jsonl"), IoError);
    CHECK_THROWS_AS(load_dataset("/nonexistent-dir/x.jsonl"), IoError);
  }
}

TEST_CASE("synthetic generator") {
  SUBCASE("deterministic for a fixed seed") {
    auto cfg = small_cfg(50);
    CHECK(dataset_to_string(synth_generate(cfg, 9)) ==
          dataset_to_string(synth_generate(cfg, 9)));
    CHECK(dataset_to_string(synth_generate(cfg, 9)) !=
          dataset_to_string(synth_generate(cfg, 10)));
  }

  SUBCASE("empty scale range is a config error") {
    auto cfg = small_cfg(5);
    cfg.scale_min = 1.2;
    cfg.scale_max = 1.1;
    CHECK_THROWS_AS(synth_generate(cfg, 1), ConfigError);
    cfg.scale_min = 0.0;
    cfg.scale_max = 1.0;
    CHECK_THROWS_AS(synth_generate(cfg, 1), ConfigError);
  }

  SUBCASE("zero articulation ranges give the rest pose up to placement") {
    auto cfg = small_cfg(40);
    cfg.articulation = Articulation::rest();
    const Pose3D rest = canonical_pose();
    for (const auto& r : synth_generate(cfg, 4).records) {
      REQUIRE(r.pose3d);
      for (std::size_t k = 0; k < kNumJoints; ++k) {
        const auto j = static_cast<JointId>(k);
        if (j == JointId::Pelvis) continue;
        CHECK(bone_length(*r.pose3d, j) ==
              doctest::Approx(bone_length(rest, j) * r.subject_scale).epsilon(1e-12));
      }
      Pose3D scaled;
      for (std::size_t k = 0; k < kNumJoints; ++k)
        scaled.joints[k] = rest.joints[k] * r.subject_scale;
      const Pose3D aligned = procrustes_align(scaled, *r.pose3d);
      for (std::size_t k = 0; k < kNumJoints; ++k)
        CHECK((aligned.joints[k] - r.pose3d->joints[k]).norm() < 1e-8);
      CHECK(r.pose2d.in_frame());
    }
  }

  SUBCASE("every attribute class occurs for every limb joint") {
    auto cfg = small_cfg(1000);
    const Dataset ds = synth_generate(cfg, 21);
    std::array<std::array<int, 3>, kNumAttributeJoints> counts{};
    for (const auto& r : ds.records) {
      REQUIRE(r.attributes);
      REQUIRE(*r.attributes == compute_attributes(*r.pose3d, cfg.tau));
      for (std::size_t k = 0; k < kNumAttributeJoints; ++k)
        ++counts[k][static_cast<int>(r.attributes->labels[k])];
    }
    for (std::size_t k = 0; k < kNumAttributeJoints; ++k)
      for (int c = 0; c < 3; ++c) {
        INFO("joint " << joint_name(kAttributeJoints[k]) << " class " << c);
        CHECK(counts[k][c] > 0);
        CHECK(counts[k][c] < 1000);
      }
  }

  SUBCASE("Labeled2D records carry no 3D data") {
    auto cfg = small_cfg(10);
    cfg.domain = Domain::Labeled2D;
    for (const auto& r : synth_generate(cfg, 3).records) {
      CHECK_FALSE(r.pose3d);
      CHECK_FALSE(r.attributes);
      CHECK(r.pose2d.in_frame());
    }
  }
}

TEST_CASE("joint_std") {
  SUBCASE("identical poses have zero spread") {
    auto cfg = small_cfg(1);
    Dataset one = synth_generate(cfg, 1);
    Dataset ds = one;
    for (int k = 1; k < 5; ++k) {
      auto r = one.records[0];
      r.id += std::to_string(k);
      ds.records.push_back(r);
    }
    const auto s = joint_std(ds);
    for (double v : s.per_joint) CHECK(v == 0.0);
    CHECK(s.mean == 0.0);
  }

  SUBCASE("two poses differing in one joint") {
    // Population covariance of {x, x+d} is d d^T / 4, so the spread is |d|/2.
    auto cfg = small_cfg(1);
    Dataset ds = synth_generate(cfg, 2);
    auto r = ds.records[0];
    r.id = "other";
    const Vec3 delta(30.0, -40.0, 120.0);
    (*r.pose3d)[JointId::LWrist] += delta;
    ds.records.push_back(r);
    const auto s = joint_std(ds);
    for (std::size_t k = 0; k < kNumJoints; ++k) {
      if (k == index(JointId::LWrist))
        CHECK(s.per_joint[k] == doctest::Approx(delta.norm() / 2.0).epsilon(1e-12));
      else
        CHECK(s.per_joint[k] == doctest::Approx(0.0).epsilon(1e-12));
    }
    CHECK(s.mean == doctest::Approx(delta.norm() / 2.0 / 16.0).epsilon(1e-12));
  }

  SUBCASE("2D-only data is rejected") {
    auto cfg = small_cfg(3);
    cfg.domain = Domain::Labeled2D;
    CHECK_THROWS_AS(joint_std(synth_generate(cfg, 1)), DataError);
  }

  SUBCASE("spread grows from torso to distal joints") {
    const auto s = joint_std(synth_generate(small_cfg(2000), 5));
    auto group_mean = [&](JointGroup g) {
      double acc = 0.0;
      for (auto j : group_joints(g)) acc += s.per_joint[index(j)];
      return acc / static_cast<double>(group_joints(g).size());
    };
    CHECK(group_mean(JointGroup::Distal) > group_mean(JointGroup::Proximal));
    CHECK(group_mean(JointGroup::Proximal) > group_mean(JointGroup::Torso));
  }
}

TEST_CASE("mixed batches") {
  SUBCASE("batch size 2 pairs one record from each side") {
    MixedBatcher mb(7, 5, 2, 1);
    CHECK(mb.batches_per_epoch() == 5);
    for (const auto& b : mb.epoch(0)) {
      CHECK(b.a.size() == 1);
      CHECK(b.b.size() == 1);
    }
  }

  SUBCASE("10 + 10 records with batch 4") {
    MixedBatcher mb(10, 10, 4, 77);
    REQUIRE(mb.batches_per_epoch() == 5);
    for (std::size_t e = 0; e < 3; ++e) {
      std::map<std::size_t, int> ca, cb;
      for (const auto& b : mb.epoch(e)) {
        CHECK(b.a.size() == 2);
        CHECK(b.b.size() == 2);
        for (auto i : b.a) ++ca[i];
        for (auto i : b.b) ++cb[i];
      }
      CHECK(ca.size() == 10);
      CHECK(cb.size() == 10);
      for (auto& [k, v] : ca) CHECK(v == 1);
      for (auto& [k, v] : cb) CHECK(v == 1);
    }
    CHECK(mb.epoch(0) != mb.epoch(1));
  }

  SUBCASE("same seed, same sequence") {
    CHECK(MixedBatcher(30, 40, 6, 5).epoch(3) == MixedBatcher(30, 40, 6, 5).epoch(3));
    CHECK(MixedBatcher(30, 40, 6, 5).epoch(3) != MixedBatcher(30, 40, 6, 6).epoch(3));
  }

  SUBCASE("odd batch size is a config error") {
    CHECK_THROWS_AS(MixedBatcher(10, 10, 3, 1), ConfigError);
    Dataset empty;
    auto cfg = small_cfg(3);
    CHECK_THROWS_AS(mixed_batches(synth_generate(cfg, 1), empty, 2, 1), ConfigError);
  }
}
