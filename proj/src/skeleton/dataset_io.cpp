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

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "poselift/error.hpp"
#include "poselift/skeleton.hpp"

namespace poselift {

namespace {

using ordered_json = nlohmann::ordered_json;
constexpr int kFormatVersion = 1;

std::string at_line(std::size_t line, const std::string& msg) {
  return "line " + std::to_string(line) + ": " + msg;
}

const nlohmann::json& require(const nlohmann::json& obj, const char* key,
                              std::size_t line) {
  auto it = obj.find(key);
  if (it == obj.end())
    throw ParseError(at_line(line, std::string("missing field ") + key));
  return *it;
}

double number(const nlohmann::json& v, const char* field, std::size_t line) {
  if (!v.is_number())
    throw ParseError(at_line(line, std::string("field ") + field +
                                       ": expected a number"));
  double x = v.get<double>();
  if (!std::isfinite(x))
    throw ParseError(at_line(line, std::string("field ") + field +
                                       ": non-finite value"));
  return x;
}

std::vector<double> numbers(const nlohmann::json& v, const char* field,
                            std::size_t dims, std::size_t line) {
  if (!v.is_array())
    throw ParseError(at_line(line, std::string("field ") + field +
                                       ": expected an array"));
  if (v.size() != kNumJoints * dims) {
    std::ostringstream os;
    os << "expected " << kNumJoints << " joints in field " << field << " (got "
       << v.size() << " values, " << dims << " per joint)";
    throw ParseError(at_line(line, os.str()));
  }
  std::vector<double> out;
  out.reserve(v.size());
  for (const auto& x : v) out.push_back(number(x, field, line));
  return out;
}

SampleRecord parse_record(const nlohmann::json& j, std::size_t line) {
  if (!j.is_object()) throw ParseError(at_line(line, "expected an object"));
  SampleRecord r;
  const auto& id = require(j, "id", line);
  if (!id.is_string())
    throw ParseError(at_line(line, "field id: expected a string"));
  r.id = id.get<std::string>();

  const auto& dom = require(j, "domain", line);
  if (dom == "3d") {
    r.domain = Domain::Labeled3D;
  } else if (dom == "2d") {
    r.domain = Domain::Labeled2D;
  } else {
    throw ParseError(at_line(line, "field domain: expected \"3d\" or \"2d\""));
  }

  r.pose2d.width = number(require(j, "image_w", line), "image_w", line);
  r.pose2d.height = number(require(j, "image_h", line), "image_h", line);
  auto p2 = numbers(require(j, "pose2d", line), "pose2d", 2, line);
  for (std::size_t k = 0; k < kNumJoints; ++k)
    r.pose2d.joints[k] = Vec2(p2[2 * k], p2[2 * k + 1]);

  const auto& p3j = require(j, "pose3d", line);
  if (!p3j.is_null()) {
    auto p3 = numbers(p3j, "pose3d", 3, line);
    Pose3D pose;
    for (std::size_t k = 0; k < kNumJoints; ++k)
      pose.joints[k] = Vec3(p3[3 * k], p3[3 * k + 1], p3[3 * k + 2]);
    r.pose3d = pose;
  }

  const auto& aj = require(j, "attributes", line);
  if (!aj.is_null()) {
    if (!aj.is_array() || aj.size() != kNumAttributeJoints)
      throw ParseError(at_line(line, "field attributes: expected 9 tokens"));
    AttributeVector av;
    for (std::size_t k = 0; k < kNumAttributeJoints; ++k) {
      if (!aj[k].is_string())
        throw ParseError(at_line(line, "field attributes: expected strings"));
      try {
        av.labels[k] = attribute_from_token(aj[k].get<std::string>());
      } catch (const ParseError& e) {
        throw ParseError(at_line(line, std::string("field attributes: ") +
                                           e.what()));
      }
    }
    r.attributes = av;
  }

  r.subject_scale =
      number(require(j, "subject_scale", line), "subject_scale", line);
  if (r.domain == Domain::Labeled3D && !r.pose3d)
    throw ParseError(at_line(line, "Labeled3D record '" + r.id +
                                       "' is missing pose3d"));
  return r;
}

ordered_json record_json(const SampleRecord& r) {
  ordered_json j;
  j["id"] = r.id;
  j["domain"] = r.domain == Domain::Labeled3D ? "3d" : "2d";
  j["image_w"] = r.pose2d.width;
  j["image_h"] = r.pose2d.height;
  ordered_json p2 = ordered_json::array();
  for (const auto& v : r.pose2d.joints) {
    p2.push_back(v.x());
    p2.push_back(v.y());
  }
  j["pose2d"] = std::move(p2);
  if (r.pose3d) {
    ordered_json p3 = ordered_json::array();
    for (const auto& v : r.pose3d->joints) {
      p3.push_back(v.x());
      p3.push_back(v.y());
      p3.push_back(v.z());
    }
    j["pose3d"] = std::move(p3);
  } else {
    j["pose3d"] = nullptr;
  }
  if (r.attributes) {
    ordered_json a = ordered_json::array();
    for (auto l : r.attributes->labels) a.push_back(std::string(1, attribute_token(l)));
    j["attributes"] = std::move(a);
  } else {
    j["attributes"] = nullptr;
  }
  j["subject_scale"] = r.subject_scale;
  return j;
}

}  // namespace

void Dataset::validate() const {
  if (!(meta.tau_mm > 0.0)) throw DataError("dataset tau_mm must be > 0");
  if (meta.tau_rel && !(*meta.tau_rel > 0.0))
    throw DataError("dataset tau_rel must be > 0");
  std::set<std::string> seen;
  for (const auto& r : records) {
    if (!seen.insert(r.id).second)
      throw DataError("duplicate record id '" + r.id + "'");
    if (r.domain == Domain::Labeled3D && !r.pose3d)
      throw DataError("Labeled3D record '" + r.id + "' is missing pose3d");
  }
}

std::string dataset_to_string(const Dataset& ds) {
  ds.validate();
  std::string out;
  ordered_json header;
  header["format_version"] = kFormatVersion;
  header["name"] = ds.meta.name;
  header["seed"] = ds.meta.seed;
  header["tau_mm"] = ds.meta.tau_mm;
  if (ds.meta.tau_rel) header["tau_rel"] = *ds.meta.tau_rel;
  out += header.dump();
  out += '\n';
  for (const auto& r : ds.records) {
    out += record_json(r).dump();
    out += '\n';
  }
  return out;
}

Dataset dataset_from_string(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  Dataset ds;
  bool have_header = false;
  std::set<std::string> ids;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(at_line(lineno, std::string("invalid JSON: ") + e.what()));
    }
    if (!have_header) {
      if (!j.is_object()) throw ParseError(at_line(lineno, "expected header object"));
      const auto& ver = require(j, "format_version", lineno);
      if (!ver.is_number_integer() || ver.get<int>() != kFormatVersion)
        throw ParseError(at_line(lineno, "unsupported format_version"));
      const auto& name = require(j, "name", lineno);
      if (!name.is_string())
        throw ParseError(at_line(lineno, "field name: expected a string"));
      ds.meta.name = name.get<std::string>();
      const auto& seed = require(j, "seed", lineno);
      if (!seed.is_number_unsigned() && !seed.is_number_integer())
        throw ParseError(at_line(lineno, "field seed: expected an integer"));
      ds.meta.seed = seed.get<std::uint64_t>();
      ds.meta.tau_mm = number(require(j, "tau_mm", lineno), "tau_mm", lineno);
      if (!(ds.meta.tau_mm > 0.0))
        throw ParseError(at_line(lineno, "field tau_mm: must be > 0"));
      if (auto it = j.find("tau_rel"); it != j.end()) {
        ds.meta.tau_rel = number(*it, "tau_rel", lineno);
        if (!(*ds.meta.tau_rel > 0.0))
          throw ParseError(at_line(lineno, "field tau_rel: must be > 0"));
      }
      have_header = true;
      continue;
    }
    SampleRecord r = parse_record(j, lineno);
    if (!ids.insert(r.id).second)
      throw ParseError(at_line(lineno, "duplicate id '" + r.id + "'"));
    ds.records.push_back(std::move(r));
  }
  if (!have_header) throw ParseError("line 1: missing header");
  return ds;
}

Dataset load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open dataset '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return dataset_from_string(buf.str());
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

void save_dataset(const Dataset& ds, const std::filesystem::path& path) {
  std::string text = dataset_to_string(ds);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write dataset '" + path.string() + "'");
  out << text;
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

}  // namespace poselift
