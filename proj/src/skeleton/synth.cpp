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

#include "poselift/synth.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

#include <Eigen/Geometry>

#include "poselift/error.hpp"

namespace poselift {

namespace {

using Mat3 = Eigen::Matrix3d;

// Canonical bone geometry in mm, body frame (+X subject's left, +Y up).
constexpr double kHipHalfWidth = 130.0;
constexpr double kThigh = 450.0;
constexpr double kShank = 440.0;
constexpr double kSpine = 480.0;
constexpr double kNeck = 100.0;
constexpr double kHead = 120.0;
constexpr double kClavicleHalfWidth = 170.0;
constexpr double kClavicleDrop = 30.0;
constexpr double kUpperArm = 280.0;
constexpr double kForearm = 250.0;

constexpr int kMaxPlacementAttempts = 200;

double rad(double deg) { return deg * std::numbers::pi / 180.0; }

Mat3 rot_x(double deg) {
  return Eigen::AngleAxisd(rad(deg), Vec3::UnitX()).toRotationMatrix();
}
Mat3 rot_y(double deg) {
  return Eigen::AngleAxisd(rad(deg), Vec3::UnitY()).toRotationMatrix();
}
Mat3 rot_z(double deg) {
  return Eigen::AngleAxisd(rad(deg), Vec3::UnitZ()).toRotationMatrix();
}

class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : rng_(seed) {}
  double uniform(double lo, double hi) {
    if (lo == hi) return lo;
    return std::uniform_real_distribution<double>(lo, hi)(rng_);
  }
  double angle(const AngleRange& r) { return uniform(r.lo, r.hi); }
  double normal(double sd) {
    if (sd == 0.0) return 0.0;
    return std::normal_distribution<double>(0.0, sd)(rng_);
  }

 private:
  std::mt19937_64 rng_;
};

struct Angles {
  double torso_bend, torso_side, torso_twist;
  double clav_l, clav_r;
  double neck_flex, neck_side;
  double sh_flex_l, sh_abd_l, el_l, sh_flex_r, sh_abd_r, el_r;
  double hip_flex_l, hip_abd_l, kn_l, hip_flex_r, hip_abd_r, kn_r;
};

Angles sample_angles(Sampler& s, const Articulation& a) {
  Angles g{};
  g.torso_bend = s.angle(a.torso_bend);
  g.torso_side = s.angle(a.torso_side);
  g.torso_twist = s.angle(a.torso_twist);
  g.clav_l = s.angle(a.clavicle);
  g.clav_r = s.angle(a.clavicle);
  g.neck_flex = s.angle(a.neck_flex);
  g.neck_side = s.angle(a.neck_side);
  g.sh_flex_l = s.angle(a.shoulder_flex);
  g.sh_abd_l = s.angle(a.shoulder_abd);
  g.el_l = s.angle(a.elbow_flex);
  g.sh_flex_r = s.angle(a.shoulder_flex);
  g.sh_abd_r = s.angle(a.shoulder_abd);
  g.el_r = s.angle(a.elbow_flex);
  g.hip_flex_l = s.angle(a.hip_flex);
  g.hip_abd_l = s.angle(a.hip_abd);
  g.kn_l = s.angle(a.knee_flex);
  g.hip_flex_r = s.angle(a.hip_flex);
  g.hip_abd_r = s.angle(a.hip_abd);
  g.kn_r = s.angle(a.knee_flex);
  return g;
}

// Forward kinematics in the body frame, bones scaled by the subject scale.
// Sign conventions: positive flexion swings a hanging limb forward (+Z);
// knees fold backward; abduction moves a limb away from the midline.
Pose3D articulate(const Angles& g, double scale) {
  const Vec3 down(0, -1, 0);
  const Vec3 up(0, 1, 0);
  Pose3D p;
  p[JointId::Pelvis] = Vec3::Zero();
  p[JointId::LHip] = scale * Vec3(kHipHalfWidth, 0, 0);
  p[JointId::RHip] = scale * Vec3(-kHipHalfWidth, 0, 0);

  const Mat3 thigh_l = rot_z(g.hip_abd_l) * rot_x(-g.hip_flex_l);
  const Mat3 thigh_r = rot_z(-g.hip_abd_r) * rot_x(-g.hip_flex_r);
  p[JointId::LKnee] = p[JointId::LHip] + scale * kThigh * (thigh_l * down);
  p[JointId::RKnee] = p[JointId::RHip] + scale * kThigh * (thigh_r * down);
  p[JointId::LAnkle] =
      p[JointId::LKnee] + scale * kShank * (thigh_l * rot_x(g.kn_l) * down);
  p[JointId::RAnkle] =
      p[JointId::RKnee] + scale * kShank * (thigh_r * rot_x(g.kn_r) * down);

  const Mat3 torso =
      rot_y(g.torso_twist) * rot_x(g.torso_bend) * rot_z(-g.torso_side);
  p[JointId::Thorax] = scale * kSpine * (torso * up);
  p[JointId::Neck] = p[JointId::Thorax] + scale * kNeck * (torso * up);
  p[JointId::Head] =
      p[JointId::Neck] +
      scale * kHead * (torso * rot_x(g.neck_flex) * rot_z(-g.neck_side) * up);

  const Vec3 clav_l(kClavicleHalfWidth, -kClavicleDrop, 0);
  const Vec3 clav_r(-kClavicleHalfWidth, -kClavicleDrop, 0);
  p[JointId::LShoulder] =
      p[JointId::Thorax] + scale * (torso * rot_y(g.clav_l) * clav_l);
  p[JointId::RShoulder] =
      p[JointId::Thorax] + scale * (torso * rot_y(-g.clav_r) * clav_r);

  const Mat3 upper_l = torso * rot_z(g.sh_abd_l) * rot_x(-g.sh_flex_l);
  const Mat3 upper_r = torso * rot_z(-g.sh_abd_r) * rot_x(-g.sh_flex_r);
  p[JointId::LElbow] =
      p[JointId::LShoulder] + scale * kUpperArm * (upper_l * down);
  p[JointId::RElbow] =
      p[JointId::RShoulder] + scale * kUpperArm * (upper_r * down);
  p[JointId::LWrist] =
      p[JointId::LElbow] + scale * kForearm * (upper_l * rot_x(-g.el_l) * down);
  p[JointId::RWrist] =
      p[JointId::RElbow] + scale * kForearm * (upper_r * rot_x(-g.el_r) * down);
  return p;
}

void check_range(const AngleRange& r, const char* name) {
  if (!(r.lo <= r.hi) || !std::isfinite(r.lo) || !std::isfinite(r.hi))
    throw ConfigError(std::string("angle range ") + name + " has lo > hi");
}

}  // namespace

Articulation Articulation::rest() {
  Articulation a;
  for (AngleRange* r :
       {&a.torso_bend, &a.torso_side, &a.torso_twist, &a.clavicle,
        &a.neck_flex, &a.neck_side, &a.shoulder_flex, &a.shoulder_abd,
        &a.elbow_flex, &a.hip_flex, &a.hip_abd, &a.knee_flex})
    *r = {0.0, 0.0};
  return a;
}

void GeneratorConfig::validate() const {
  if (n < 1) throw ConfigError("generator: n must be >= 1");
  if (!(scale_min > 0.0) || !(scale_max >= scale_min) ||
      !std::isfinite(scale_max))
    throw ConfigError(
        "generator: subject-scale range must be non-empty and inside (0, inf)");
  tau.validate();
  const Articulation& a = articulation;
  check_range(a.torso_bend, "torso_bend");
  check_range(a.torso_side, "torso_side");
  check_range(a.torso_twist, "torso_twist");
  check_range(a.clavicle, "clavicle");
  check_range(a.neck_flex, "neck_flex");
  check_range(a.neck_side, "neck_side");
  check_range(a.shoulder_flex, "shoulder_flex");
  check_range(a.shoulder_abd, "shoulder_abd");
  check_range(a.elbow_flex, "elbow_flex");
  check_range(a.hip_flex, "hip_flex");
  check_range(a.hip_abd, "hip_abd");
  check_range(a.knee_flex, "knee_flex");
  check_range(placement.yaw, "yaw");
  check_range(placement.pitch, "pitch");
  if (!(camera.focal_px > 0.0) || !(camera.image_w > 0.0) ||
      !(camera.image_h > 0.0))
    throw ConfigError("generator: camera focal length and image size must be > 0");
  if (!(placement.depth_min_mm > 0.0) ||
      !(placement.depth_max_mm >= placement.depth_min_mm))
    throw ConfigError("generator: depth range must be inside (0, inf)");
  if (placement.lateral_mm < 0.0 || placement.vertical_mm < 0.0)
    throw ConfigError("generator: placement extents must be >= 0");
  if (noise_px < 0.0) throw ConfigError("generator: noise_px must be >= 0");
}

Pose3D canonical_pose() { return articulate(Angles{}, 1.0); }

Pose2D project(const Pose3D& p, const CameraConfig& cam) {
  Pose2D out;
  out.width = cam.image_w;
  out.height = cam.image_h;
  const double cx = 0.5 * cam.image_w + cam.cx_offset;
  const double cy = 0.5 * cam.image_h + cam.cy_offset;
  for (std::size_t k = 0; k < kNumJoints; ++k) {
    const Vec3& x = p.joints[k];
    out.joints[k] = Vec2(cam.focal_px * x.x() / x.z() + cx,
                         cam.focal_px * x.y() / x.z() + cy);
  }
  return out;
}

Dataset synth_generate(const GeneratorConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  Sampler s(seed);
  Dataset ds;
  ds.meta.name = cfg.name;
  ds.meta.seed = seed;
  if (cfg.tau.mode == TauSpec::Mode::Relative) {
    ds.meta.tau_rel = cfg.tau.value;
    ds.meta.tau_mm = cfg.tau.resolve(canonical_pose());
  } else {
    ds.meta.tau_mm = cfg.tau.value;
  }
  ds.records.reserve(cfg.n);

  // Body frame to camera frame at zero yaw: the subject faces the camera,
  // body up maps to image up (-y).
  const Mat3 to_camera = Vec3(1, -1, -1).asDiagonal();

  for (std::size_t i = 0; i < cfg.n; ++i) {
    SampleRecord r;
    char id[64];
    std::snprintf(id, sizeof id, "%s-%06zu", cfg.name.c_str(), i);
    r.id = id;
    r.domain = cfg.domain;
    r.subject_scale = s.uniform(cfg.scale_min, cfg.scale_max);

    Pose3D body;
    std::optional<AttributeVector> attrs;
    for (int attempt = 0;; ++attempt) {
      body = articulate(sample_angles(s, cfg.articulation), r.subject_scale);
      try {
        attrs = compute_attributes(body, cfg.tau);
        break;
      } catch (const DegenerateError&) {
        if (attempt > kMaxPlacementAttempts)
          throw ConfigError("generator: articulation ranges only yield degenerate torsos");
      }
    }

    Pose3D cam;
    Pose2D p2;
    for (int attempt = 0;; ++attempt) {
      const Mat3 R = to_camera * rot_y(s.angle(cfg.placement.yaw)) *
                     rot_x(s.angle(cfg.placement.pitch));
      const Vec3 t(s.uniform(-cfg.placement.lateral_mm, cfg.placement.lateral_mm),
                   s.uniform(-cfg.placement.vertical_mm, cfg.placement.vertical_mm),
                   s.uniform(cfg.placement.depth_min_mm, cfg.placement.depth_max_mm));
      bool in_front = true;
      for (std::size_t k = 0; k < kNumJoints; ++k) {
        cam.joints[k] = R * body.joints[k] + t;
        if (cam.joints[k].z() <= 1.0) in_front = false;
      }
      if (in_front) {
        p2 = project(cam, cfg.camera);
        if (p2.in_frame()) break;
      }
      if (attempt > kMaxPlacementAttempts)
        throw ConfigError("generator: camera cannot frame the subject; widen the image or move the depth range out");
    }
    if (cfg.noise_px > 0.0) {
      for (auto& v : p2.joints) {
        v.x() = std::clamp(v.x() + s.normal(cfg.noise_px), 0.0, p2.width);
        v.y() = std::clamp(v.y() + s.normal(cfg.noise_px), 0.0, p2.height);
      }
    }
    r.pose2d = p2;
    if (cfg.domain == Domain::Labeled3D) {
      r.pose3d = cam;
      // Labels are a property of the body and survive rigid placement.
      r.attributes = attrs;
    }
    ds.records.push_back(std::move(r));
  }
  return ds;
}

}  // namespace poselift
