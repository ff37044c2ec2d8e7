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
#include <random>

#include <doctest.h>

#include "oracles.hpp"
#include "poselift/error.hpp"
#include "poselift/geometry.hpp"
#include "poselift/synth.hpp"

using namespace poselift;

namespace {

std::array<Vec3, 5> anchors_of(const Pose3D& p) {
  std::array<Vec3, 5> a;
  for (std::size_t k = 0; k < 5; ++k) a[k] = p[kPlaneAnchors[k]];
  return a;
}

Pose3D transformed(const Pose3D& p, const Eigen::Matrix3d& R, const Vec3& t,
                   double s = 1.0) {
  Pose3D out;
  for (std::size_t k = 0; k < kNumJoints; ++k) out.joints[k] = s * (R * p.joints[k]) + t;
  return out;
}

Dataset random_poses(std::size_t n, std::uint64_t seed) {
  GeneratorConfig cfg;
  cfg.n = n;
  return synth_generate(cfg, seed);
}

}  // namespace

TEST_CASE("torso plane fit") {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(-500.0, 500.0);

  SUBCASE("coplanar anchors fit exactly") {
    for (int trial = 0; trial < 200; ++trial) {
      const Vec3 n = oracle::random_unit(rng);
      const Vec3 e1 = n.unitOrthogonal();
      const Vec3 e2 = n.cross(e1);
      const Vec3 origin(u(rng), u(rng), u(rng) + 3000.0);
      std::array<Vec3, 5> pts;
      for (auto& p : pts) p = origin + u(rng) * e1 + u(rng) * e2;
      const Plane pl = fit_plane(pts);
      CHECK(plane_residual(pl, pts) < 1e-10);
      CHECK(std::abs(pl.normal.norm() - 1.0) < 1e-12);
    }
  }

  SUBCASE("perturbed anchors: residual no worse than the Jacobi oracle") {
    for (int trial = 0; trial < 200; ++trial) {
      const Vec3 n = oracle::random_unit(rng);
      const Vec3 e1 = n.unitOrthogonal();
      const Vec3 e2 = n.cross(e1);
      const double eps = 5.0;
      std::array<Vec3, 5> pts;
      for (auto& p : pts) {
        const double side = std::uniform_real_distribution<double>(-eps, eps)(rng);
        p = u(rng) * e1 + u(rng) * e2 + side * n;
      }
      const Plane pl = fit_plane(pts);
      const auto ref = oracle::odr_plane(pts);
      CHECK(plane_residual(pl, pts) <= oracle::residual(ref, pts) + 1e-9);
      // Tilt is bounded by the perturbation relative to the anchor spread.
      const double angle = std::acos(std::min(1.0, std::abs(pl.normal.dot(n))));
      CHECK(angle < 0.2);
      CHECK(std::abs(pl.normal.dot(ref.normal)) == doctest::Approx(1.0).epsilon(1e-9));
    }
  }

  SUBCASE("homogeneous under scaling") {
    const Dataset ds = random_poses(20, 3);
    for (const auto& r : ds.records) {
      Pose3D doubled = transformed(*r.pose3d, Eigen::Matrix3d::Identity(), Vec3::Zero(), 2.0);
      const Plane a = fit_torso_plane(*r.pose3d);
      const Plane b = fit_torso_plane(doubled);
      CHECK((a.normal - b.normal).norm() < 1e-9);
      CHECK(b.offset == doctest::Approx(2.0 * a.offset).epsilon(1e-9));
    }
  }

  SUBCASE("globally optimal among random planes through the centroid") {
    const Dataset ds = random_poses(5, 8);
    for (const auto& r : ds.records) {
      const auto pts = anchors_of(*r.pose3d);
      const double best = plane_residual(fit_torso_plane(*r.pose3d), pts);
      Vec3 c = Vec3::Zero();
      for (const auto& p : pts) c += p;
      c /= 5.0;
      int beaten = 0;
      for (int k = 0; k < 10000; ++k) {
        const Vec3 n = oracle::random_unit(rng);
        if (oracle::residual(oracle::PointNormal{c, n}, pts) < best) ++beaten;
      }
      CHECK(beaten == 0);
    }
  }

  SUBCASE("collinear anchors are degenerate") {
    Pose3D p;
    for (std::size_t k = 0; k < kNumJoints; ++k) p.joints[k] = Vec3(double(k), 0, 0);
    p[JointId::LShoulder] = Vec3(1, 1, 1);
    p[JointId::RShoulder] = Vec3(2, 2, 2);
    p[JointId::LHip] = Vec3(3, 3, 3);
    p[JointId::RHip] = Vec3(4, 4, 4);
    p[JointId::Pelvis] = Vec3(5, 5, 5);
    CHECK_THROWS_AS(fit_torso_plane(p), DegenerateError);
  }
}

TEST_CASE("plane orientation") {
  SUBCASE("rest pose faces +z") {
    // hip axis +x, spine +y, so front = +x cross +y = +z.
    const Pose3D rest = canonical_pose();
    const Plane pl = fit_torso_plane(rest);
    CHECK(pl.normal.z() > 0.99);
  }

  SUBCASE("idempotent and sign-flip invariant") {
    const Dataset ds = random_poses(50, 4);
    for (const auto& r : ds.records) {
      const Plane once = fit_torso_plane(*r.pose3d);
      const Plane twice = orient_plane(once, *r.pose3d);
      CHECK(once.normal == twice.normal);
      CHECK(once.offset == twice.offset);
      const Plane flipped = orient_plane(Plane{-once.normal, -once.offset}, *r.pose3d);
      CHECK(flipped.normal == once.normal);
      CHECK(compute_attributes(*r.pose3d, 40.0) == compute_attributes(*r.pose3d, 40.0));
    }
  }

  SUBCASE("mirroring the body mirrors the front") {
    const Dataset ds = random_poses(50, 6);
    const Eigen::Matrix3d M = Vec3(-1, 1, 1).asDiagonal();
    auto swap = [](JointId j) {
      switch (j) {
        case JointId::RAnkle: return JointId::LAnkle;
        case JointId::LAnkle: return JointId::RAnkle;
        case JointId::RKnee: return JointId::LKnee;
        case JointId::LKnee: return JointId::RKnee;
        case JointId::RHip: return JointId::LHip;
        case JointId::LHip: return JointId::RHip;
        case JointId::RWrist: return JointId::LWrist;
        case JointId::LWrist: return JointId::RWrist;
        case JointId::RElbow: return JointId::LElbow;
        case JointId::LElbow: return JointId::RElbow;
        case JointId::RShoulder: return JointId::LShoulder;
        case JointId::LShoulder: return JointId::RShoulder;
        default: return j;
      }
    };
    for (const auto& r : ds.records) {
      Pose3D m;
      for (std::size_t k = 0; k < kNumJoints; ++k) {
        const auto j = static_cast<JointId>(k);
        m[swap(j)] = M * (*r.pose3d)[j];
      }
      const Plane a = fit_torso_plane(*r.pose3d);
      const Plane b = fit_torso_plane(m);
      CHECK((b.normal - M * a.normal).norm() < 1e-9);
    }
  }

  SUBCASE("parallel hip and spine axes are degenerate") {
    Pose3D p = canonical_pose();
    p[JointId::Thorax] = p[JointId::LHip] * 3.0;
    CHECK_THROWS_AS(orient_plane(Plane{}, p), DegenerateError);
  }
}

TEST_CASE("signed distance") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1000.0, 1000.0);
  for (int trial = 0; trial < 500; ++trial) {
    const Vec3 n = oracle::random_unit(rng);
    const Vec3 p0(u(rng), u(rng), u(rng));
    const Plane pl{n, -n.dot(p0)};
    const Vec3 e1 = n.unitOrthogonal();
    CHECK(std::abs(signed_distance(pl, p0 + u(rng) * e1)) < 1e-9);

    const Vec3 x(u(rng), u(rng), u(rng));
    const double t = u(rng);
    CHECK(signed_distance(pl, x + t * n) ==
          doctest::Approx(signed_distance(pl, x) + t).epsilon(1e-12));

    // Independent form: plane given by a point and an unnormalised normal.
    const Vec3 raw = n * 3.7;
    const double dist = std::abs((x - p0).dot(raw)) / raw.norm();
    const double sgn = (x - p0).dot(raw) >= 0 ? 1.0 : -1.0;
    CHECK(std::abs(signed_distance(pl, x) - sgn * dist) < 1e-9);
  }
}

TEST_CASE("attribute labelling") {
  SUBCASE("threshold boundary is inclusive") {
    Pose3D p = canonical_pose();
    p[JointId::LElbow].z() += 60.0;
    const double d = signed_distance(fit_torso_plane(p), p[JointId::LElbow]);
    REQUIRE(d > 0.0);
    CHECK(compute_attributes(p, d).labels[1] == Attribute::OnPlane);
    CHECK(compute_attributes(p, std::nextafter(d, 0.0)).labels[1] == Attribute::Front);
    p[JointId::LElbow].z() -= 120.0;
    const double d2 = signed_distance(fit_torso_plane(p), p[JointId::LElbow]);
    CHECK(compute_attributes(p, -d2).labels[1] == Attribute::OnPlane);
    CHECK(compute_attributes(p, std::nextafter(-d2, 0.0)).labels[1] == Attribute::Back);
  }

  SUBCASE("rest pose shoulders lie on the plane") {
    const AttributeVector a = compute_attributes(canonical_pose(), TauSpec{});
    CHECK(a.labels[0] == Attribute::OnPlane);
    CHECK(a.labels[2] == Attribute::OnPlane);
  }

  SUBCASE("agrees with the brute-force labeller on 1000 poses") {
    const Dataset ds = random_poses(1000, 99);
    int mismatches = 0;
    for (const auto& r : ds.records) {
      const double tau = TauSpec{}.resolve(*r.pose3d);
      if (!(compute_attributes(*r.pose3d, tau) == oracle::labels(*r.pose3d, tau)))
        ++mismatches;
    }
    CHECK(mismatches == 0);
  }

  SUBCASE("invariant under rigid motion and joint scaling") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-2000.0, 2000.0);
    const Dataset ds = random_poses(300, 12);
    for (const auto& r : ds.records) {
      const auto R = oracle::random_rotation(rng);
      const Vec3 t(u(rng), u(rng), u(rng));
      const double tau = 45.0;
      const auto base = compute_attributes(*r.pose3d, tau);
      CHECK(compute_attributes(transformed(*r.pose3d, R, t), tau) == base);
      CHECK(compute_attributes(transformed(*r.pose3d, Eigen::Matrix3d::Identity(),
                                           Vec3::Zero(), 2.5),
                               2.5 * tau) == base);
      // The relative threshold scales with the pose on its own.
      CHECK(compute_attributes(transformed(*r.pose3d, R, t, 1.7), TauSpec{}) ==
            compute_attributes(*r.pose3d, TauSpec{}));
    }
  }

  SUBCASE("huge threshold labels everything on-plane") {
    for (const auto& r : random_poses(20, 1).records)
      for (auto l : compute_attributes(*r.pose3d, 1e9).labels) CHECK(l == Attribute::OnPlane);
  }

  SUBCASE("invalid tau") {
    CHECK_THROWS_AS(compute_attributes(canonical_pose(), 0.0), ConfigError);
    CHECK_THROWS_AS(compute_attributes(canonical_pose(), TauSpec::absolute(-1)), ConfigError);
  }
}

TEST_CASE("procrustes alignment") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-1000.0, 1000.0);
  const Dataset ds = random_poses(100, 31);

  auto mpjpe = [](const Pose3D& a, const Pose3D& b) {
    double acc = 0.0;
    for (std::size_t k = 0; k < kNumJoints; ++k) acc += (a.joints[k] - b.joints[k]).norm();
    return acc / kNumJoints;
  };

  SUBCASE("recovers a rigid transform exactly") {
    for (const auto& r : ds.records) {
      const auto R = oracle::random_rotation(rng);
      const Pose3D gt = transformed(*r.pose3d, R, Vec3(u(rng), u(rng), u(rng)));
      CHECK(mpjpe(procrustes_align(*r.pose3d, gt), gt) < 1e-8);
    }
  }

  SUBCASE("identity on equal poses") {
    for (const auto& r : ds.records) {
      const Pose3D a = procrustes_align(*r.pose3d, *r.pose3d);
      for (std::size_t k = 0; k < kNumJoints; ++k)
        CHECK((a.joints[k] - r.pose3d->joints[k]).norm() < 1e-10);
    }
  }

  SUBCASE("scale only recovered with the flag") {
    for (const auto& r : ds.records) {
      const Pose3D gt = transformed(*r.pose3d, Eigen::Matrix3d::Identity(), Vec3::Zero(), 2.0);
      CHECK(mpjpe(procrustes_align(*r.pose3d, gt, true), gt) < 1e-8);
      CHECK(mpjpe(procrustes_align(*r.pose3d, gt, false), gt) > 1.0);
    }
  }

  SUBCASE("never worse than the identity transform") {
    std::normal_distribution<double> noise(0.0, 40.0);
    for (const auto& r : ds.records) {
      Pose3D pred = *r.pose3d;
      for (auto& j : pred.joints) j += Vec3(noise(rng), noise(rng), noise(rng));
      const Pose3D a = procrustes_align(pred, *r.pose3d);
      double e_aligned = 0.0, e_id = 0.0;
      for (std::size_t k = 0; k < kNumJoints; ++k) {
        e_aligned += (a.joints[k] - r.pose3d->joints[k]).squaredNorm();
        e_id += (pred.joints[k] - r.pose3d->joints[k]).squaredNorm();
      }
      CHECK(e_aligned <= e_id + 1e-9);
      // Proper rotation: pairwise distances preserved.
      CHECK((a[JointId::LWrist] - a[JointId::Head]).norm() ==
            doctest::Approx((pred[JointId::LWrist] - pred[JointId::Head]).norm()).epsilon(1e-9));
    }
  }

  SUBCASE("rank-deficient cross covariance") {
    Pose3D flat;  // every joint at the origin
    CHECK_THROWS_AS(procrustes_align(flat, *ds.records[0].pose3d), DegenerateError);
  }
}

TEST_CASE("root relative") {
  const Dataset ds = random_poses(30, 2);
  for (const auto& r : ds.records) {
    const Pose3D a = root_relative(*r.pose3d);
    CHECK(a[JointId::Pelvis] == Vec3::Zero());
    CHECK(root_relative(a) == a);
    for (std::size_t i = 0; i < kNumJoints; ++i)
      for (std::size_t j = 0; j < kNumJoints; ++j)
        CHECK((a.joints[i] - a.joints[j]).norm() ==
              doctest::Approx((r.pose3d->joints[i] - r.pose3d->joints[j]).norm()).epsilon(1e-12));
  }
}
