#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "tacgraph/se3.hpp"

using namespace tacgraph;

namespace {

std::mt19937_64 rng(42);

Vec3 random_vec3(double scale) {
  std::uniform_real_distribution<double> u(-scale, scale);
  return Vec3(u(rng), u(rng), u(rng));
}

Vec6 random_twist(double rot_scale, double trn_scale) {
  Vec6 xi;
  xi << random_vec3(rot_scale), random_vec3(trn_scale);
  return xi;
}

Pose random_pose(double rot_scale = 1.5, double trn_scale = 0.5) {
  return exp_se3(random_twist(rot_scale, trn_scale));
}

Mat3 rot_z(double angle) {
  return exp_so3(Vec3(0, 0, angle));
}

}  // namespace

TEST_CASE("compose identity and inverse") {
  Pose p = random_pose();
  Pose id;
  CHECK(local_coordinates(p, id * p).norm() == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(log_se3(p * p.inverse()).norm() < 1e-9);
  CHECK(p.rotation_defect() < 1e-9);
  CHECK((p.rotation().determinant() - 1.0) < 1e-9);
}

TEST_CASE("compose quarter turns about z") {
  Pose a = Pose::from_rotation(rot_z(M_PI / 2));
  Pose b = a * a;
  Mat3 expected = rot_z(M_PI);
  CHECK((b.rotation() - expected).norm() < 1e-12);
}

TEST_CASE("exp of zero twist is identity") {
  Pose p = exp_se3(Vec6::Zero());
  CHECK((p.rotation() - Mat3::Identity()).norm() == 0.0);
  CHECK(p.translation().norm() == 0.0);
}

TEST_CASE("exp quarter turn about z maps x-axis to y-axis") {
  Vec6 xi;
  xi << 0, 0, M_PI / 2, 0, 0, 0;
  Pose p = exp_se3(xi);
  Vec3 y = p.rotation() * Vec3::UnitX();
  CHECK((y - Vec3::UnitY()).norm() < 1e-12);
  CHECK(p.translation().norm() < 1e-15);
}

TEST_CASE("exp/log roundtrip for 100 random twists with rot norm <= 3") {
  for (int i = 0; i < 100; ++i) {
    Vec6 xi = random_twist(3.0 / std::sqrt(3.0), 1.0);
    Vec6 back = log_se3(exp_se3(xi));
    CHECK((back - xi).norm() < 1e-8);
  }
}

TEST_CASE("log throws near angle pi") {
  Vec3 w = Vec3::UnitX() * (M_PI - 1e-9);
  CHECK_THROWS_AS(log_so3(exp_so3(w)), DegenerateRotationError);
}

TEST_CASE("small-angle branch of log is stable at identity") {
  Vec3 w = Vec3(1e-9, -2e-9, 5e-10);
  Vec3 back = log_so3(exp_so3(w));
  CHECK((back - w).norm() < 1e-15);
}

TEST_CASE("group associativity on random triples") {
  for (int i = 0; i < 50; ++i) {
    Pose a = random_pose(), b = random_pose(), c = random_pose();
    Pose left = (a * b) * c;
    Pose right = a * (b * c);
    CHECK((left.rotation() - right.rotation()).norm() < 1e-9);
    CHECK((left.translation() - right.translation()).norm() < 1e-9);
  }
}

TEST_CASE("retraction locality") {
  for (int i = 0; i < 50; ++i) {
    Pose p = random_pose();
    Vec6 xi = random_twist(1e-3 / std::sqrt(3.0), 1e-3 / std::sqrt(3.0));
    Vec6 back = log_se3(p.inverse() * p.retract(xi));
    CHECK((back - xi).norm() <= 1e-6);
  }
}

TEST_CASE("adjoint matches conjugation") {
  for (int i = 0; i < 20; ++i) {
    Pose p = random_pose();
    Vec6 xi = random_twist(0.3, 0.3);
    Pose lhs = p * exp_se3(xi) * p.inverse();
    Vec6 ad = p.adjoint() * xi;
    CHECK(local_coordinates(lhs, exp_se3(ad)).norm() < 1e-9);
  }
}

TEST_CASE("so3 right jacobian inverse against finite differences") {
  for (int i = 0; i < 20; ++i) {
    Vec3 w = random_vec3(1.2);
    Mat3 jri = right_jacobian_inv_so3(w);
    double h = 1e-6;
    for (int c = 0; c < 3; ++c) {
      Vec3 d = Vec3::Zero();
      d(c) = h;
      Vec3 hi = log_so3(exp_so3(w) * exp_so3(d));
      Vec3 lo = log_so3(exp_so3(w) * exp_so3(-d));
      Vec3 num = (hi - lo) / (2 * h);
      CHECK((num - jri.col(c)).norm() < 1e-6);
    }
  }
}

TEST_CASE("se3 right jacobian inverse against finite differences") {
  for (int i = 0; i < 20; ++i) {
    Vec6 xi = random_twist(1.0, 0.8);
    Mat6 jri = right_jacobian_inv_se3(xi);
    double h = 1e-6;
    for (int c = 0; c < 6; ++c) {
      Vec6 d = Vec6::Zero();
      d(c) = h;
      Vec6 hi = log_se3(exp_se3(xi) * exp_se3(d));
      Vec6 lo = log_se3(exp_se3(xi) * exp_se3(-d));
      Vec6 num = (hi - lo) / (2 * h);
      CHECK((num - jri.col(c)).norm() < 1e-5);
    }
  }
}

TEST_CASE("se3 right jacobian is inverse of right jacobian inv") {
  for (int i = 0; i < 20; ++i) {
    Vec6 xi = random_twist(1.0, 0.8);
    Mat6 prod = right_jacobian_se3(xi) * right_jacobian_inv_se3(xi);
    CHECK((prod - Mat6::Identity()).norm() < 1e-9);
  }
}

TEST_CASE("se3 left jacobian relation to right jacobian") {
  for (int i = 0; i < 20; ++i) {
    Vec6 xi = random_twist(1.0, 0.8);
    Mat6 lhs = left_jacobian_se3(xi);
    Mat6 rhs = exp_se3(xi).adjoint() * right_jacobian_se3(xi);
    CHECK((lhs - rhs).norm() < 1e-9);
  }
}

TEST_CASE("numerical jacobian of identity map is identity") {
  Pose p = random_pose();
  MatX j = numerical_jacobian_pose_valued([](const Pose& q) { return q; }, p);
  CHECK((j - Mat6::Identity()).norm() < 1e-6);
}

TEST_CASE("numerical jacobian of local coordinates at base point") {
  Pose p0 = random_pose();
  MatX j = numerical_jacobian(
      [&](const Pose& q) { return VecX(local_coordinates(p0, q)); }, p0);
  CHECK((j - Mat6::Identity()).norm() < 1e-5);
}
