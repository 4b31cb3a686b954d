#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <memory>
#include <random>

#include "tacgraph/factors.hpp"
#include "tacgraph/noise.hpp"

using namespace tacgraph;

namespace {

std::mt19937_64 rng(7);

double uniform(double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

Vec3 random_vec3(double scale) {
  return Vec3(uniform(-scale, scale), uniform(-scale, scale),
              uniform(-scale, scale));
}

Vec6 random_twist(double rot, double trn) {
  Vec6 xi;
  xi << random_vec3(rot), random_vec3(trn);
  return xi;
}

Pose random_pose(double rot = 0.8, double trn = 0.3) {
  return exp_se3(random_twist(rot, trn));
}

// State magnitudes representative of a desk-scale trial: gripper near 10 cm
// above the surface, small sensor deformation, order-one wrench units.
Values representative_values() {
  Values v;
  Pose g0 = Pose(exp_so3(random_vec3(0.3)), Vec3(uniform(-0.05, 0.05),
                                                 uniform(-0.05, 0.05),
                                                 uniform(0.08, 0.15)));
  Pose g1 = g0.retract(random_twist(0.02, 0.002));
  Pose ro0 = g0 * random_pose(0.3, 0.12);
  Pose ro1 = ro0.retract(random_twist(0.02, 0.005));
  Pose eo0 = ro0.retract(random_twist(0.03, 0.003));
  Pose eo1 = eo0.retract(random_twist(0.02, 0.002));
  Pose c0 = Pose(exp_so3(random_vec3(0.2)),
                 Vec3(uniform(-0.05, 0.05), uniform(-0.05, 0.05), 0.0));
  Pose c1 = c0.retract(random_twist(0.01, 0.001));
  v.set_pose(gripper_key(0), g0);
  v.set_pose(gripper_key(1), g1);
  v.set_pose(rest_key(0), ro0);
  v.set_pose(rest_key(1), ro1);
  v.set_pose(eq_key(0), eo0);
  v.set_pose(eq_key(1), eo1);
  v.set_pose(contact_key(0), c0);
  v.set_pose(contact_key(1), c1);
  Vec6 w0, w1;
  w0 << random_vec3(0.2), random_vec3(0.8);
  w1 << random_vec3(0.2), random_vec3(0.8);
  v.set_vec(wrench_key(0), w0);
  v.set_vec(wrench_key(1), w1);
  GraspParams kp;
  kp.kappa = Vec3(uniform(1.0, 3.0), uniform(1.0, 3.0), uniform(1.0, 3.0));
  kp.k = Vec3(uniform(150, 450), uniform(150, 450), uniform(150, 450));
  kp.eta = random_vec3(0.01);
  v.set_vec(grasp_key(), kp.to_params());
  return v;
}

void check_jacobians(const Factor& factor, const Values& values,
                     double tol = 1e-5) {
  std::vector<MatX> jacs;
  factor.evaluate(values, &jacs);
  REQUIRE(jacs.size() == factor.keys().size());
  for (size_t i = 0; i < factor.keys().size(); ++i) {
    MatX numeric = numerical_factor_jacobian(factor, values, factor.keys()[i]);
    double scale = std::max(1.0, numeric.cwiseAbs().maxCoeff());
    double err = (jacs[i] - numeric).cwiseAbs().maxCoeff() / scale;
    INFO("factor ", kind_name(factor.kind()), " key ",
         to_string(factor.keys()[i]));
    CHECK(err < tol);
  }
}

std::vector<std::shared_ptr<Factor>> all_factors(const Values& v) {
  VecX s1 = VecX::Constant(1, 1.0);
  VecX s2 = VecX::Constant(2, 1.0);
  VecX s3 = VecX::Constant(3, 1.0);
  VecX s6 = VecX::Constant(6, 1.0);
  VecX s9 = VecX::Constant(9, 1.0);
  Vec9 prior_k = v.vec(grasp_key()) + Vec9::Constant(0.05);
  Twist d0(random_vec3(0.02), random_vec3(0.002));
  Twist d1(random_vec3(0.02), random_vec3(0.002));
  std::vector<std::shared_ptr<Factor>> fs;
  fs.push_back(std::make_shared<PriorGraspFactor>(grasp_key(), prior_k, s9));
  fs.push_back(
      std::make_shared<PriorObjectFactor>(rest_key(0), random_pose(), s6));
  fs.push_back(std::make_shared<GripperPoseFactor>(
      gripper_key(0), v.pose(gripper_key(0)).retract(random_twist(0.01, 0.001)),
      s6));
  fs.push_back(std::make_shared<TactileTotalFactor>(
      gripper_key(0), rest_key(0), eq_key(0), d0, s6));
  fs.push_back(std::make_shared<TactileIncrementalFactor>(
      gripper_key(0), eq_key(0), gripper_key(1), eq_key(1), d0, d1, s6));
  fs.push_back(std::make_shared<ContactInObjectFactor>(
      eq_key(0), contact_key(0), eq_key(1), contact_key(1), s6));
  fs.push_back(std::make_shared<ContactOnEnvFactor>(contact_key(0),
                                                    contact_key(1), s6));
  fs.push_back(std::make_shared<TorquePointFactor>(
      gripper_key(0), wrench_key(0), contact_key(0), grasp_key(), s3));
  fs.push_back(std::make_shared<TorqueLineFactor>(
      gripper_key(0), wrench_key(0), contact_key(0), grasp_key(), s1));
  fs.push_back(std::make_shared<WrenchTotalFactor>(
      gripper_key(0), rest_key(0), eq_key(0), wrench_key(0), grasp_key(), s6));
  fs.push_back(std::make_shared<WrenchIncrementalFactor>(
      gripper_key(0), eq_key(0), wrench_key(0), gripper_key(1), eq_key(1),
      wrench_key(1), grasp_key(), s6));
  fs.push_back(std::make_shared<RestRigidityFactor>(
      gripper_key(0), rest_key(0), gripper_key(1), rest_key(1), s6));
  fs.push_back(std::make_shared<ContactConventionFactor>(
      contact_key(0), Mat3::Identity(), Formation::Point, s3));
  fs.push_back(std::make_shared<ContactConventionFactor>(
      contact_key(1), Mat3::Identity(), Formation::Line, s2));
  fs.push_back(std::make_shared<DesiredRotationFactor>(
      gripper_key(0), gripper_key(1), exp_so3(random_vec3(0.01)), s3));
  fs.push_back(std::make_shared<MotionEffortFactor>(
      gripper_key(0), gripper_key(1), contact_key(0), s6));
  fs.push_back(
      std::make_shared<TactileEnergyFactor>(wrench_key(0), grasp_key(), s6));
  fs.push_back(std::make_shared<ContactMaintenanceFactor>(
      rest_key(0), eq_key(0), contact_key(0), 0.5, s1));  // large eps: active
  return fs;
}

}  // namespace

TEST_CASE("analytic jacobians match finite differences at 50 random points") {
  for (int trial = 0; trial < 50; ++trial) {
    Values v = representative_values();
    for (const auto& f : all_factors(v)) check_jacobians(*f, v);
  }
}

TEST_CASE("prior_grasp residual definition") {
  Values v;
  GraspParams kp;
  kp.kappa = Vec3(2, 3, 4);
  kp.k = Vec3(100, 200, 300);
  kp.eta = Vec3(0.001, -0.002, 0.0);
  v.set_vec(grasp_key(), kp.to_params());
  VecX s9 = VecX::Constant(9, 1.0);

  SUBCASE("zero at the prior") {
    PriorGraspFactor f(grasp_key(), kp.to_params(), s9);
    CHECK(f.evaluate(v, nullptr).norm() == 0.0);
  }
  SUBCASE("decoupled components") {
    GraspParams kp2 = kp;
    kp2.kappa.x() *= 2.0;
    PriorGraspFactor f(grasp_key(), kp.to_params(), s9);
    Values v2;
    v2.set_vec(grasp_key(), kp2.to_params());
    VecX r = f.evaluate(v2, nullptr);
    CHECK(r(0) == doctest::Approx(std::log(2.0)));
    CHECK(r.tail(8).norm() == 0.0);
  }
  SUBCASE("log-space ratio of e gives residual 1") {
    GraspParams kp2 = kp;
    kp2.kappa.x() *= std::exp(1.0);
    Values v2;
    v2.set_vec(grasp_key(), kp2.to_params());
    PriorGraspFactor f(grasp_key(), kp.to_params(), s9);
    CHECK(f.evaluate(v2, nullptr)(0) == doctest::Approx(1.0));
  }
}

TEST_CASE("gripper_pose residual") {
  VecX s6 = VecX::Constant(6, 1.0);
  Pose gstar = random_pose();
  SUBCASE("zero at the measurement") {
    Values v;
    v.set_pose(gripper_key(0), gstar);
    GripperPoseFactor f(gripper_key(0), gstar, s6);
    CHECK(f.evaluate(v, nullptr).norm() < 1e-15);
  }
  SUBCASE("recovers the perturbation") {
    Vec6 xi = random_twist(0.1, 0.01);
    Values v;
    v.set_pose(gripper_key(0), gstar.retract(xi));
    GripperPoseFactor f(gripper_key(0), gstar, s6);
    CHECK((f.evaluate(v, nullptr) - xi).norm() < 1e-12);
  }
  SUBCASE("pure 1mm x offset") {
    Values v;
    v.set_pose(gripper_key(0),
               gstar * Pose::from_translation(Vec3(0.001, 0, 0)));
    GripperPoseFactor f(gripper_key(0), gstar, s6);
    Vec6 expect;
    expect << 0, 0, 0, 0.001, 0, 0;
    CHECK((f.evaluate(v, nullptr) - expect).norm() < 1e-12);
  }
}

TEST_CASE("tactile_total consistency") {
  VecX s6 = VecX::Constant(6, 1.0);
  Pose g = random_pose();
  Pose ro = g * random_pose(0.2, 0.1);
  SUBCASE("zero displacement, identity delta") {
    Values v;
    v.set_pose(gripper_key(0), g);
    v.set_pose(rest_key(0), ro);
    v.set_pose(eq_key(0), ro);
    TactileTotalFactor f(gripper_key(0), rest_key(0), eq_key(0), Twist(), s6);
    CHECK(f.evaluate(v, nullptr).norm() < 1e-12);
  }
  SUBCASE("states constructed from delta give zero residual") {
    Vec6 xi = random_twist(0.05, 0.003);
    // d = log(g^-1 ro eo^-1 g) = xi  =>  eo = g exp(xi)^-1 g^-1 ro
    Pose eo = g * exp_se3(Vec6(-xi)) * g.inverse() * ro;
    Values v;
    v.set_pose(gripper_key(0), g);
    v.set_pose(rest_key(0), ro);
    v.set_pose(eq_key(0), eo);
    TactileTotalFactor f(gripper_key(0), rest_key(0), eq_key(0), Twist(xi), s6);
    CHECK(f.evaluate(v, nullptr).norm() < 1e-10);
    SUBCASE("perturbed measurement shows up at first order") {
      Vec6 eps = random_twist(1e-4, 1e-5);
      TactileTotalFactor fp(gripper_key(0), rest_key(0), eq_key(0),
                            Twist(Vec6(xi + eps)), s6);
      VecX r = fp.evaluate(v, nullptr);
      CHECK((r + eps).norm() < 1e-6 * std::max(1.0, eps.norm() / 1e-6));
    }
  }
}

TEST_CASE("tactile_incremental consistency") {
  VecX s6 = VecX::Constant(6, 1.0);
  SUBCASE("static two steps with equal delta") {
    Pose g = random_pose();
    Pose eo = g * random_pose(0.2, 0.1);
    Twist d(random_vec3(0.02), random_vec3(0.002));
    Values v;
    v.set_pose(gripper_key(0), g);
    v.set_pose(gripper_key(1), g);
    v.set_pose(eq_key(0), eo);
    v.set_pose(eq_key(1), eo);
    TactileIncrementalFactor f(gripper_key(0), eq_key(0), gripper_key(1),
                               eq_key(1), d, d, s6);
    CHECK(f.evaluate(v, nullptr).norm() < 1e-12);
  }
  SUBCASE("constructed consistent pair") {
    Pose g0 = random_pose();
    Pose eo0 = g0 * random_pose(0.2, 0.1);
    Pose g1 = g0.retract(random_twist(0.02, 0.002));
    Twist d0(random_vec3(0.02), random_vec3(0.002));
    Twist d1(random_vec3(0.02), random_vec3(0.002));
    // (eo1^-1 g1) = (eo0^-1 g0) exp(log(d0^-1 d1)) => eo1
    Pose rel = exp_se3(d0).inverse() * exp_se3(d1);
    Pose eo1 = g1 * (eo0.inverse() * g0 * rel).inverse();
    Values v;
    v.set_pose(gripper_key(0), g0);
    v.set_pose(eq_key(0), eo0);
    v.set_pose(gripper_key(1), g1);
    v.set_pose(eq_key(1), eo1);
    TactileIncrementalFactor f(gripper_key(0), eq_key(0), gripper_key(1),
                               eq_key(1), d0, d1, s6);
    CHECK(f.evaluate(v, nullptr).norm() < 1e-10);
  }
}

TEST_CASE("contact_in_object consistency") {
  VecX s6 = VecX::Constant(6, 1.0);
  Pose eo0 = random_pose();
  Pose c0 = Pose(Mat3::Identity(), Vec3(0.01, -0.02, 0));
  SUBCASE("rigidly co-moved pair") {
    Pose motion = random_pose(0.1, 0.05);
    Values v;
    v.set_pose(eq_key(0), eo0);
    v.set_pose(contact_key(0), c0);
    v.set_pose(eq_key(1), motion * eo0);
    v.set_pose(contact_key(1), motion * c0);
    ContactInObjectFactor f(eq_key(0), contact_key(0), eq_key(1),
                            contact_key(1), s6);
    CHECK(f.evaluate(v, nullptr).norm() < 1e-12);
  }
  SUBCASE("contact slid 1mm in the object frame") {
    Values v;
    v.set_pose(eq_key(0), eo0);
    v.set_pose(contact_key(0), c0);
    v.set_pose(eq_key(1), eo0);
    v.set_pose(contact_key(1), c0 * Pose::from_translation(Vec3(0.001, 0, 0)));
    ContactInObjectFactor f(eq_key(0), contact_key(0), eq_key(1),
                            contact_key(1), s6);
    VecX r = f.evaluate(v, nullptr);
    CHECK(r.head(3).norm() < 1e-12);
    CHECK(r.tail(3).norm() == doctest::Approx(0.001));
  }
  SUBCASE("object rotation about the contact point with co-rotating contact") {
    Vec3 axis = random_vec3(0.1);
    Pose pivot(exp_so3(axis), (Mat3::Identity() - exp_so3(axis)) * c0.translation());
    Values v;
    v.set_pose(eq_key(0), eo0);
    v.set_pose(contact_key(0), c0);
    v.set_pose(eq_key(1), pivot * eo0);
    v.set_pose(contact_key(1), pivot * c0);
    ContactInObjectFactor f(eq_key(0), contact_key(0), eq_key(1),
                            contact_key(1), s6);
    CHECK(f.evaluate(v, nullptr).norm() < 1e-12);
  }
}

TEST_CASE("contact_on_env whitening anisotropy") {
  Vec6 sigma;
  sigma << 1e-3, 1e-3, 1e-3, 1e-3, 1e-3, 1e-5;
  Pose c0 = Pose(Mat3::Identity(), Vec3(0.01, 0.00, 0));
  SUBCASE("no motion") {
    Values v;
    v.set_pose(contact_key(0), c0);
    v.set_pose(contact_key(1), c0);
    ContactOnEnvFactor f(contact_key(0), contact_key(1), sigma);
    CHECK(f.evaluate(v, nullptr).norm() == 0.0);
  }
  SUBCASE("1mm z lift is heavily penalized") {
    Values v;
    v.set_pose(contact_key(0), c0);
    v.set_pose(contact_key(1), c0 * Pose::from_translation(Vec3(0, 0, 0.001)));
    ContactOnEnvFactor f(contact_key(0), contact_key(1), sigma);
    CHECK(f.whitened(v).norm() == doctest::Approx(0.001 / 1e-5));
  }
  SUBCASE("1mm tangential slide is mildly penalized") {
    Values v;
    v.set_pose(contact_key(0), c0);
    v.set_pose(contact_key(1), c0 * Pose::from_translation(Vec3(0.001, 0, 0)));
    ContactOnEnvFactor f(contact_key(0), contact_key(1), sigma);
    CHECK(f.whitened(v).norm() == doctest::Approx(0.001 / 1e-3));
  }
}

TEST_CASE("torque_point examples") {
  VecX s3 = VecX::Constant(3, 1.0);
  Values v;
  v.set_pose(gripper_key(0), Pose());
  v.set_pose(contact_key(0), Pose::from_translation(Vec3(0, 0, -0.1)));
  GraspParams kp;
  kp.eta = Vec3::Zero();
  v.set_vec(grasp_key(), kp.to_params());
  TorquePointFactor f(gripper_key(0), wrench_key(0), contact_key(0),
                      grasp_key(), s3);

  SUBCASE("force through the contact, no moment") {
    Vec6 w;
    w << 0, 0, 0, 0, 0, 10;
    v.set_vec(wrench_key(0), w);
    CHECK(f.evaluate(v, nullptr).norm() < 1e-12);
  }
  SUBCASE("lateral force with matching moment") {
    Vec6 w;
    w << 0, -0.1, 0, 1, 0, 0;  // M = (0,0,-0.1) x (1,0,0) = (0,-0.1,0)
    v.set_vec(wrench_key(0), w);
    CHECK(f.evaluate(v, nullptr).norm() < 1e-12);
  }
  SUBCASE("pure moment is the residual") {
    Vec6 w;
    w << 0, 0, 0.05, 0, 0, 0;
    v.set_vec(wrench_key(0), w);
    VecX r = f.evaluate(v, nullptr);
    CHECK((r - Vec3(0, 0, 0.05)).norm() < 1e-15);
  }
}

TEST_CASE("torque_line equals point residual dotted with the line axis") {
  VecX s1 = VecX::Constant(1, 1.0);
  VecX s3 = VecX::Constant(3, 1.0);
  for (int i = 0; i < 20; ++i) {
    Values v = representative_values();
    TorquePointFactor fp(gripper_key(0), wrench_key(0), contact_key(0),
                         grasp_key(), s3);
    TorqueLineFactor fl(gripper_key(0), wrench_key(0), contact_key(0),
                        grasp_key(), s1);
    Vec3 t = fp.evaluate(v, nullptr);
    // Independent recomputation of the line direction in the gripper frame.
    Mat3 rel = v.pose(gripper_key(0)).rotation().transpose() *
               v.pose(contact_key(0)).rotation();
    Vec3 ax = rel.col(0);
    CHECK(fl.evaluate(v, nullptr)(0) == doctest::Approx(t.dot(ax)).epsilon(1e-12));
  }
}

TEST_CASE("wrench_total consistency") {
  VecX s6 = VecX::Constant(6, 1.0);
  Pose g = random_pose();
  Pose ro = g * random_pose(0.2, 0.1);
  Vec6 xi = random_twist(0.05, 0.003);
  Pose eo = g * exp_se3(Vec6(-xi)) * g.inverse() * ro;
  GraspParams kp;
  kp.kappa = Vec3(2, 2.5, 3);
  kp.k = Vec3(200, 250, 300);
  Values v;
  v.set_pose(gripper_key(0), g);
  v.set_pose(rest_key(0), ro);
  v.set_pose(eq_key(0), eo);
  v.set_vec(grasp_key(), kp.to_params());
  SUBCASE("spring-consistent wrench gives zero residual") {
    v.set_vec(wrench_key(0), Vec6(kp.stiffness().cwiseProduct(xi)));
    WrenchTotalFactor f(gripper_key(0), rest_key(0), eq_key(0), wrench_key(0),
                        grasp_key(), s6);
    CHECK(f.evaluate(v, nullptr).norm() < 1e-9);
  }
  SUBCASE("unit stiffness, canonical displacement") {
    GraspParams unit;
    v.set_vec(grasp_key(), unit.to_params());
    Vec6 w = random_twist(0.1, 0.1);
    v.set_vec(wrench_key(0), w);
    WrenchTotalFactor f(gripper_key(0), rest_key(0), eq_key(0), wrench_key(0),
                        grasp_key(), s6);
    CHECK((f.evaluate(v, nullptr) - (w - xi)).norm() < 1e-9);
  }
}

TEST_CASE("wrench_incremental consistency") {
  VecX s6 = VecX::Constant(6, 1.0);
  Pose g0 = random_pose();
  Pose eo0 = g0 * random_pose(0.2, 0.1);
  Pose g1 = g0.retract(random_twist(0.02, 0.002));
  Pose eo1 = eo0.retract(random_twist(0.01, 0.001));
  GraspParams kp;
  kp.kappa = Vec3(2, 2, 2);
  kp.k = Vec3(300, 300, 300);
  Vec6 q = log_se3((eo0.inverse() * g0).inverse() * (eo1.inverse() * g1));
  Vec6 w0 = random_twist(0.2, 0.5);
  Vec6 w1 = w0 + kp.stiffness().cwiseProduct(q);
  Values v;
  v.set_pose(gripper_key(0), g0);
  v.set_pose(eq_key(0), eo0);
  v.set_vec(wrench_key(0), w0);
  v.set_pose(gripper_key(1), g1);
  v.set_pose(eq_key(1), eo1);
  v.set_vec(wrench_key(1), w1);
  v.set_vec(grasp_key(), kp.to_params());
  WrenchIncrementalFactor f(gripper_key(0), eq_key(0), wrench_key(0),
                            gripper_key(1), eq_key(1), wrench_key(1),
                            grasp_key(), s6);
  CHECK(f.evaluate(v, nullptr).norm() < 1e-10);
  SUBCASE("injected mismatch appears directly") {
    Vec6 eps = random_twist(0.01, 0.01);
    v.set_vec(wrench_key(1), Vec6(w1 + eps));
    CHECK((f.evaluate(v, nullptr) - eps).norm() < 1e-10);
  }
}

TEST_CASE("desired_rotation examples") {
  VecX s3 = VecX::Constant(3, 1.0);
  Pose g0 = random_pose();
  Mat3 cmd = exp_so3(Vec3(2.0 * M_PI / 180.0, 0, 0));
  SUBCASE("achieved equals commanded") {
    Values v;
    v.set_pose(gripper_key(0), g0);
    v.set_pose(gripper_key(1), g0 * Pose::from_rotation(cmd));
    DesiredRotationFactor f(gripper_key(0), gripper_key(1), cmd, s3);
    CHECK(f.evaluate(v, nullptr).norm() < 1e-12);
  }
  SUBCASE("no motion leaves the commanded magnitude") {
    Values v;
    v.set_pose(gripper_key(0), g0);
    v.set_pose(gripper_key(1), g0);
    DesiredRotationFactor f(gripper_key(0), gripper_key(1), cmd, s3);
    CHECK(f.evaluate(v, nullptr).norm() ==
          doctest::Approx(2.0 * M_PI / 180.0).epsilon(1e-9));
  }
}

TEST_CASE("motion_effort examples") {
  VecX s6 = VecX::Constant(6, 1.0);
  Pose g0 = random_pose();
  Pose c0 = Pose(Mat3::Identity(), Vec3(0.02, -0.01, 0));
  Values v;
  v.set_pose(gripper_key(0), g0);
  v.set_pose(contact_key(0), c0);
  SUBCASE("no motion") {
    v.set_pose(gripper_key(1), g0);
    MotionEffortFactor f(gripper_key(0), gripper_key(1), contact_key(0), s6);
    CHECK(f.evaluate(v, nullptr).norm() < 1e-12);
  }
  SUBCASE("pure rotation about the contact point is rotational-only") {
    Vec3 axis = random_vec3(0.05);
    Pose pivot(exp_so3(axis),
               (Mat3::Identity() - exp_so3(axis)) * c0.translation());
    v.set_pose(gripper_key(1), pivot * g0);
    MotionEffortFactor f(gripper_key(0), gripper_key(1), contact_key(0), s6);
    VecX r = f.evaluate(v, nullptr);
    CHECK(r.head(3).norm() == doctest::Approx(axis.norm()).epsilon(1e-9));
    CHECK(r.tail(3).norm() < 1e-12);
  }
  SUBCASE("1mm gripper translation") {
    v.set_pose(gripper_key(1),
               Pose::from_translation(Vec3(0, 0.001, 0)) * g0);
    MotionEffortFactor f(gripper_key(0), gripper_key(1), contact_key(0), s6);
    VecX r = f.evaluate(v, nullptr);
    CHECK(r.head(3).norm() < 1e-12);
    CHECK(r.tail(3).norm() == doctest::Approx(0.001).epsilon(1e-9));
  }
}

TEST_CASE("tactile_energy matches twice the elastic energy") {
  VecX s6 = VecX::Constant(6, 1.0);
  SUBCASE("zero wrench") {
    Values v;
    v.set_vec(wrench_key(0), Vec6(Vec6::Zero()));
    v.set_vec(grasp_key(), GraspParams().to_params());
    TactileEnergyFactor f(wrench_key(0), grasp_key(), s6);
    CHECK(f.evaluate(v, nullptr).norm() == 0.0);
  }
  SUBCASE("unit stiffness returns the wrench") {
    Values v;
    Vec6 w = random_twist(0.3, 0.8);
    v.set_vec(wrench_key(0), w);
    v.set_vec(grasp_key(), GraspParams().to_params());
    TactileEnergyFactor f(wrench_key(0), grasp_key(), s6);
    CHECK((f.evaluate(v, nullptr) - w).norm() < 1e-12);
  }
  SUBCASE("F_z = 2 with k_z = 4 has cost 2E = 1") {
    Values v;
    Vec6 w;
    w << 0, 0, 0, 0, 0, 2;
    GraspParams kp;
    kp.k = Vec3(1, 1, 4);
    v.set_vec(wrench_key(0), w);
    v.set_vec(grasp_key(), kp.to_params());
    TactileEnergyFactor f(wrench_key(0), grasp_key(), s6);
    VecX r = f.evaluate(v, nullptr);
    Vec6 expect;
    expect << 0, 0, 0, 0, 0, 1;
    CHECK((r - expect).norm() < 1e-12);
    CHECK(r.squaredNorm() == doctest::Approx(1.0));
  }
  SUBCASE("squared norm equals 2E for random inputs") {
    for (int i = 0; i < 30; ++i) {
      Values v;
      Vec6 w = random_twist(0.5, 1.0);
      GraspParams kp;
      kp.kappa = Vec3(uniform(0.5, 4), uniform(0.5, 4), uniform(0.5, 4));
      kp.k = Vec3(uniform(50, 500), uniform(50, 500), uniform(50, 500));
      v.set_vec(wrench_key(0), w);
      v.set_vec(grasp_key(), kp.to_params());
      TactileEnergyFactor f(wrench_key(0), grasp_key(), s6);
      double two_e = w.cwiseQuotient(kp.stiffness()).dot(w);
      CHECK(f.evaluate(v, nullptr).squaredNorm() ==
            doctest::Approx(two_e).epsilon(1e-12));
    }
  }
}

TEST_CASE("contact_maintenance hinge") {
  VecX s1 = VecX::Constant(1, 1.0);
  double eps = 0.0015;
  // Build states with a prescribed offset distance: resting sits zeta below
  // the equilibrium along the contact z-axis.
  auto values_with_zeta = [&](double zeta) {
    Values v;
    Pose c = Pose(Mat3::Identity(), Vec3(0.01, 0.02, 0));
    Pose eo = random_pose(0.1, 0.05);
    Pose ro = Pose::from_translation(Vec3(0, 0, -zeta)) * eo;
    v.set_pose(rest_key(0), ro);
    v.set_pose(eq_key(0), eo);
    v.set_pose(contact_key(0), c);
    return v;
  };
  SUBCASE("offset distance sign convention") {
    Values v = values_with_zeta(0.002);
    CHECK(offset_distance(v.pose(rest_key(0)), v.pose(eq_key(0)),
                          v.pose(contact_key(0))) == doctest::Approx(0.002));
    Values v2 = values_with_zeta(-0.002);
    CHECK(offset_distance(v2.pose(rest_key(0)), v2.pose(eq_key(0)),
                          v2.pose(contact_key(0))) == doctest::Approx(-0.002));
  }
  SUBCASE("boundary") {
    ContactMaintenanceFactor f(rest_key(0), eq_key(0), contact_key(0), eps, s1);
    CHECK(f.evaluate(values_with_zeta(eps), nullptr)(0) ==
          doctest::Approx(0.0).epsilon(1e-12));
  }
  SUBCASE("inactive side") {
    ContactMaintenanceFactor f(rest_key(0), eq_key(0), contact_key(0), eps, s1);
    CHECK(f.evaluate(values_with_zeta(eps + 0.001), nullptr)(0) == 0.0);
  }
  SUBCASE("active side is linear") {
    ContactMaintenanceFactor f(rest_key(0), eq_key(0), contact_key(0), eps, s1);
    CHECK(f.evaluate(values_with_zeta(eps - 0.001), nullptr)(0) ==
          doctest::Approx(0.001));
  }
  SUBCASE("derivative is 0 inactive and -1 active in zeta") {
    ContactMaintenanceFactor f(rest_key(0), eq_key(0), contact_key(0), eps, s1);
    for (double zeta : {eps - 0.002, eps + 0.002}) {
      double h = 1e-7;
      double hi = f.evaluate(values_with_zeta(zeta + h), nullptr)(0);
      double lo = f.evaluate(values_with_zeta(zeta - h), nullptr)(0);
      double d = (hi - lo) / (2 * h);
      if (zeta < eps) {
        CHECK(d == doctest::Approx(-1.0).epsilon(1e-6));
      } else {
        CHECK(d == doctest::Approx(0.0));
      }
    }
  }
}

TEST_CASE("tactile displacement operations") {
  SUBCASE("no deformation gives zero twist") {
    Pose g = random_pose();
    Pose o = random_pose();
    Twist d = tactile_displacement(g, o, o);
    CHECK(d.vector().norm() < 1e-12);
  }
  SUBCASE("constructed displacement is recovered") {
    Pose g;  // identity
    Pose ro = random_pose(0.3, 0.1);
    Vec6 xi = random_twist(0.05, 0.005);
    Pose eo = exp_se3(Vec6(-xi)) * ro;  // g = I: d = log(ro eo^-1) = xi
    Twist d = tactile_displacement(g, ro, eo);
    CHECK((d.vector() - xi).norm() < 1e-10);
  }
  SUBCASE("pure z-translation of the equilibrium") {
    Pose g;
    Pose ro = Pose::from_translation(Vec3(0.01, 0.02, 0.05));
    Pose eo = Pose::from_translation(Vec3(0, 0, 0.001)) * ro;
    Twist d = tactile_displacement(g, ro, eo);
    Vec6 expect;
    expect << 0, 0, 0, 0, 0, -0.001;
    CHECK((d.vector() - expect).norm() < 1e-12);
  }
}
