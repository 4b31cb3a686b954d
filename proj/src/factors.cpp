#include "tacgraph/factors.hpp"

#include <cmath>

namespace tacgraph {

namespace {

const Vec3 kUnitX = Vec3::UnitX();
const Vec3 kUnitZ = Vec3::UnitZ();

// Point-torque residual and its raw pieces, shared by the two torque factors.
struct TorqueParts {
  Vec3 residual;
  Vec3 lever;       // u = (g^-1 c)_trn - eta
  Vec3 p;           // (g^-1 c)_trn
  Vec3 force;
  Mat3 rel_rot;     // rotation of g^-1 c
};

TorqueParts torque_parts(const Pose& g, const Vec6& w, const Pose& c,
                         const Vec9& grasp_params) {
  TorqueParts out;
  Pose rel = g.inverse() * c;
  out.p = rel.translation();
  out.rel_rot = rel.rotation();
  out.lever = out.p - grasp_params.tail<3>();
  out.force = w.tail<3>();
  out.residual = w.head<3>() - out.lever.cross(out.force);
  return out;
}

}  // namespace

const char* kind_name(Factor::Kind kind) {
  switch (kind) {
    case Factor::Kind::PriorGrasp: return "prior_grasp";
    case Factor::Kind::PriorObject: return "prior_object";
    case Factor::Kind::GripperPose: return "gripper_pose";
    case Factor::Kind::TactileTotal: return "tactile_total";
    case Factor::Kind::TactileIncremental: return "tactile_incremental";
    case Factor::Kind::ContactInObject: return "contact_in_object";
    case Factor::Kind::ContactOnEnv: return "contact_on_env";
    case Factor::Kind::TorquePoint: return "torque_point";
    case Factor::Kind::TorqueLine: return "torque_line";
    case Factor::Kind::WrenchTotal: return "wrench_total";
    case Factor::Kind::WrenchIncremental: return "wrench_incremental";
    case Factor::Kind::RestRigidity: return "rest_rigidity";
    case Factor::Kind::ContactConvention: return "contact_convention";
    case Factor::Kind::DesiredRotation: return "desired_rotation";
    case Factor::Kind::MotionEffort: return "motion_effort";
    case Factor::Kind::TactileEnergy: return "tactile_energy";
    case Factor::Kind::ContactMaintenance: return "contact_maintenance";
  }
  return "?";
}

// ---- PriorGraspFactor ---------------------------------------------------

PriorGraspFactor::PriorGraspFactor(VarKey grasp, const Vec9& prior_params,
                                   const VecX& sigma)
    : Factor(Kind::PriorGrasp, {grasp}, sigma), prior_(prior_params) {}

VecX PriorGraspFactor::evaluate(const Values& v,
                                std::vector<MatX>* jacs) const {
  VecX r = v.vec(keys_[0]) - prior_;
  if (jacs) {
    jacs->resize(1);
    (*jacs)[0] = MatX::Identity(9, 9);
  }
  return r;
}

// ---- PriorObjectFactor --------------------------------------------------

PriorObjectFactor::PriorObjectFactor(VarKey rest, const Pose& prior,
                                     const VecX& sigma)
    : Factor(Kind::PriorObject, {rest}, sigma), prior_(prior) {}

VecX PriorObjectFactor::evaluate(const Values& v,
                                 std::vector<MatX>* jacs) const {
  Vec6 r = log_se3(prior_.inverse() * v.pose(keys_[0]));
  if (jacs) {
    jacs->resize(1);
    (*jacs)[0] = right_jacobian_inv_se3(r);
  }
  return r;
}

// ---- GripperPoseFactor --------------------------------------------------

GripperPoseFactor::GripperPoseFactor(VarKey gripper, const Pose& measured,
                                     const VecX& sigma)
    : Factor(Kind::GripperPose, {gripper}, sigma), measured_(measured) {}

VecX GripperPoseFactor::evaluate(const Values& v,
                                 std::vector<MatX>* jacs) const {
  Vec6 r = log_se3(measured_.inverse() * v.pose(keys_[0]));
  if (jacs) {
    jacs->resize(1);
    (*jacs)[0] = right_jacobian_inv_se3(r);
  }
  return r;
}

// ---- TactileTotalFactor -------------------------------------------------

TactileTotalFactor::TactileTotalFactor(VarKey gripper, VarKey rest, VarKey eq,
                                       const Twist& delta, const VecX& sigma)
    : Factor(Kind::TactileTotal, {gripper, rest, eq}, sigma),
      delta_(exp_se3(delta)) {}

VecX TactileTotalFactor::evaluate(const Values& v,
                                  std::vector<MatX>* jacs) const {
  const Pose& g = v.pose(keys_[0]);
  const Pose& ro = v.pose(keys_[1]);
  const Pose& eo = v.pose(keys_[2]);
  Pose g_inv = g.inverse();
  Pose g_eo = g_inv * eo;                   // g^-1 eq_o
  Pose m = delta_.inverse() * g_inv * ro * eo.inverse() * g;
  Vec6 r = log_se3(m);
  if (jacs) {
    Mat6 jri = right_jacobian_inv_se3(r);
    Mat6 ad_geo = g_eo.adjoint();
    jacs->resize(3);
    // g appears twice: as g^-1 up front and as the trailing g.
    (*jacs)[0] = jri * (Mat6::Identity() - (g_eo * ro.inverse() * g).adjoint());
    (*jacs)[1] = jri * ad_geo;
    (*jacs)[2] = -jri * ad_geo;
  }
  return r;
}

// ---- TactileIncrementalFactor --------------------------------------------

TactileIncrementalFactor::TactileIncrementalFactor(
    VarKey gripper0, VarKey eq0, VarKey gripper1, VarKey eq1,
    const Twist& delta0, const Twist& delta1, const VecX& sigma)
    : Factor(Kind::TactileIncremental, {gripper0, eq0, gripper1, eq1}, sigma),
      delta_rel_(exp_se3(delta0).inverse() * exp_se3(delta1)) {}

VecX TactileIncrementalFactor::evaluate(const Values& v,
                                        std::vector<MatX>* jacs) const {
  const Pose& g0 = v.pose(keys_[0]);
  const Pose& eo0 = v.pose(keys_[1]);
  const Pose& g1 = v.pose(keys_[2]);
  const Pose& eo1 = v.pose(keys_[3]);
  Pose g1_eo1 = g1.inverse() * eo1;
  Pose m = delta_rel_.inverse() * g0.inverse() * eo0 * eo1.inverse() * g1;
  Vec6 r = log_se3(m);
  if (jacs) {
    Mat6 jri = right_jacobian_inv_se3(r);
    Mat6 ad = g1_eo1.adjoint();
    jacs->resize(4);
    (*jacs)[0] = -jri * (g1_eo1 * eo0.inverse() * g0).adjoint();
    (*jacs)[1] = jri * ad;
    (*jacs)[2] = jri;
    (*jacs)[3] = -jri * ad;
  }
  return r;
}

// ---- ContactInObjectFactor ------------------------------------------------

ContactInObjectFactor::ContactInObjectFactor(VarKey eq0, VarKey contact0,
                                             VarKey eq1, VarKey contact1,
                                             const VecX& sigma)
    : Factor(Kind::ContactInObject, {eq0, contact0, eq1, contact1}, sigma) {}

VecX ContactInObjectFactor::evaluate(const Values& v,
                                     std::vector<MatX>* jacs) const {
  const Pose& eo0 = v.pose(keys_[0]);
  const Pose& c0 = v.pose(keys_[1]);
  const Pose& eo1 = v.pose(keys_[2]);
  const Pose& c1 = v.pose(keys_[3]);
  Pose c1_eo1 = c1.inverse() * eo1;
  Vec6 r = log_se3(c0.inverse() * eo0 * eo1.inverse() * c1);
  if (jacs) {
    Mat6 jri = right_jacobian_inv_se3(r);
    Mat6 ad = c1_eo1.adjoint();
    jacs->resize(4);
    (*jacs)[0] = jri * ad;
    (*jacs)[1] = -jri * (c1_eo1 * eo0.inverse() * c0).adjoint();
    (*jacs)[2] = -jri * ad;
    (*jacs)[3] = jri;
  }
  return r;
}

// ---- ContactOnEnvFactor ----------------------------------------------------

ContactOnEnvFactor::ContactOnEnvFactor(VarKey contact0, VarKey contact1,
                                       const VecX& sigma)
    : Factor(Kind::ContactOnEnv, {contact0, contact1}, sigma) {}

VecX ContactOnEnvFactor::evaluate(const Values& v,
                                  std::vector<MatX>* jacs) const {
  Vec6 r = log_se3(v.pose(keys_[0]).inverse() * v.pose(keys_[1]));
  if (jacs) {
    Mat6 jri = right_jacobian_inv_se3(r);
    jacs->resize(2);
    (*jacs)[0] = -jri * exp_se3(-r).adjoint();  // = -Jl^-1(r)
    (*jacs)[1] = jri;
  }
  return r;
}

// ---- TorquePointFactor -----------------------------------------------------

TorquePointFactor::TorquePointFactor(VarKey gripper, VarKey wrench,
                                     VarKey contact, VarKey grasp,
                                     const VecX& sigma)
    : Factor(Kind::TorquePoint, {gripper, wrench, contact, grasp}, sigma) {}

VecX TorquePointFactor::evaluate(const Values& v,
                                 std::vector<MatX>* jacs) const {
  TorqueParts tp = torque_parts(v.pose(keys_[0]), v.vec(keys_[1]),
                                v.pose(keys_[2]), v.vec(keys_[3]));
  if (jacs) {
    Mat3 fx = hat(tp.force);
    jacs->resize(4);
    MatX jg(3, 6);
    jg << fx * hat(tp.p), -fx;
    (*jacs)[0] = jg;
    MatX jw(3, 6);
    jw << Mat3::Identity(), -hat(tp.lever);
    (*jacs)[1] = jw;
    MatX jc = MatX::Zero(3, 6);
    jc.rightCols<3>() = fx * tp.rel_rot;
    (*jacs)[2] = jc;
    MatX jk = MatX::Zero(3, 9);
    jk.rightCols<3>() = -fx;
    (*jacs)[3] = jk;
  }
  return tp.residual;
}

// ---- TorqueLineFactor ------------------------------------------------------

TorqueLineFactor::TorqueLineFactor(VarKey gripper, VarKey wrench,
                                   VarKey contact, VarKey grasp,
                                   const VecX& sigma)
    : Factor(Kind::TorqueLine, {gripper, wrench, contact, grasp}, sigma) {}

VecX TorqueLineFactor::evaluate(const Values& v,
                                std::vector<MatX>* jacs) const {
  TorqueParts tp = torque_parts(v.pose(keys_[0]), v.vec(keys_[1]),
                                v.pose(keys_[2]), v.vec(keys_[3]));
  Vec3 axis = tp.rel_rot * kUnitX;  // contact line in the gripper frame
  VecX r(1);
  r(0) = tp.residual.dot(axis);
  if (jacs) {
    Mat3 fx = hat(tp.force);
    Eigen::RowVector3d at = axis.transpose();
    jacs->resize(4);
    MatX jg(1, 6);
    jg.leftCols<3>() = at * fx * hat(tp.p) + tp.residual.transpose() * hat(axis);
    jg.rightCols<3>() = -at * fx;
    (*jacs)[0] = jg;
    MatX jw(1, 6);
    jw << at, -at * hat(tp.lever);
    (*jacs)[1] = jw;
    MatX jc(1, 6);
    jc.leftCols<3>() = -tp.residual.transpose() * tp.rel_rot * hat(kUnitX);
    jc.rightCols<3>() = at * fx * tp.rel_rot;
    (*jacs)[2] = jc;
    MatX jk = MatX::Zero(1, 9);
    jk.rightCols<3>() = -at * fx;
    (*jacs)[3] = jk;
  }
  return r;
}

// ---- WrenchTotalFactor -----------------------------------------------------

WrenchTotalFactor::WrenchTotalFactor(VarKey gripper, VarKey rest, VarKey eq,
                                     VarKey wrench, VarKey grasp,
                                     const VecX& sigma)
    : Factor(Kind::WrenchTotal, {gripper, rest, eq, wrench, grasp}, sigma) {}

VecX WrenchTotalFactor::evaluate(const Values& v,
                                 std::vector<MatX>* jacs) const {
  const Pose& g = v.pose(keys_[0]);
  const Pose& ro = v.pose(keys_[1]);
  const Pose& eo = v.pose(keys_[2]);
  const Vec6& w = v.vec(keys_[3]);
  const VecX& theta = v.vec(keys_[4]);
  Vec6 s = theta.head<6>().array().exp().matrix();
  Pose g_eo = g.inverse() * eo;
  Vec6 d = log_se3(g.inverse() * ro * eo.inverse() * g);
  Vec6 r = w - s.cwiseProduct(d);
  if (jacs) {
    Mat6 jri = right_jacobian_inv_se3(d);
    Mat6 ad_geo = g_eo.adjoint();
    Mat6 sdiag = s.asDiagonal();
    jacs->resize(5);
    (*jacs)[0] =
        -sdiag * jri * (Mat6::Identity() - (g_eo * ro.inverse() * g).adjoint());
    (*jacs)[1] = -sdiag * jri * ad_geo;
    (*jacs)[2] = sdiag * jri * ad_geo;
    (*jacs)[3] = Mat6::Identity();
    MatX jk = MatX::Zero(6, 9);
    jk.leftCols<6>() = (-s.cwiseProduct(d)).asDiagonal();
    (*jacs)[4] = jk;
  }
  return r;
}

// ---- WrenchIncrementalFactor -------------------------------------------------

WrenchIncrementalFactor::WrenchIncrementalFactor(VarKey gripper0, VarKey eq0,
                                                 VarKey wrench0,
                                                 VarKey gripper1, VarKey eq1,
                                                 VarKey wrench1, VarKey grasp,
                                                 const VecX& sigma)
    : Factor(Kind::WrenchIncremental,
             {gripper0, eq0, wrench0, gripper1, eq1, wrench1, grasp}, sigma) {}

VecX WrenchIncrementalFactor::evaluate(const Values& v,
                                       std::vector<MatX>* jacs) const {
  const Pose& g0 = v.pose(keys_[0]);
  const Pose& eo0 = v.pose(keys_[1]);
  const Vec6& w0 = v.vec(keys_[2]);
  const Pose& g1 = v.pose(keys_[3]);
  const Pose& eo1 = v.pose(keys_[4]);
  const Vec6& w1 = v.vec(keys_[5]);
  const VecX& theta = v.vec(keys_[6]);
  Vec6 s = theta.head<6>().array().exp().matrix();
  Pose g1_eo1 = g1.inverse() * eo1;
  Vec6 q = log_se3(g0.inverse() * eo0 * eo1.inverse() * g1);
  Vec6 r = (w1 - w0) - s.cwiseProduct(q);
  if (jacs) {
    Mat6 jri = right_jacobian_inv_se3(q);
    Mat6 ad = g1_eo1.adjoint();
    Mat6 sdiag = s.asDiagonal();
    jacs->resize(7);
    (*jacs)[0] = sdiag * jri * (g1_eo1 * eo0.inverse() * g0).adjoint();
    (*jacs)[1] = -sdiag * jri * ad;
    (*jacs)[2] = -Mat6::Identity();
    (*jacs)[3] = -sdiag * jri;
    (*jacs)[4] = sdiag * jri * ad;
    (*jacs)[5] = Mat6::Identity();
    MatX jk = MatX::Zero(6, 9);
    jk.leftCols<6>() = (-s.cwiseProduct(q)).asDiagonal();
    (*jacs)[6] = jk;
  }
  return r;
}

// ---- RestRigidityFactor ------------------------------------------------------

RestRigidityFactor::RestRigidityFactor(VarKey gripper0, VarKey rest0,
                                       VarKey gripper1, VarKey rest1,
                                       const VecX& sigma)
    : Factor(Kind::RestRigidity, {gripper0, rest0, gripper1, rest1}, sigma) {}

VecX RestRigidityFactor::evaluate(const Values& v,
                                  std::vector<MatX>* jacs) const {
  const Pose& g0 = v.pose(keys_[0]);
  const Pose& ro0 = v.pose(keys_[1]);
  const Pose& g1 = v.pose(keys_[2]);
  const Pose& ro1 = v.pose(keys_[3]);
  Pose g1_ro1 = g1.inverse() * ro1;
  Vec6 r = log_se3(g0.inverse() * ro0 * ro1.inverse() * g1);
  if (jacs) {
    Mat6 jri = right_jacobian_inv_se3(r);
    Mat6 ad = g1_ro1.adjoint();
    jacs->resize(4);
    (*jacs)[0] = -jri * (g1_ro1 * ro0.inverse() * g0).adjoint();
    (*jacs)[1] = jri * ad;
    (*jacs)[2] = jri;
    (*jacs)[3] = -jri * ad;
  }
  return r;
}

// ---- ContactConventionFactor ---------------------------------------------------

ContactConventionFactor::ContactConventionFactor(VarKey contact,
                                                 const Mat3& env_rotation,
                                                 Formation formation,
                                                 const VecX& sigma)
    : Factor(Kind::ContactConvention, {contact}, sigma),
      env_rotation_(env_rotation),
      formation_(formation) {}

VecX ContactConventionFactor::evaluate(const Values& v,
                                       std::vector<MatX>* jacs) const {
  Vec3 e = log_so3(env_rotation_.transpose() * v.pose(keys_[0]).rotation());
  bool full = formation_ == Formation::Point;
  VecX r = full ? VecX(e) : VecX(e.head<2>());
  if (jacs) {
    Mat3 jri = right_jacobian_inv_so3(e);
    MatX j = MatX::Zero(r.size(), 6);
    j.leftCols<3>() = full ? MatX(jri) : MatX(jri.topRows<2>());
    jacs->assign(1, j);
  }
  return r;
}

// ---- DesiredRotationFactor ------------------------------------------------------

DesiredRotationFactor::DesiredRotationFactor(VarKey gripper0, VarKey gripper1,
                                             const Mat3& desired,
                                             const VecX& sigma)
    : Factor(Kind::DesiredRotation, {gripper0, gripper1}, sigma),
      desired_(desired) {}

VecX DesiredRotationFactor::evaluate(const Values& v,
                                     std::vector<MatX>* jacs) const {
  const Mat3& r0 = v.pose(keys_[0]).rotation();
  const Mat3& r1 = v.pose(keys_[1]).rotation();
  Vec3 e = log_so3(desired_.transpose() * (r0.transpose() * r1));
  if (jacs) {
    jacs->resize(2);
    MatX j0 = MatX::Zero(3, 6);
    j0.leftCols<3>() =
        -left_jacobian_inv_so3(e) * desired_.transpose();
    (*jacs)[0] = j0;
    MatX j1 = MatX::Zero(3, 6);
    j1.leftCols<3>() = right_jacobian_inv_so3(e);
    (*jacs)[1] = j1;
  }
  return e;
}

// ---- MotionEffortFactor -----------------------------------------------------------

MotionEffortFactor::MotionEffortFactor(VarKey gripper0, VarKey gripper1,
                                       VarKey contact0, const VecX& sigma)
    : Factor(Kind::MotionEffort, {gripper0, gripper1, contact0}, sigma) {}

VecX MotionEffortFactor::evaluate(const Values& v,
                                  std::vector<MatX>* jacs) const {
  const Pose& g0 = v.pose(keys_[0]);
  const Pose& g1 = v.pose(keys_[1]);
  const Pose& c0 = v.pose(keys_[2]);
  Pose c0_g0 = c0.inverse() * g0;
  Vec6 r = log_se3(c0.inverse() * g1 * g0.inverse() * c0);
  if (jacs) {
    Mat6 jri = right_jacobian_inv_se3(r);
    Mat6 ad = c0_g0.adjoint();
    jacs->resize(3);
    (*jacs)[0] = -jri * ad;
    (*jacs)[1] = jri * ad;
    (*jacs)[2] = jri * (Mat6::Identity() - exp_se3(-r).adjoint());
  }
  return r;
}

// ---- TactileEnergyFactor -----------------------------------------------------------

TactileEnergyFactor::TactileEnergyFactor(VarKey wrench, VarKey grasp,
                                         const VecX& sigma)
    : Factor(Kind::TactileEnergy, {wrench, grasp}, sigma) {}

VecX TactileEnergyFactor::evaluate(const Values& v,
                                   std::vector<MatX>* jacs) const {
  const Vec6& w = v.vec(keys_[0]);
  const VecX& theta = v.vec(keys_[1]);
  if (!theta.head<6>().allFinite())
    throw Error("tactile_energy: non-positive or non-finite stiffness");
  Vec6 inv_sqrt_s = (-0.5 * theta.head<6>().array()).exp().matrix();
  Vec6 r = w.cwiseProduct(inv_sqrt_s);
  if (jacs) {
    jacs->resize(2);
    (*jacs)[0] = Mat6(inv_sqrt_s.asDiagonal());
    MatX jk = MatX::Zero(6, 9);
    jk.leftCols<6>() = (-0.5 * r).asDiagonal();
    (*jacs)[1] = jk;
  }
  return r;
}

// ---- ContactMaintenanceFactor ------------------------------------------------------

ContactMaintenanceFactor::ContactMaintenanceFactor(VarKey rest, VarKey eq,
                                                   VarKey contact,
                                                   double epsilon,
                                                   const VecX& sigma)
    : Factor(Kind::ContactMaintenance, {rest, eq, contact}, sigma),
      epsilon_(epsilon) {}

VecX ContactMaintenanceFactor::evaluate(const Values& v,
                                        std::vector<MatX>* jacs) const {
  const Pose& ro = v.pose(keys_[0]);
  const Pose& eo = v.pose(keys_[1]);
  const Pose& c = v.pose(keys_[2]);
  Pose a = c.inverse() * ro;        // prefix c^-1 r_o
  Pose b = eo.inverse() * c;        // suffix eq_o^-1 c
  Pose n = a * b;
  double zeta = -n.translation().z();
  VecX r(1);
  r(0) = std::max(0.0, epsilon_ - zeta);
  if (jacs) {
    jacs->assign(3, MatX::Zero(1, 6));
    if (r(0) > 0.0) {
      // Active side: d r = -d zeta = e3^T d t_N.
      Eigen::RowVector3d e3 = Eigen::RowVector3d(0, 0, 1);
      MatX jro(1, 6), jeo(1, 6), jc(1, 6);
      Mat3 tbx = hat(b.translation());
      jro << -e3 * a.rotation() * tbx, e3 * a.rotation();
      jeo << e3 * a.rotation() * tbx, -e3 * a.rotation();
      jc << e3 * hat(n.translation()), e3 * (n.rotation() - Mat3::Identity());
      (*jacs)[0] = jro;
      (*jacs)[1] = jeo;
      (*jacs)[2] = jc;
    }
  }
  return r;
}

// ---- Verification oracle --------------------------------------------------------

MatX numerical_factor_jacobian(const Factor& factor, const Values& values,
                               const VarKey& key, double step) {
  int n = var_dim(key.type);
  VecX r0 = factor.evaluate(values, nullptr);
  MatX jac(r0.size(), n);
  for (int i = 0; i < n; ++i) {
    Values vp = values;
    vp.update(key, VecX(step * VecX::Unit(n, i)));
    VecX hi = factor.evaluate(vp, nullptr);
    Values vm = values;
    vm.update(key, VecX(-step * VecX::Unit(n, i)));
    VecX lo = factor.evaluate(vm, nullptr);
    jac.col(i) = (hi - lo) / (2.0 * step);
  }
  return jac;
}

}  // namespace tacgraph
