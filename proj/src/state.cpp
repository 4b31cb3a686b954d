#include "tacgraph/state.hpp"

#include <cmath>

namespace tacgraph {

std::string to_string(Formation f) {
  switch (f) {
    case Formation::Point:
      return "point";
    case Formation::Line:
      return "line";
    case Formation::Patch:
      return "patch";
  }
  return "?";
}

Vec9 GraspParams::to_params() const {
  Vec9 p;
  p << kappa.array().log().matrix(), k.array().log().matrix(), eta;
  return p;
}

GraspParams GraspParams::from_params(const Vec9& p) {
  GraspParams g;
  g.kappa = p.head<3>().array().exp().matrix();
  g.k = p.segment<3>(3).array().exp().matrix();
  g.eta = p.tail<3>();
  return g;
}

Twist tactile_displacement(const Pose& gripper, const Pose& resting,
                           const Pose& equilibrium) {
  // (r_o^-1 g)^-1 (eq_o^-1 g) = g^-1 r_o eq_o^-1 g
  Pose rel = gripper.inverse() * resting * equilibrium.inverse() * gripper;
  return Twist(log_se3(rel));
}

double offset_distance(const Pose& resting, const Pose& equilibrium,
                       const Pose& contact) {
  // zeta = -((r_o^-1 c)^-1 (eq_o^-1 c))_trn,z = -(c^-1 r_o eq_o^-1 c)_trn,z
  Pose n = contact.inverse() * resting * equilibrium.inverse() * contact;
  return -n.translation().z();
}

std::string to_string(const VarKey& key) {
  const char* name = "?";
  switch (key.type) {
    case VarType::Gripper:
      name = "g";
      break;
    case VarType::RestObject:
      name = "ro";
      break;
    case VarType::EqObject:
      name = "eo";
      break;
    case VarType::Wrench:
      name = "w";
      break;
    case VarType::Contact:
      name = "c";
      break;
    case VarType::Grasp:
      return "K";
  }
  return std::string(name) + std::to_string(key.step);
}

}  // namespace tacgraph
