#pragma once

#include <cstdint>
#include <functional>
#include <string>

#include "tacgraph/se3.hpp"

namespace tacgraph {

/// Extrinsic contact formation between object and environment.
enum class Formation : uint8_t { Point, Line, Patch };

std::string to_string(Formation f);

/// World pose of the gripper.
struct GripperPose {
  Pose pose;
};

/// Resting (undeformed grasp) and equilibrium (deformed under contact) object
/// poses, both in the world frame.
struct ObjectPosePair {
  Pose resting;
  Pose equilibrium;
};

/// Wrench the gripper exerts on the object at the compliance center,
/// components in the gripper frame. Units are internal (unnormalized).
struct IntrinsicWrench {
  Vec3 moment = Vec3::Zero();
  Vec3 force = Vec3::Zero();

  Vec6 vector() const {
    Vec6 v;
    v << moment, force;
    return v;
  }
  static IntrinsicWrench from(const Vec6& v) {
    return IntrinsicWrench{v.head<3>(), v.tail<3>()};
  }
};

/// Extrinsic contact pose. Conventions for the redundant degrees of freedom:
/// point contact keeps the rotation aligned with the environment frame; line
/// contact keeps the z-axis perpendicular to the surface with the x-axis along
/// the contact line.
struct ContactPose {
  Pose pose;
  Formation formation = Formation::Point;
};

/// Grasp parameters: decoupled rotational/translational stiffness plus the
/// compliance-center offset from the gripper origin.
struct GraspParams {
  Vec3 kappa = Vec3::Ones();  // rotational stiffness, wrench-units/rad
  Vec3 k = Vec3::Ones();      // translational stiffness, wrench-units/m
  Vec3 eta = Vec3::Zero();    // compliance-center offset, m

  /// Stacked [kappa, k] for elementwise spring laws.
  Vec6 stiffness() const {
    Vec6 s;
    s << kappa, k;
    return s;
  }

  /// Optimization coordinates: stiffness in log-space (positivity), eta linear.
  Vec9 to_params() const;
  static GraspParams from_params(const Vec9& p);

  bool valid() const {
    return (kappa.array() > 0.0).all() && (k.array() > 0.0).all() &&
           kappa.allFinite() && k.allFinite() && eta.allFinite();
  }
};

/// Per-timestep variable bundle. GraspParams is graph-wide and lives outside.
struct StateNode {
  int step = 0;
  GripperPose gripper;
  ObjectPosePair object;
  IntrinsicWrench wrench;
  ContactPose contact;
};

/// Tactile displacement: log((r_o^-1 g)^-1 (eq_o^-1 g)), the object's
/// resting-to-equilibrium displacement expressed in the gripper frame.
Twist tactile_displacement(const Pose& gripper, const Pose& resting,
                           const Pose& equilibrium);
inline Twist tactile_displacement(const StateNode& node) {
  return tactile_displacement(node.gripper.pose, node.object.resting,
                              node.object.equilibrium);
}

/// Estimated offset distance: how far the resting contact point sits below the
/// equilibrium contact point along the contact z-axis. Positive when pressed.
double offset_distance(const Pose& resting, const Pose& equilibrium,
                       const Pose& contact);
inline double offset_distance(const StateNode& node) {
  return offset_distance(node.object.resting, node.object.equilibrium,
                         node.contact.pose);
}

// ---- Variable keys ----------------------------------------------------------

enum class VarType : uint8_t {
  Gripper,     // g_i, SE(3)
  RestObject,  // r_o_i, SE(3)
  EqObject,    // eq_o_i, SE(3)
  Wrench,      // w_i, R^6
  Contact,     // c_i, SE(3)
  Grasp        // K, R^9 (shared)
};

struct VarKey {
  VarType type;
  int32_t step;  // -1 for the shared grasp variable

  bool operator==(const VarKey&) const = default;
  bool operator<(const VarKey& o) const {
    if (step != o.step) return step < o.step;
    return static_cast<uint8_t>(type) < static_cast<uint8_t>(o.type);
  }
};

std::string to_string(const VarKey& key);

inline VarKey gripper_key(int step) { return {VarType::Gripper, step}; }
inline VarKey rest_key(int step) { return {VarType::RestObject, step}; }
inline VarKey eq_key(int step) { return {VarType::EqObject, step}; }
inline VarKey wrench_key(int step) { return {VarType::Wrench, step}; }
inline VarKey contact_key(int step) { return {VarType::Contact, step}; }
inline VarKey grasp_key() { return {VarType::Grasp, -1}; }

inline int var_dim(VarType t) { return t == VarType::Grasp ? 9 : 6; }
inline bool is_pose(VarType t) {
  return t == VarType::Gripper || t == VarType::RestObject ||
         t == VarType::EqObject || t == VarType::Contact;
}

}  // namespace tacgraph

template <>
struct std::hash<tacgraph::VarKey> {
  size_t operator()(const tacgraph::VarKey& k) const {
    return std::hash<int64_t>()((int64_t(k.step) << 8) |
                                int64_t(static_cast<uint8_t>(k.type)));
  }
};
