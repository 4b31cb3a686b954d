#pragma once

#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "tacgraph/se3.hpp"
#include "tacgraph/state.hpp"

namespace tacgraph {

/// Bottom geometry of a test object in the object frame (origin at the bottom
/// centroid, z up into the object). All bottom vertices lie in the z=0 plane.
struct ObjectModel {
  std::string name;
  std::vector<Vec3> vertices;
  std::vector<std::pair<int, int>> edges;
  double grasp_height = 0.10;  // grasp point above the bottom, m
  Vec3 com = Vec3(0, 0, 0.05);

  bool valid() const;
  /// Shortest bottom edge length, m.
  double shortest_edge() const;

  static ObjectModel rectangle();          // 35 x 50 mm bottom
  static ObjectModel hexagon();            // regular, edge 17.5 mm
  static ObjectModel irregular(int index); // randomized convex polygons
  static ObjectModel by_name(const std::string& name);
};

/// Gaussian measurement noise levels for the synthesized sensors.
struct MeasurementNoise {
  double gripper_rot = 5e-5;  // rad
  double gripper_trn = 5e-5;  // m
  double tactile = 1e-4;      // twist units
};

struct MeasurementSample {
  Pose gripper;  // g* = true gripper with additive twist noise
  Twist tactile; // delta with additive noise
  int step = 0;
};

/// One sticking contact between a bottom vertex and the surface.
struct Anchor {
  int vertex;
  Vec3 world;  // anchor position, z = 0
};

class ContactSimulator {
 public:
  /// Hidden ground truth of one trial.
  struct Params {
    GraspParams grasp;                 // true K
    Vec6 stiffening = Vec6::Zero();    // cubic coefficients (nonlinear term)
    double mu = 0.5;                   // Coulomb friction coefficient
    double weight = 0.0;               // object weight in force units; 0 = off
  };

  /// Result of an equilibrium probe at a hypothetical gripper pose.
  struct Probe {
    Pose object;
    double energy = 0.0;
    Vec3 net_force = Vec3::Zero();     // contact force on the object
    bool in_contact = false;
  };

  ContactSimulator(ObjectModel object, Params params,
                   const Pose& rest_in_gripper, const Pose& initial_gripper);

  /// Moves the gripper, re-equilibrates the object against the surface, and
  /// applies quasi-static Coulomb slip to any anchor outside the cone.
  void step(const Pose& gripper);

  /// Equilibrium at a hypothetical gripper pose with the current anchors,
  /// without committing state or slipping.
  Probe probe(const Pose& gripper) const;

  /// Synthesizes one noisy measurement; deterministic per generator state.
  MeasurementSample measure(const MeasurementNoise& noise,
                            std::mt19937_64& rng) const;

  /// True environment reaction wrench on the object, [torque; force] about the
  /// environment origin.
  Vec6 ft_ground_truth() const;

  // Observers --------------------------------------------------------------
  const Pose& gripper() const { return gripper_; }
  Pose resting() const { return gripper_ * rest_in_gripper_; }
  const Pose& equilibrium() const { return object_; }
  bool in_contact() const { return !anchors_.empty(); }
  Formation formation() const;
  const std::vector<Anchor>& anchors() const { return anchors_; }
  const std::vector<Vec3>& contact_forces() const { return forces_; }
  const ObjectModel& object_model() const { return model_; }
  const Params& params() const { return params_; }

  /// True intrinsic wrench at the compliance center, gripper-frame components.
  Vec6 intrinsic_wrench() const;
  /// True tactile displacement.
  Twist tactile() const;
  /// True press depth (offset distance), m.
  double zeta() const;
  double elastic_energy() const;
  /// |f_tangential| / f_normal of the net contact force; 0 without contact.
  double tangential_normal_ratio() const;

  /// Mean displacement of the sticking anchors from their first contact
  /// locations, m.
  double slipped_distance() const;
  /// Change in the contact line direction since line formation, rad.
  double slipped_rotation() const;
  int step_index() const { return step_index_; }

  // Physics diagnostics ------------------------------------------------------
  /// | grasp wrench + contact wrench (+ gravity) |, world frame.
  double balance_residual() const;
  /// Lowest bottom-vertex height, m (>= -1e-9 when resolved).
  double min_vertex_height() const;
  /// Samples feasible perturbations; true if none decreases the energy.
  bool energy_minimality_check(std::mt19937_64& rng, int samples = 100,
                               double magnitude = 1e-5) const;

 private:
  struct Reduced {
    // Left-perturbation screw basis of the feasible manifold (6 x dof).
    MatX basis;
    int dof;
  };

  Reduced reduced_basis(const std::vector<Anchor>& anchors) const;
  Pose project_to_anchors(const Pose& o,
                          const std::vector<Anchor>& anchors) const;
  // Spring energy of a candidate object pose.
  double elastic_of(const Pose& g, const Pose& o) const;
  // Full potential (spring + optional gravity).
  double energy_of(const Pose& g, const Pose& o) const;
  Vec6 shifted_displacement(const Pose& g, const Pose& o) const;
  // Spring wrench on the object about the world origin (includes gravity).
  Vec6 generalized_force(const Pose& g, const Pose& o) const;
  // Minimizes energy over the reduced manifold; optional scalar constraint
  // z(vertex)=0 for touchdown solves. Returns converged pose.
  Pose minimize(const Pose& g, Pose o, const std::vector<Anchor>& anchors,
                std::optional<int> touchdown_vertex) const;
  // Active-set resolve at gripper pose g: gains/releases until consistent.
  void resolve_contacts(const Pose& g, Pose& o, std::vector<Anchor>& anchors,
                        std::vector<Vec3>& forces) const;
  std::vector<Vec3> distribute_forces(const Pose& g, const Pose& o,
                                      const std::vector<Anchor>& anchors) const;
  void apply_friction();

  ObjectModel model_;
  Params params_;
  Pose rest_in_gripper_;
  Pose gripper_;
  Pose object_;
  std::vector<Anchor> anchors_;
  std::vector<Vec3> forces_;
  std::map<int, Vec3> first_anchor_;
  std::optional<double> line_reference_;
  int step_index_ = 0;
};

}  // namespace tacgraph
