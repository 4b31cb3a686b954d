#pragma once

#include <memory>
#include <vector>

#include "tacgraph/se3.hpp"
#include "tacgraph/state.hpp"
#include "tacgraph/values.hpp"

namespace tacgraph {

/// A residual function over a subset of variables with a diagonal noise model.
/// Whitened residual = residual / sigma componentwise; cost = 1/2 |whitened|^2.
class Factor {
 public:
  enum class Kind {
    PriorGrasp,
    PriorObject,
    GripperPose,
    TactileTotal,
    TactileIncremental,
    ContactInObject,
    ContactOnEnv,
    TorquePoint,
    TorqueLine,
    WrenchTotal,
    WrenchIncremental,
    RestRigidity,
    ContactConvention,
    DesiredRotation,
    MotionEffort,
    TactileEnergy,
    ContactMaintenance,
  };

  Factor(Kind kind, std::vector<VarKey> keys, VecX sigma)
      : kind_(kind), keys_(std::move(keys)), sigma_(std::move(sigma)) {}
  virtual ~Factor() = default;

  Kind kind() const { return kind_; }
  const std::vector<VarKey>& keys() const { return keys_; }
  const VecX& sigma() const { return sigma_; }
  int dim() const { return static_cast<int>(sigma_.size()); }

  /// Residual; optionally fills one Jacobian block per connected key, taken
  /// with respect to the right perturbation P*exp(xi) for pose variables.
  virtual VecX evaluate(const Values& values,
                        std::vector<MatX>* jacobians) const = 0;

  VecX whitened(const Values& values) const {
    return evaluate(values, nullptr).cwiseQuotient(sigma_);
  }
  double cost(const Values& values) const {
    return 0.5 * whitened(values).squaredNorm();
  }

 protected:
  Kind kind_;
  std::vector<VarKey> keys_;
  VecX sigma_;
};

const char* kind_name(Factor::Kind kind);

using FactorPtr = std::shared_ptr<const Factor>;

// ---- Estimation factors -----------------------------------------------------

/// Prior on the grasp parameters in optimization coordinates (log-stiffness).
class PriorGraspFactor : public Factor {
 public:
  PriorGraspFactor(VarKey grasp, const Vec9& prior_params, const VecX& sigma);
  VecX evaluate(const Values& v, std::vector<MatX>* jacs) const override;

 private:
  Vec9 prior_;
};

/// Weak prior on the initial resting object pose.
class PriorObjectFactor : public Factor {
 public:
  PriorObjectFactor(VarKey rest, const Pose& prior, const VecX& sigma);
  VecX evaluate(const Values& v, std::vector<MatX>* jacs) const override;

 private:
  Pose prior_;
};

/// Gripper pose measurement from forward kinematics: log(g*^-1 g).
class GripperPoseFactor : public Factor {
 public:
  GripperPoseFactor(VarKey gripper, const Pose& measured, const VecX& sigma);
  VecX evaluate(const Values& v, std::vector<MatX>* jacs) const override;

 private:
  Pose measured_;
};

/// Total tactile displacement: log(delta^-1 (r_o^-1 g)^-1 (eq_o^-1 g)).
class TactileTotalFactor : public Factor {
 public:
  TactileTotalFactor(VarKey gripper, VarKey rest, VarKey eq, const Twist& delta,
                     const VecX& sigma);
  VecX evaluate(const Values& v, std::vector<MatX>* jacs) const override;

 private:
  Pose delta_;
};

/// Incremental tactile displacement between adjacent timesteps.
class TactileIncrementalFactor : public Factor {
 public:
  TactileIncrementalFactor(VarKey gripper0, VarKey eq0, VarKey gripper1,
                           VarKey eq1, const Twist& delta0, const Twist& delta1,
                           const VecX& sigma);
  VecX evaluate(const Values& v, std::vector<MatX>* jacs) const override;

 private:
  Pose delta_rel_;  // delta0^-1 delta1
};

/// Contact location in the object frame stays constant between timesteps.
class ContactInObjectFactor : public Factor {
 public:
  ContactInObjectFactor(VarKey eq0, VarKey contact0, VarKey eq1,
                        VarKey contact1, const VecX& sigma);
  VecX evaluate(const Values& v, std::vector<MatX>* jacs) const override;
};

/// Contact pose on the environment: between factor with anisotropic noise,
/// tight perpendicular to the surface.
class ContactOnEnvFactor : public Factor {
 public:
  ContactOnEnvFactor(VarKey contact0, VarKey contact1, const VecX& sigma);
  VecX evaluate(const Values& v, std::vector<MatX>* jacs) const override;
};

/// Point contact: no torque about the contact, M - ((g^-1 c)_trn - eta) x F.
class TorquePointFactor : public Factor {
 public:
  TorquePointFactor(VarKey gripper, VarKey wrench, VarKey contact, VarKey grasp,
                    const VecX& sigma);
  VecX evaluate(const Values& v, std::vector<MatX>* jacs) const override;
};

/// Line contact: no torque component along the contact line (x-axis of c).
class TorqueLineFactor : public Factor {
 public:
  TorqueLineFactor(VarKey gripper, VarKey wrench, VarKey contact, VarKey grasp,
                   const VecX& sigma);
  VecX evaluate(const Values& v, std::vector<MatX>* jacs) const override;
};

/// Wrench regression to the decoupled linear spring: w - [kappa,k] (.) d.
class WrenchTotalFactor : public Factor {
 public:
  WrenchTotalFactor(VarKey gripper, VarKey rest, VarKey eq, VarKey wrench,
                    VarKey grasp, const VecX& sigma);
  VecX evaluate(const Values& v, std::vector<MatX>* jacs) const override;
};

/// Incremental wrench regression between adjacent timesteps.
class WrenchIncrementalFactor : public Factor {
 public:
  WrenchIncrementalFactor(VarKey gripper0, VarKey eq0, VarKey wrench0,
                          VarKey gripper1, VarKey eq1, VarKey wrench1,
                          VarKey grasp, const VecX& sigma);
  VecX evaluate(const Values& v, std::vector<MatX>* jacs) const override;
};

/// The resting pose rides rigidly with the gripper between timesteps (the
/// grasp does not slip): (r_o0^-1 g0)^-1 (r_o1^-1 g1) = identity.
class RestRigidityFactor : public Factor {
 public:
  RestRigidityFactor(VarKey gripper0, VarKey rest0, VarKey gripper1,
                     VarKey rest1, const VecX& sigma);
  VecX evaluate(const Values& v, std::vector<MatX>* jacs) const override;
};

/// Pins the redundant rotational DOFs of the contact pose: full rotation for
/// point contact, the two tilt components for line/patch.
class ContactConventionFactor : public Factor {
 public:
  ContactConventionFactor(VarKey contact, const Mat3& env_rotation,
                          Formation formation, const VecX& sigma);
  VecX evaluate(const Values& v, std::vector<MatX>* jacs) const override;

 private:
  Mat3 env_rotation_;
  Formation formation_;
};

// ---- Control factors --------------------------------------------------------

/// Desired rotation command: rotation-log(R^-1 (g0^-1 g1)_rot).
class DesiredRotationFactor : public Factor {
 public:
  DesiredRotationFactor(VarKey gripper0, VarKey gripper1, const Mat3& desired,
                        const VecX& sigma);
  VecX evaluate(const Values& v, std::vector<MatX>* jacs) const override;
  const Mat3& desired() const { return desired_; }

 private:
  Mat3 desired_;
};

/// Motion effort at the estimated contact: log(c0^-1 g1 g0^-1 c0).
class MotionEffortFactor : public Factor {
 public:
  MotionEffortFactor(VarKey gripper0, VarKey gripper1, VarKey contact0,
                     const VecX& sigma);
  VecX evaluate(const Values& v, std::vector<MatX>* jacs) const override;
};

/// Elastic energy of the sensor finger: w (/) [sqrt(kappa), sqrt(k)]; the
/// squared norm of the residual equals twice the stored energy.
class TactileEnergyFactor : public Factor {
 public:
  TactileEnergyFactor(VarKey wrench, VarKey grasp, const VecX& sigma);
  VecX evaluate(const Values& v, std::vector<MatX>* jacs) const override;
};

/// Contact maintenance hinge: max(0, epsilon - zeta), penalizing an offset
/// distance short of the desired press depth.
class ContactMaintenanceFactor : public Factor {
 public:
  ContactMaintenanceFactor(VarKey rest, VarKey eq, VarKey contact,
                           double epsilon, const VecX& sigma);
  VecX evaluate(const Values& v, std::vector<MatX>* jacs) const override;
  double epsilon() const { return epsilon_; }

 private:
  double epsilon_;
};

// ---- Verification oracle ----------------------------------------------------

/// Finite-difference Jacobian of a factor with respect to one of its keys,
/// computed on the retraction. Independent check of the analytic Jacobians.
MatX numerical_factor_jacobian(const Factor& factor, const Values& values,
                               const VarKey& key, double step = 1e-6);

}  // namespace tacgraph
