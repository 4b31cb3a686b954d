#pragma once

#include <string>

#include "tacgraph/se3.hpp"
#include "tacgraph/state.hpp"

namespace tacgraph {

/// Per-factor-kind standard deviations for one contact formation. Units match
/// the residual of the factor they whiten.
struct NoiseEntries {
  Vec9 prior_grasp;
  Vec6 prior_object;
  Vec6 gripper_pose;
  Vec6 tactile_total;
  Vec6 tactile_incremental;
  Vec6 contact_in_object;
  Vec6 contact_on_env;
  VecX torque;              // dim 3 point / 1 line / 0 patch
  Vec6 wrench_total;
  Vec6 wrench_incremental;
  Vec6 rest_rigidity;
  VecX contact_convention;  // dim 3 point / 2 line+patch
  Vec3 desired_rotation;
  Vec6 motion_effort;
  Vec6 tactile_energy;
  double contact_maintenance = 1e-4;
  double detection_scale = 1e-2;  // whitening scale for transition detection

  bool all_positive() const;
};

/// Named table of noise entries per contact formation, plus global scaling
/// hooks used by the ablation variants.
struct NoiseProfile {
  NoiseEntries point;
  NoiseEntries line;
  NoiseEntries patch;

  const NoiseEntries& at(Formation f) const {
    switch (f) {
      case Formation::Line:
        return line;
      case Formation::Patch:
        return patch;
      default:
        return point;
    }
  }
  NoiseEntries& at(Formation f) {
    return const_cast<NoiseEntries&>(
        static_cast<const NoiseProfile*>(this)->at(f));
  }

  static NoiseProfile defaults();

  /// Scales the tactile-energy sigma everywhere ("w/o tactile E" ablation).
  void scale_tactile_energy(double factor);
  /// Tightens wrench_total to wrench_incremental levels (no-slack variant).
  void remove_wrench_slack();

  std::string to_json() const;
  static NoiseProfile from_json(const std::string& text);
  static NoiseProfile load(const std::string& path);
};

}  // namespace tacgraph
