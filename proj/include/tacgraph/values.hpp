#pragma once

#include <unordered_map>

#include "tacgraph/se3.hpp"
#include "tacgraph/state.hpp"

namespace tacgraph {

/// Key-indexed container of variable estimates (poses and plain vectors).
class Values {
 public:
  void set_pose(const VarKey& key, const Pose& p) { poses_[key] = p; }
  void set_vec(const VarKey& key, const VecX& v) { vectors_[key] = v; }

  const Pose& pose(const VarKey& key) const { return poses_.at(key); }
  const VecX& vec(const VarKey& key) const { return vectors_.at(key); }

  bool has(const VarKey& key) const {
    return poses_.count(key) > 0 || vectors_.count(key) > 0;
  }
  void erase(const VarKey& key) {
    poses_.erase(key);
    vectors_.erase(key);
  }

  /// Applies a tangent update: poses retract, vectors add.
  void update(const VarKey& key, const VecX& delta) {
    if (is_pose(key.type)) {
      poses_[key] = poses_.at(key).retract(delta);
    } else {
      vectors_.at(key) += delta;
    }
  }

  size_t size() const { return poses_.size() + vectors_.size(); }

  const std::unordered_map<VarKey, Pose>& poses() const { return poses_; }
  const std::unordered_map<VarKey, VecX>& vectors() const { return vectors_; }

 private:
  std::unordered_map<VarKey, Pose> poses_;
  std::unordered_map<VarKey, VecX> vectors_;
};

/// Tangent-space distance between two value sets over the keys of `a`.
double tangent_distance(const Values& a, const Values& b);

}  // namespace tacgraph
