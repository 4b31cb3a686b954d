#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "tacgraph/errors.hpp"

namespace tacgraph {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Vec9 = Eigen::Matrix<double, 9, 1>;
using VecX = Eigen::VectorXd;
using Mat3 = Eigen::Matrix3d;
using Mat6 = Eigen::Matrix<double, 6, 6>;
using MatX = Eigen::MatrixXd;

/// Tangent element of SE(3) in canonical order [Rx Ry Rz x y z]:
/// rotational part first (radians, axis-angle), translational second (meters).
struct Twist {
  Vec3 rot = Vec3::Zero();
  Vec3 trn = Vec3::Zero();

  Twist() = default;
  Twist(const Vec3& r, const Vec3& t) : rot(r), trn(t) {}
  explicit Twist(const Vec6& v) : rot(v.head<3>()), trn(v.tail<3>()) {}

  Vec6 vector() const {
    Vec6 v;
    v << rot, trn;
    return v;
  }
};

/// Rigid transform in SE(3). Stored as rotation matrix + translation; the
/// 3x3 matrix view is the external contract.
class Pose {
 public:
  Pose() : rotation_(Mat3::Identity()), translation_(Vec3::Zero()) {}
  Pose(const Mat3& rotation, const Vec3& translation)
      : rotation_(rotation), translation_(translation) {}

  static Pose identity() { return Pose(); }
  static Pose from_translation(const Vec3& t) { return Pose(Mat3::Identity(), t); }
  static Pose from_rotation(const Mat3& r) { return Pose(r, Vec3::Zero()); }

  const Mat3& rotation() const { return rotation_; }
  const Vec3& translation() const { return translation_; }

  Pose operator*(const Pose& other) const {
    return Pose(rotation_ * other.rotation_,
                rotation_ * other.translation_ + translation_);
  }

  Pose inverse() const {
    Mat3 rt = rotation_.transpose();
    return Pose(rt, -(rt * translation_));
  }

  /// Applies the transform to a point: R p + t.
  Vec3 act(const Vec3& p) const { return rotation_ * p + translation_; }

  /// Adjoint in (rot, trn) block order: [[R, 0], [t^ R, R]].
  Mat6 adjoint() const;

  /// Right retraction: this * exp(xi).
  Pose retract(const Vec6& xi) const;

  /// Orthogonality defect of the rotation block, for validity checks.
  double rotation_defect() const {
    return (rotation_.transpose() * rotation_ - Mat3::Identity()).norm();
  }

 private:
  Mat3 rotation_;
  Vec3 translation_;
};

// ---- SO(3) ----------------------------------------------------------------

/// Skew-symmetric matrix of a 3-vector.
Mat3 hat(const Vec3& w);

Mat3 exp_so3(const Vec3& w);

/// Inverse of exp_so3. Throws DegenerateRotationError for angles at/near pi.
Vec3 log_so3(const Mat3& r);

/// V matrix of the SE(3) exponential; equals the SO(3) left Jacobian.
Mat3 so3_v_matrix(const Vec3& w);
Mat3 so3_v_matrix_inv(const Vec3& w);

Mat3 right_jacobian_so3(const Vec3& w);
Mat3 right_jacobian_inv_so3(const Vec3& w);
Mat3 left_jacobian_inv_so3(const Vec3& w);

// ---- SE(3) ----------------------------------------------------------------

Pose exp_se3(const Vec6& xi);
inline Pose exp_se3(const Twist& xi) { return exp_se3(xi.vector()); }

/// Inverse of exp_se3. Throws DegenerateRotationError for angles at/near pi.
Vec6 log_se3(const Pose& p);

Mat6 left_jacobian_se3(const Vec6& xi);
Mat6 left_jacobian_inv_se3(const Vec6& xi);
Mat6 right_jacobian_se3(const Vec6& xi);
Mat6 right_jacobian_inv_se3(const Vec6& xi);

/// log(a^-1 b): tangent coordinates of b in the frame of a.
Vec6 local_coordinates(const Pose& a, const Pose& b);

// ---- Numerical differentiation on the retraction ---------------------------

/// Central finite differences of a vector-valued map of one pose, taken on the
/// retraction p * exp(xi). Reference oracle for all analytic Jacobians.
template <typename F>
MatX numerical_jacobian(F&& f, const Pose& at, double step = 1e-6) {
  VecX f0 = f(at);
  MatX jac(f0.size(), 6);
  for (int i = 0; i < 6; ++i) {
    Vec6 d = Vec6::Zero();
    d(i) = step;
    VecX hi = f(at.retract(d));
    d(i) = -step;
    VecX lo = f(at.retract(d));
    jac.col(i) = (hi - lo) / (2.0 * step);
  }
  return jac;
}

/// Same for a pose-valued map; the output is charted by log(f(at)^-1 f(at+xi)).
template <typename F>
MatX numerical_jacobian_pose_valued(F&& f, const Pose& at, double step = 1e-6) {
  Pose f0 = f(at);
  MatX jac(6, 6);
  for (int i = 0; i < 6; ++i) {
    Vec6 d = Vec6::Zero();
    d(i) = step;
    Vec6 hi = local_coordinates(f0, f(at.retract(d)));
    d(i) = -step;
    Vec6 lo = local_coordinates(f0, f(at.retract(d)));
    jac.col(i) = (hi - lo) / (2.0 * step);
  }
  return jac;
}

/// Central finite differences of a map of a plain vector variable.
template <typename F>
MatX numerical_jacobian_vec(F&& f, const VecX& at, double step = 1e-6) {
  VecX f0 = f(at);
  MatX jac(f0.size(), at.size());
  VecX x = at;
  for (int i = 0; i < at.size(); ++i) {
    x(i) = at(i) + step;
    VecX hi = f(x);
    x(i) = at(i) - step;
    VecX lo = f(x);
    x(i) = at(i);
    jac.col(i) = (hi - lo) / (2.0 * step);
  }
  return jac;
}

}  // namespace tacgraph
