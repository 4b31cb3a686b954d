#include "tacgraph/se3.hpp"

#include <cmath>

namespace tacgraph {

namespace {

constexpr double kSmallAngle = 1e-7;
constexpr double kPi = 3.14159265358979323846;

// Coefficients of the SO(3)/SE(3) closed forms with Taylor branches near zero.
// a1 = (1 - cos t) / t^2
double coef_a1(double t) {
  if (t < kSmallAngle) {
    double t2 = t * t;
    return 0.5 - t2 / 24.0 + t2 * t2 / 720.0;
  }
  return (1.0 - std::cos(t)) / (t * t);
}

// a2 = (t - sin t) / t^3
double coef_a2(double t) {
  if (t < kSmallAngle) {
    double t2 = t * t;
    return 1.0 / 6.0 - t2 / 120.0 + t2 * t2 / 5040.0;
  }
  return (t - std::sin(t)) / (t * t * t);
}

// b = 1/t^2 - (1 + cos t) / (2 t sin t); appears in the inverse Jacobians.
double coef_b(double t) {
  if (t < kSmallAngle) {
    double t2 = t * t;
    return 1.0 / 12.0 + t2 / 720.0 + t2 * t2 / 30240.0;
  }
  return 1.0 / (t * t) - (1.0 + std::cos(t)) / (2.0 * t * std::sin(t));
}

// c2 = (1 - t^2/2 - cos t) / t^4
double coef_c2(double t) {
  if (t < kSmallAngle) {
    double t2 = t * t;
    return -1.0 / 24.0 + t2 / 720.0 - t2 * t2 / 40320.0;
  }
  return (1.0 - 0.5 * t * t - std::cos(t)) / (t * t * t * t);
}

// c3 = (t - sin t - t^3/6) / t^5
double coef_c3(double t) {
  if (t < kSmallAngle) {
    double t2 = t * t;
    return -1.0 / 120.0 + t2 / 5040.0 - t2 * t2 / 362880.0;
  }
  double t2 = t * t;
  return (t - std::sin(t) - t2 * t / 6.0) / (t2 * t2 * t);
}

// Q block of the SE(3) left Jacobian in (rot, trn) order.
Mat3 se3_q_matrix(const Vec3& w, const Vec3& v) {
  double t = w.norm();
  Mat3 ww = hat(w);
  Mat3 vv = hat(v);
  Mat3 wv = ww * vv;
  Mat3 vw = vv * ww;
  Mat3 wvw = wv * ww;
  double c1 = coef_a2(t);
  double c2 = coef_c2(t);
  double c3 = coef_c3(t);
  return 0.5 * vv + c1 * (wv + vw + ww * vw) -
         c2 * (ww * wv + vw * ww - 3.0 * wvw) -
         0.5 * (c2 - 3.0 * c3) * (wvw * ww + ww * wvw);
}

}  // namespace

Mat3 hat(const Vec3& w) {
  Mat3 m;
  m << 0.0, -w.z(), w.y(), w.z(), 0.0, -w.x(), -w.y(), w.x(), 0.0;
  return m;
}

Mat3 exp_so3(const Vec3& w) {
  double t = w.norm();
  Mat3 ww = hat(w);
  double s = (t < kSmallAngle) ? 1.0 - t * t / 6.0 : std::sin(t) / t;
  return Mat3::Identity() + s * ww + coef_a1(t) * ww * ww;
}

Vec3 log_so3(const Mat3& r) {
  Vec3 axis(r(2, 1) - r(1, 2), r(0, 2) - r(2, 0), r(1, 0) - r(0, 1));
  double cos_t = 0.5 * (r.trace() - 1.0);
  double sin_t = 0.5 * axis.norm();
  double t = std::atan2(sin_t, cos_t);
  if (t > kPi - 1e-5) {
    throw DegenerateRotationError("log_so3: rotation angle within 1e-5 of pi");
  }
  double k = (t < kSmallAngle) ? 0.5 + t * t / 12.0 : 0.5 * t / std::sin(t);
  return k * axis;
}

Mat3 so3_v_matrix(const Vec3& w) {
  double t = w.norm();
  Mat3 ww = hat(w);
  return Mat3::Identity() + coef_a1(t) * ww + coef_a2(t) * ww * ww;
}

Mat3 so3_v_matrix_inv(const Vec3& w) {
  double t = w.norm();
  Mat3 ww = hat(w);
  return Mat3::Identity() - 0.5 * ww + coef_b(t) * ww * ww;
}

Mat3 right_jacobian_so3(const Vec3& w) {
  double t = w.norm();
  Mat3 ww = hat(w);
  return Mat3::Identity() - coef_a1(t) * ww + coef_a2(t) * ww * ww;
}

Mat3 right_jacobian_inv_so3(const Vec3& w) {
  double t = w.norm();
  Mat3 ww = hat(w);
  return Mat3::Identity() + 0.5 * ww + coef_b(t) * ww * ww;
}

Mat3 left_jacobian_inv_so3(const Vec3& w) {
  return right_jacobian_inv_so3(-w);
}

Mat6 Pose::adjoint() const {
  Mat6 ad = Mat6::Zero();
  ad.topLeftCorner<3, 3>() = rotation_;
  ad.bottomRightCorner<3, 3>() = rotation_;
  ad.bottomLeftCorner<3, 3>() = hat(translation_) * rotation_;
  return ad;
}

Pose Pose::retract(const Vec6& xi) const { return *this * exp_se3(xi); }

Pose exp_se3(const Vec6& xi) {
  Vec3 w = xi.head<3>();
  Vec3 v = xi.tail<3>();
  return Pose(exp_so3(w), so3_v_matrix(w) * v);
}

Vec6 log_se3(const Pose& p) {
  Vec3 w = log_so3(p.rotation());
  Vec6 xi;
  xi << w, so3_v_matrix_inv(w) * p.translation();
  return xi;
}

Mat6 left_jacobian_se3(const Vec6& xi) {
  Vec3 w = xi.head<3>();
  Mat3 jl = so3_v_matrix(w);  // SO(3) left Jacobian
  Mat6 j = Mat6::Zero();
  j.topLeftCorner<3, 3>() = jl;
  j.bottomRightCorner<3, 3>() = jl;
  j.bottomLeftCorner<3, 3>() = se3_q_matrix(w, xi.tail<3>());
  return j;
}

Mat6 left_jacobian_inv_se3(const Vec6& xi) {
  Vec3 w = xi.head<3>();
  Mat3 jli = left_jacobian_inv_so3(w);
  Mat3 q = se3_q_matrix(w, xi.tail<3>());
  Mat6 j = Mat6::Zero();
  j.topLeftCorner<3, 3>() = jli;
  j.bottomRightCorner<3, 3>() = jli;
  j.bottomLeftCorner<3, 3>() = -jli * q * jli;
  return j;
}

Mat6 right_jacobian_se3(const Vec6& xi) { return left_jacobian_se3(-xi); }

Mat6 right_jacobian_inv_se3(const Vec6& xi) {
  return left_jacobian_inv_se3(-xi);
}

Vec6 local_coordinates(const Pose& a, const Pose& b) {
  return log_se3(a.inverse() * b);
}

}  // namespace tacgraph
