#pragma once

#include <Eigen/Dense>

namespace flexsim {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat6 = Eigen::Matrix<double, 6, 6>;
using VecX = Eigen::VectorXd;
using MatX = Eigen::MatrixXd;

// Twists are (omega; v) and wrenches are (tau; F), both body-fixed.
using Twist = Vec6;
using Wrench = Vec6;

inline Vec3 ang(const Vec6& x) { return x.head<3>(); }
inline Vec3 lin(const Vec6& x) { return x.tail<3>(); }
inline Vec6 stack(const Vec3& a, const Vec3& b) {
  Vec6 out;
  out << a, b;
  return out;
}

Mat3 skew(const Vec3& a);

// Rodrigues formula with a series fallback below kSmallAngle.
Mat3 exp_so3(const Vec3& theta);

// Right (body) Jacobian: omega = J(theta) * theta_dot for R = exp(theta~).
//   J = I - (1 - cos t)/t^2 theta~ + (t - sin t)/t^3 theta~^2
Mat3 body_jacobian(const Vec3& theta);

inline constexpr double kSmallAngle = 1e-6;

struct AdjointTransform {
  Mat3 R = Mat3::Identity();
  Vec3 r = Vec3::Zero();
};

// [[R, 0], [r~ R, R]]
Mat6 adjoint_matrix(const AdjointTransform& A);
AdjointTransform compose(const AdjointTransform& ab, const AdjointTransform& bc);
AdjointTransform inverse(const AdjointTransform& A);

Twist adjoint_apply(const AdjointTransform& A, const Twist& V);
// Ad^{-T} W
Wrench coadjoint_apply(const AdjointTransform& A, const Wrench& W);

// [[w~, 0], [v~, w~]]
Mat6 small_adjoint(const Twist& V);

// [[I, 0], [r~, I]]
Mat6 point_shift(const Vec3& r);

double pairing(const Wrench& W, const Twist& V);

// Elementary rotation about body axis 0, 1 or 2.
Mat3 axis_rotation(int axis, double angle);

}  // namespace flexsim
