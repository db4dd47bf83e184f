#include "flexsim/screw.hpp"

#include <cmath>

namespace flexsim {

Mat3 skew(const Vec3& a) {
  Mat3 S;
  S << 0.0, -a.z(), a.y(),
       a.z(), 0.0, -a.x(),
      -a.y(), a.x(), 0.0;
  return S;
}

Mat3 exp_so3(const Vec3& theta) {
  const double t = theta.norm();
  const Mat3 K = skew(theta);
  double c1, c2;
  if (t < kSmallAngle) {
    const double t2 = t * t;
    c1 = 1.0 - t2 / 6.0;
    c2 = 0.5 - t2 / 24.0;
  } else {
    c1 = std::sin(t) / t;
    c2 = (1.0 - std::cos(t)) / (t * t);
  }
  return Mat3::Identity() + c1 * K + c2 * K * K;
}

Mat3 body_jacobian(const Vec3& theta) {
  const double t = theta.norm();
  const Mat3 K = skew(theta);
  double c1, c2;
  if (t < kSmallAngle) {
    const double t2 = t * t;
    c1 = 0.5 - t2 / 24.0;
    c2 = 1.0 / 6.0 - t2 / 120.0;
  } else {
    c1 = (1.0 - std::cos(t)) / (t * t);
    c2 = (t - std::sin(t)) / (t * t * t);
  }
  return Mat3::Identity() - c1 * K + c2 * K * K;
}

Mat6 adjoint_matrix(const AdjointTransform& A) {
  Mat6 M = Mat6::Zero();
  M.topLeftCorner<3, 3>() = A.R;
  M.bottomLeftCorner<3, 3>() = skew(A.r) * A.R;
  M.bottomRightCorner<3, 3>() = A.R;
  return M;
}

AdjointTransform compose(const AdjointTransform& ab, const AdjointTransform& bc) {
  return {ab.R * bc.R, ab.r + ab.R * bc.r};
}

AdjointTransform inverse(const AdjointTransform& A) {
  const Mat3 Rt = A.R.transpose();
  return {Rt, -Rt * A.r};
}

Twist adjoint_apply(const AdjointTransform& A, const Twist& V) {
  const Vec3 w = A.R * ang(V);
  return stack(w, A.R * lin(V) + A.r.cross(w));
}

Wrench coadjoint_apply(const AdjointTransform& A, const Wrench& W) {
  // Ad^{-T} = [[R, r~ R], [0, R]]
  const Vec3 F = A.R * lin(W);
  return stack(A.R * ang(W) + A.r.cross(F), F);
}

Mat6 small_adjoint(const Twist& V) {
  Mat6 M = Mat6::Zero();
  const Mat3 W = skew(ang(V));
  M.topLeftCorner<3, 3>() = W;
  M.bottomLeftCorner<3, 3>() = skew(lin(V));
  M.bottomRightCorner<3, 3>() = W;
  return M;
}

Mat6 point_shift(const Vec3& r) {
  Mat6 X = Mat6::Identity();
  X.bottomLeftCorner<3, 3>() = skew(r);
  return X;
}

double pairing(const Wrench& W, const Twist& V) { return W.dot(V); }

Mat3 axis_rotation(int axis, double angle) {
  return Eigen::AngleAxisd(angle, Vec3::Unit(axis)).toRotationMatrix();
}

}  // namespace flexsim
