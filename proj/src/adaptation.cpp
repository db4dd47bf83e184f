#include "flexsim/adaptation.hpp"

#include <cmath>

namespace flexsim {

VecX project(const VecX& s, const VecX& s_l, const VecX& s_h, const VecX& e) {
  VecX out = e;
  for (int k = 0; k < e.size(); ++k) {
    if ((s[k] >= s_h[k] && e[k] > 0.0) || (s[k] <= s_l[k] && e[k] < 0.0)) out[k] = 0.0;
  }
  return out;
}

VecX modal_inertial_load(const LinkModel& link, const LinkMotion& x, const Twist& Vdot, const Vec3& g) {
  const int n = link.n();
  VecX f = VecX::Zero(n);
  if (n == 0) return f;
  const NodeKinematics k = node_kinematics(link, x);
  const Vec3 w = ang(x.V);
  const Vec3 gb = x.R.transpose() * g;
  const auto& quad = link.basis.quad();
  for (int j = 0; j < kQuadNodes; ++j) {
    const Vec3 a = lin(Vdot) - k.r_ib[j].cross(ang(Vdot)) + w.cross(k.rdot_xi[j]) + w.cross(k.v_ib[j]) + gb;
    f += link.params.rhoA() * quad.w[j] * link.basis.node_shapes(j, 0).transpose() * a;
  }
  return f;
}

Vec3 measured_strain_channel(const LinkModel& link, const LinkMotion& x, const Twist& Vdot, const VecX& qdd,
                             const VecX& modal_joint_force, const Vec3& g) {
  if (link.n() == 0) return Vec3::Zero();
  const VecX f = modal_inertial_load(link, x, Vdot, g);
  const double c = link.params.c;
  const Vec3 m_xi = link.basis.shapes(c, 0) * (qdd + f - modal_joint_force);
  const double EA = link.stiffness.Iv1(0, 0);
  const Vec3 r2 = link.basis.shapes(c, 2) * x.q;
  Vec3 z = -link.params.rhoA() * m_xi;
  z.x() += EA * r2.x();
  return z;
}

Residuals residuals(const Mat65& Y_V, const Vec6& y0, const Vec6& lhs_V, const Mat32& Y_xi, const Vec3& z_xi,
                    const Vec5& s_hat) {
  return {lhs_V - Y_V * s_hat - y0, z_xi - Y_xi * s_hat.tail<2>()};
}

Vec5 lumped_gamma(const Mat65& Y_V, const Vec6& eps_V, const Mat32& Y_xi, const Vec3& eps_xi) {
  Vec5 G = Y_V.transpose() * eps_V;
  G.tail<2>() += Y_xi.transpose() * eps_xi;
  return G;
}

Mat95 stacked_regressor(const Mat65& Y_V, const Mat32& Y_xi) {
  Mat95 Y = Mat95::Zero();
  Y.topRows<6>() = Y_V;
  Y.block<3, 2>(6, 3) = Y_xi;
  return Y;
}

AdaptState update(const AdaptState& a, const Vec5& Gamma, double dt) {
  AdaptState out = a;
  const Vec5 e = a.Lambda.cwiseProduct(Gamma);
  const VecX step = project(a.s_hat, a.bounds.lo, a.bounds.hi, e);
  out.s_hat = (a.s_hat + dt * step).cwiseMax(a.bounds.lo).cwiseMin(a.bounds.hi);
  return out;
}

double stable_adaptation_step(const Vec5& Lambda, const Mat95& Ybar, double dt) {
  const Vec5 sq = Lambda.cwiseSqrt();
  const Mat5 S = sq.asDiagonal() * Ybar.transpose() * Ybar * sq.asDiagonal();
  const double lam = Eigen::SelfAdjointEigenSolver<Mat5>(S, Eigen::EigenvaluesOnly).eigenvalues().maxCoeff();
  return lam * dt > 1.0 ? 1.0 / lam : dt;
}

AdaptState update(const AdaptState& a, const Vec5& Gamma, const Mat95& Ybar, double dt) {
  return update(a, Gamma, stable_adaptation_step(a.Lambda, Ybar, dt));
}

PeGramian::PeGramian(double window, double dt)
    : dt_(dt), n_window_(std::max(1, static_cast<int>(std::lround(window / dt)))) {}

void PeGramian::push(const Mat95& Ybar) {
  const Mat5 G = Ybar.transpose() * Ybar;
  hist_.push_back(G);
  sum_ += G;
  if (static_cast<int>(hist_.size()) > n_window_ + 1) {
    sum_ -= hist_.front();
    hist_.pop_front();
  }
  if (++pushes_ % (10 * n_window_) == 0) {
    sum_.setZero();
    for (const auto& h : hist_) sum_ += h;
  }
}

Mat5 PeGramian::gramian() const {
  if (hist_.empty()) return Mat5::Zero();
  return dt_ * (sum_ - 0.5 * (hist_.front() + hist_.back()));
}

double lambda_min_sym(const Mat5& G) {
  Eigen::SelfAdjointEigenSolver<Mat5> eig(0.5 * (G + G.transpose()), Eigen::EigenvaluesOnly);
  return eig.eigenvalues()(0);
}

double PeGramian::lambda_min() const { return lambda_min_sym(gramian()); }

}  // namespace flexsim
