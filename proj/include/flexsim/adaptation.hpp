#pragma once

#include <deque>

#include "flexsim/chain.hpp"

namespace flexsim {

using Mat5 = Eigen::Matrix<double, 5, 5>;
using Mat95 = Eigen::Matrix<double, 9, 5>;
using Mat32 = Eigen::Matrix<double, 3, 2>;
using Mat65 = Eigen::Matrix<double, 6, 5>;

// Elementwise: 0 if (s >= s_h and e > 0) or (s <= s_l and e < 0), else e.
VecX project(const VecX& s, const VecX& s_l, const VecX& s_h, const VecX& e);

struct ParamBounds {
  Vec5 lo;
  Vec5 hi;
};

struct AdaptState {
  Vec5 s_hat;
  ParamBounds bounds;
  Vec5 Lambda;  // diagonal gains
};

// rhoA * int Phi^T (vdot - r_ib~ wdot + w~ Phi qd + w~ v_ib + R^T g)
VecX modal_inertial_load(const LinkModel& link, const LinkMotion& x, const Twist& Vdot, const Vec3& g);

// Tip strain channel reconstructed from measured modal accelerations and loads.
// Equals Y_xi s_true along plant trajectories.
Vec3 measured_strain_channel(const LinkModel& link, const LinkMotion& x, const Twist& Vdot, const VecX& qdd,
                             const VecX& modal_joint_force, const Vec3& g);

struct Residuals {
  Vec6 eps_V;
  Vec3 eps_xi;
};

// eps_V = lhs_V - (Y_V s_hat + y0), eps_xi = z_xi - Y_xi s_xi_hat
Residuals residuals(const Mat65& Y_V, const Vec6& y0, const Vec6& lhs_V, const Mat32& Y_xi, const Vec3& z_xi,
                    const Vec5& s_hat);

// Y_V^T eps_V + [0; Y_xi^T eps_xi]
Vec5 lumped_gamma(const Mat65& Y_V, const Vec6& eps_V, const Mat32& Y_xi, const Vec3& eps_xi);

Mat95 stacked_regressor(const Mat65& Y_V, const Mat32& Y_xi);

// s_hat += dt * Proj(Lambda Gamma); the result is kept inside the bounds.
AdaptState update(const AdaptState& a, const Vec5& Gamma, double dt);

// Same step, scaled down to dt_eff = min(dt, 1 / lambda_max(Lambda^1/2 Ybar^T Ybar Lambda^1/2)) so that
// e_s^T Lambda^-1 e_s cannot grow under exact residuals.
AdaptState update(const AdaptState& a, const Vec5& Gamma, const Mat95& Ybar, double dt);
double stable_adaptation_step(const Vec5& Lambda, const Mat95& Ybar, double dt);

// Trailing-window integral of Ybar^T Ybar by the trapezoidal rule.
class PeGramian {
 public:
  PeGramian(double window, double dt);
  void push(const Mat95& Ybar);
  bool ready() const { return static_cast<int>(hist_.size()) > n_window_; }
  Mat5 gramian() const;
  double lambda_min() const;

 private:
  double dt_;
  int n_window_;
  std::deque<Mat5> hist_;
  Mat5 sum_ = Mat5::Zero();
  long pushes_ = 0;
};

double lambda_min_sym(const Mat5& G);

}  // namespace flexsim
