#include "flexsim/analysis.hpp"

#include <cmath>
#include <random>

namespace flexsim {

LyapunovValue lyapunov(const Twist& e, const Mat6& M, const Mat6& K) {
  LyapunovValue out;
  out.nu = e.dot(M * e);
  const Eigen::SelfAdjointEigenSolver<Mat6> eM(M, Eigen::EigenvaluesOnly);
  const Eigen::EigenSolver<Mat6> eKM(K * M, false);
  const double lam_km = eKM.eigenvalues().real().minCoeff();
  out.alpha = 2.0 * std::max(lam_km, 0.0) / eM.eigenvalues().maxCoeff();
  return out;
}

double augmented_lyapunov(double nu, const Vec5& e_s, const Vec5& Lambda) {
  return nu + e_s.dot(e_s.cwiseQuotient(Lambda));
}

PowerResiduals power_residuals(const Chain& chain, const ChainState& s, const Evaluation& actual,
                               const Evaluation& desired, const std::vector<Twist>& e_V) {
  PowerResiduals out;
  for (int i = 0; i < chain.n_links(); ++i) {
    out.p.push_back(2.0 * e_V[i].dot(desired.W_J[i] - actual.W_J[i]));
    out.sum += out.p.back();
    out.max_abs = std::max(out.max_abs, std::abs(out.p.back()));
  }
  for (int j = 0; j < static_cast<int>(chain.joints.size()); ++j) {
    const Wrench dB = desired.W_base_view[j] - actual.W_base_view[j];
    const Wrench dT = desired.W_tip_view[j] - actual.W_tip_view[j];
    out.p_base.push_back(-2.0 * e_V[j].dot(dB));
    const int p = chain.joints[j].parent;
    if (p >= 0) {
      const Vec3 r_tip = joint_geometry(chain, s, j).r_tip;
      out.p_tip.push_back(2.0 * (point_shift(-r_tip) * e_V[p]).dot(dT));
    } else {
      out.p_tip.push_back(0.0);
    }
  }
  return out;
}

EnvelopeReport decay_envelope_check(const std::vector<double>& t, const std::vector<double>& V, double rate,
                                    double drive, double t0, double slack) {
  EnvelopeReport rep;
  size_t i0 = 0;
  while (i0 < t.size() && t[i0] < t0) ++i0;
  if (i0 >= t.size()) return rep;
  const double V0 = V[i0];
  for (size_t i = i0; i < t.size(); ++i) {
    const double tau = t[i] - t[i0];
    const double decay = std::exp(-rate * tau);
    const double forced = rate > 0.0 ? drive * -std::expm1(-rate * tau) / rate : drive * tau;
    const double bound = V0 * decay + forced;
    const double allowed = bound * (1.0 + slack) + 1e-15;
    if (bound > 0) rep.worst_ratio = std::max(rep.worst_ratio, V[i] / bound);
    if (V[i] > allowed) {
      if (rep.violations == 0) rep.first_violation_t = t[i];
      ++rep.violations;
    }
  }
  return rep;
}

BoundConstants adaptive_bound_constants(const LinkModel& link, const Mat6& K, const Vec5& Lambda,
                                        double Vdot_d_bound, const ParamBounds& bounds, const Vec3& g,
                                        const OperatingEnvelope& env, double epsilon) {
  BoundConstants bc;
  const Vec5 zero = Vec5::Zero();
  const Mat6 M0 = inertia_matrix(link, DynParams::from_vec(zero));
  for (int k = 0; k < 5; ++k) {
    const Mat6 dM = inertia_matrix(link, DynParams::from_vec(Vec5::Unit(k))) - M0;
    bc.c_M = std::max(bc.c_M, Eigen::JacobiSVD<Mat6>(dM).singularValues()(0));
  }
  std::mt19937 rng(env.seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int n = 0; n < env.samples; ++n) {
    LinkMotion x;
    x.R = exp_so3(Vec3(u(rng), u(rng), u(rng)));
    x.V = stack(env.omega_max * Vec3(u(rng), u(rng), u(rng)), env.v_max * Vec3(u(rng), u(rng), u(rng)));
    x.q = VecX::NullaryExpr(link.n(), [&]() { return env.q_max * u(rng); });
    x.qd = VecX::Zero(link.n());
    const Vec6 H0 = bias_Hc(link, DynParams::from_vec(zero), x, g);
    for (int k = 0; k < 5; ++k) {
      const Vec6 dH = bias_Hc(link, DynParams::from_vec(Vec5::Unit(k)), x, g) - H0;
      bc.c_H = std::max(bc.c_H, dH.norm());
    }
  }
  const Mat6 M = inertia_matrix(link);
  const double lam_min_M = Eigen::SelfAdjointEigenSolver<Mat6>(M, Eigen::EigenvaluesOnly).eigenvalues()(0);
  const double normK = Eigen::JacobiSVD<Mat6>(K).singularValues()(0);
  const double sup_es2 = (bounds.hi - bounds.lo).squaredNorm();
  const double a = 2.0 * normK * bc.c_M + bc.c_M * Vdot_d_bound + bc.c_H;
  bc.c_Q = a * a * Lambda.maxCoeff() / (2.0 * epsilon * lam_min_M) * sup_es2;
  return bc;
}

double fitted_decay_rate(const std::vector<double>& t, const std::vector<double>& V, double t_begin, double t_end,
                         double floor) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (size_t i = 0; i < t.size(); ++i) {
    if (t[i] < t_begin || t[i] > t_end || !(V[i] > floor)) continue;
    const double y = std::log(V[i]);
    sx += t[i];
    sy += y;
    sxx += t[i] * t[i];
    sxy += t[i] * y;
    ++n;
  }
  if (n < 2) return 0.0;
  return -(n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace flexsim
