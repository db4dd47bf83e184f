#include "flexsim/control.hpp"

#include <stdexcept>

namespace flexsim {

ControllerKind parse_controller(const std::string& name) {
  if (name == "slpc") return ControllerKind::Slpc;
  if (name == "slpc-adaptive") return ControllerKind::SlpcAdaptive;
  if (name == "ptc") return ControllerKind::Ptc;
  if (name == "pd") return ControllerKind::Pd;
  throw std::invalid_argument("unknown controller '" + name + "'");
}

std::string controller_name(ControllerKind k) {
  switch (k) {
    case ControllerKind::Slpc: return "slpc";
    case ControllerKind::SlpcAdaptive: return "slpc-adaptive";
    case ControllerKind::Ptc: return "ptc";
    case ControllerKind::Pd: return "pd";
  }
  return "";
}

Wrench slpc_nominal(const Mat6& M, const Vec6& Hc, const Twist& Vd, const Vec6& Vdot_d, const Twist& V, const Mat6& K) {
  return M * Vdot_d + Hc + K * (M * (Vd - V));
}

Wrench slpc_nominal(const LinkModel& link, const LinkMotion& x, const Vec3& g, const Twist& Vd, const Vec6& Vdot_d,
                    const Mat6& K) {
  return slpc_nominal(inertia_matrix(link, link.truth), bias_Hc(link, x, g), Vd, Vdot_d, x.V, K);
}

Wrench slpc_adaptive(const LinkModel& link, const DynParams& s_hat, const LinkMotion& x, const Vec3& g,
                     const Twist& Vd, const Vec6& Vdot_d, const Mat6& K) {
  return slpc_nominal(inertia_matrix(link, s_hat), bias_Hc(link, s_hat, x, g), Vd, Vdot_d, x.V, K);
}

Wrench ptc(const Twist& Vd, const Twist& V, const Mat6& K) { return K * (Vd - V); }

VecX pd_joint(const VecX& q_d, const VecX& q, const VecX& qd_d, const VecX& qd, const VecX& Kp, const VecX& Kd) {
  return Kp.cwiseProduct(q_d - q) + Kd.cwiseProduct(qd_d - qd);
}

VecX saturate(const VecX& x, double limit) { return x.cwiseMax(-limit).cwiseMin(limit); }

void actuation_wrenches(const Chain& chain, const ChainState& s, Actuation& act) {
  const int nl = chain.n_links();
  act.W_base.assign(nl, Wrench::Zero());
  act.W_tip.assign(nl, Wrench::Zero());
  for (int j = 0; j < static_cast<int>(chain.joints.size()); ++j) {
    const JointGeometry g = joint_geometry(chain, s, j);
    const auto axes = motor_axes(chain.joints[j], g);
    Vec3 tau = Vec3::Zero();
    for (size_t m = 0; m < axes.size(); ++m) tau += axes[m] * act.torques[j][m];
    act.W_base[j].head<3>() += tau;
    const int p = chain.joints[j].parent;
    if (p >= 0) act.W_tip[p].head<3>() += g.R_pk * tau;
  }
}

Actuation wrench_to_actuation(const Chain& chain, const ChainState& s, const std::vector<Wrench>& desired,
                              double limit) {
  const int nj = static_cast<int>(chain.joints.size());
  Actuation act;
  act.torques.resize(nj);
  std::vector<Vec3> tip_torque(chain.n_links(), Vec3::Zero());
  for (int j = nj - 1; j >= 0; --j) {
    const JointGeometry g = joint_geometry(chain, s, j);
    const auto axes = motor_axes(chain.joints[j], g);
    MatX A(3, axes.size());
    for (size_t m = 0; m < axes.size(); ++m) A.col(m) = axes[m];
    const Vec3 target = ang(desired[j]) + tip_torque[j];
    VecX tau = VecX::Zero(axes.size());
    if (!axes.empty()) {
      Eigen::ColPivHouseholderQR<MatX> qr(A);
      if (qr.rank() < static_cast<int>(axes.size())) throw std::runtime_error("rank-deficient actuation map");
      tau = saturate(VecX(qr.solve(target)), limit);
    }
    act.torques[j] = tau;
    const int p = chain.joints[j].parent;
    if (p >= 0) tip_torque[p] += g.R_pk * (A * tau);
  }
  actuation_wrenches(chain, s, act);
  act.residual.resize(chain.n_links());
  for (int i = 0; i < chain.n_links(); ++i) {
    act.residual[i] = desired[i] - endpoint_wrench_map(chain.links[i], act.W_base[i], act.W_tip[i], s.links[i].q);
  }
  return act;
}

}  // namespace flexsim
