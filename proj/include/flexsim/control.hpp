#pragma once

#include <string>
#include <vector>

#include "flexsim/chain.hpp"

namespace flexsim {

enum class ControllerKind { Slpc, SlpcAdaptive, Ptc, Pd };

ControllerKind parse_controller(const std::string& name);
std::string controller_name(ControllerKind k);

struct GainSet {
  std::vector<Mat6> K;  // per link
  VecX Kp;              // per free coordinate
  VecX Kd;
  double saturation = 100.0;
};

// W = M Vdot_d + H_c + K M e_V
Wrench slpc_nominal(const Mat6& M, const Vec6& Hc, const Twist& Vd, const Vec6& Vdot_d, const Twist& V, const Mat6& K);
Wrench slpc_nominal(const LinkModel& link, const LinkMotion& x, const Vec3& g, const Twist& Vd, const Vec6& Vdot_d,
                    const Mat6& K);

// Same law with M and H_c evaluated at the estimate s_hat.
Wrench slpc_adaptive(const LinkModel& link, const DynParams& s_hat, const LinkMotion& x, const Vec3& g,
                     const Twist& Vd, const Vec6& Vdot_d, const Mat6& K);

Wrench ptc(const Twist& Vd, const Twist& V, const Mat6& K);

VecX pd_joint(const VecX& q_d, const VecX& q, const VecX& qd_d, const VecX& qd, const VecX& Kp, const VecX& Kd);

VecX saturate(const VecX& x, double limit);
inline Vec6 saturate(const Vec6& x, double limit) { return x.cwiseMax(-limit).cwiseMin(limit); }

struct Actuation {
  std::vector<VecX> torques;       // per joint, per free angle
  std::vector<Wrench> W_base;      // endpoint wrenches in each link frame
  std::vector<Wrench> W_tip;
  std::vector<Wrench> residual;    // desired minus realized
};

// Least-squares inverse of the endpoint wrench map on the actuated axes, tip to root.
Actuation wrench_to_actuation(const Chain& chain, const ChainState& s, const std::vector<Wrench>& desired,
                              double limit);

// Endpoint wrenches produced by given motor torques.
void actuation_wrenches(const Chain& chain, const ChainState& s, Actuation& act);

}  // namespace flexsim
