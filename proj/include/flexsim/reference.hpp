#pragma once

#include <deque>
#include <vector>

#include "flexsim/chain.hpp"

namespace flexsim {

struct TrajectorySpec {
  double r_d = 0.5;
  double omega_d = 1.0;
  double tau_ramp = 1.5;
  double tau_blend = 2.0;
  double t_f = 25.0;
  double L = 2.2;
  // Initial absolute angles theta_1y, theta_1z, theta_2z.
  double theta1y0 = 0.0;
  double theta1z0 = 0.0;
  double theta2z0 = 0.0;
};

struct EndpointSample {
  Vec3 p = Vec3::Zero();
  Vec3 pdot = Vec3::Zero();
};

// Circle in the (y, z) plane around the straight-arm tip.
EndpointSample endpoint_reference(const TrajectorySpec& spec, double t);

struct Deflection {
  Vec3 delta = Vec3::Zero();
  Vec3 delta_dot = Vec3::Zero();
};

Deflection deflection_estimate(const Chain& chain, const ChainState& s);

// Absolute angles (theta_1y, theta_1z, theta_2z) and rates.
struct AngleReference {
  Vec3 q = Vec3::Zero();
  Vec3 qd = Vec3::Zero();
};

// Closed-form small-angle inverse kinematics on p_d - delta.
AngleReference corrected_joint_reference(const TrajectorySpec& spec, const Deflection& d, double t);

// Free joint coordinates in joint order and sequence order.
VecX free_coordinates(const Chain& chain, const ChainState& s);
// Rates of the free coordinates from the current body twists.
VecX free_coordinate_rates(const Chain& chain, const ChainState& s);

// Maps absolute (theta_1y, theta_1z, theta_2z) onto the free coordinates of the two-link chain.
VecX scenario_to_free(const Chain& chain, const Vec3& absolute);
Vec3 free_to_scenario(const Chain& chain, const VecX& free);
// Per-joint angle triples with the constrained angles at zero.
std::vector<Vec3> joint_angles_from_free(const Chain& chain, const VecX& free);

// Body twists from desired free-coordinate rates, propagated through the
// actual joint geometry so they satisfy the joint constraints.
// Without the parent tip deformation rate, the result is the reference part used for the feedforward rate.
std::vector<Twist> desired_twists(const Chain& chain, const ChainState& s, const VecX& free_rates,
                                  bool include_deformation_rate = true);

// Desired twist derivatives from the sample history (3-point stencil).
class TwistRateEstimator {
 public:
  explicit TwistRateEstimator(double dt) : dt_(dt) {}
  std::vector<Vec6> push(const std::vector<Twist>& Vd);
  void reset() { hist_.clear(); }

 private:
  double dt_;
  std::deque<std::vector<Twist>> hist_;
};

// Damped least squares q_dot = J^T (J J^T + lambda^2 I)^-1 x_dot.
VecX damped_pinv_solve(const MatX& J, const VecX& xdot, double lambda, bool* near_singular = nullptr);

// Tip (y, z) Jacobian of the rigid chain with respect to the free coordinates.
MatX rigid_tip_jacobian(const Chain& chain, const VecX& free);

// General-mode joint rates from the endpoint velocity through the damped pseudoinverse.
VecX general_joint_rates(const Chain& chain, const VecX& free_d, const Vec3& pdot_corr, double lambda = 1e-6);

}  // namespace flexsim
