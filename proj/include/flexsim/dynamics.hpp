#pragma once

#include <array>

#include "flexsim/link.hpp"

namespace flexsim {

using Vec5 = Eigen::Matrix<double, 5, 1>;

// Reduced uncertain parameters of one link.
struct DynParams {
  double rhoA = 0.0;
  double Ib22 = 0.0;
  double Ib33 = 0.0;
  double EIy = 0.0;
  double EIz = 0.0;

  Vec5 vec() const;
  static DynParams from_vec(const Vec5& s);
};

struct LinkModel {
  LinkParams params;
  ModalBasis basis;
  MassProperties mp;
  CrossSectionStiffness stiffness;
  DynParams truth;
  // Line-integral inertia per unit rhoA.
  Mat3 unit_inertia = Mat3::Zero();
  Vec3 unit_first_moment = Vec3::Zero();

  int n() const { return basis.size(); }
};

LinkModel make_link_model(const LinkParams& params, ModeCounts counts);

// Rigid motion and deformation of one link at one instant.
struct LinkMotion {
  Mat3 R = Mat3::Identity();
  Twist V = Twist::Zero();
  VecX q;
  VecX qd;
};

using NodeField = std::array<Vec3, kQuadNodes>;

Mat6 inertia_matrix(const LinkModel& link);
Mat6 inertia_matrix(const LinkModel& link, const DynParams& s);

// g is the vector that appears in the equations, i.e. minus the
// gravitational acceleration.
Vec6 bias_Hc(const LinkModel& link, const DynParams& s, const LinkMotion& x, const Vec3& g);
Vec6 bias_Hc(const LinkModel& link, const LinkMotion& x, const Vec3& g);
Vec6 bias_H(const LinkModel& link, const LinkMotion& x, const Vec3& g);

// vxidot sampled at the quadrature nodes.
Vec6 distributed_inertia_D(const LinkModel& link, const VecX& q, const NodeField& vxidot);

// Elastic acceleration field implied by the strain-rate PDE.
NodeField substituted_vxidot(const LinkModel& link, const LinkMotion& x);

Wrench endpoint_wrench_map(const LinkModel& link, const Wrench& W_base, const Wrench& W_tip, const VecX& q);

// Modal accelerations of the strain-rate PDE; boundary loads enter as modal forces.
VecX strain_pde_modal_rhs(const LinkModel& link, const LinkMotion& x, const Vec3& omega_dot = Vec3::Zero(),
                          const VecX& modal_force = VecX());

// Tip twist X(-r_b(c)) V + (0; rdot_xi(c) + w x r_xi(c)).
Twist tip_twist(const LinkModel& link, const LinkMotion& x);

// Tip twist referred to the deformed tip point, rigid part only.
Twist tip_rigid_twist(const LinkModel& link, const LinkMotion& x);

// Generalized equations A [Vdot; qdd] = b for one link, before joint forces.
struct LinkEquations {
  MatX A;
  VecX b;
};

LinkEquations assemble_link(const LinkModel& link, const LinkMotion& x, const Vec3& g, const Wrench& W_applied,
                            const Mat6& extra_inertia = Mat6::Zero());

// Field quantities at the quadrature nodes.
struct NodeKinematics {
  NodeField r_b, r_xi, r_ib, rdot_xi, v_xi, v_b, v_ib, r2, r4;
};
NodeKinematics node_kinematics(const LinkModel& link, const LinkMotion& x);

// Regressor of M Vdot + H_c in the reduced parameters, plus the known offset.
struct RegressorV {
  Eigen::Matrix<double, 6, 5> Y;
  Vec6 y0;
};
RegressorV regressor_V(const LinkModel& link, const LinkMotion& x, const Twist& Vdot, const Vec3& g);

// Stiffness regressor of the tip strain channel; columns (EIy, EIz).
Eigen::Matrix<double, 3, 2> regressor_xi(const LinkModel& link, const VecX& q);

}  // namespace flexsim
