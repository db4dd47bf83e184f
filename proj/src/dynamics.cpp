#include "flexsim/dynamics.hpp"

#include <stdexcept>

namespace flexsim {

Vec5 DynParams::vec() const {
  Vec5 s;
  s << rhoA, Ib22, Ib33, EIy, EIz;
  return s;
}

DynParams DynParams::from_vec(const Vec5& s) { return {s[0], s[1], s[2], s[3], s[4]}; }

LinkModel make_link_model(const LinkParams& params, ModeCounts counts) {
  if (!(params.rho > 0 && params.A > 0 && params.E > 0 && params.l() > 0)) {
    throw std::invalid_argument("link parameters must be positive");
  }
  LinkModel m;
  m.params = params;
  m.basis = ModalBasis(params, params.rigid ? ModeCounts{0, 0} : counts);
  m.mp = mass_properties(params, m.basis);
  m.stiffness = stiffness_matrices(params);
  m.unit_inertia = m.mp.I_b / params.rhoA();
  m.unit_first_moment = m.mp.first_moment / params.rhoA();
  m.truth = {params.rhoA(), m.mp.I_b(1, 1), m.mp.I_b(2, 2), params.E * params.Iy, params.E * params.Iz};
  return m;
}

namespace {

Mat3 inertia_block(const LinkModel& link, const DynParams& s) {
  Mat3 I = s.rhoA * link.unit_inertia;
  I(1, 1) = s.Ib22;
  I(2, 2) = s.Ib33;
  I(0, 0) += link.params.torsional_inertia();
  return I;
}

Mat3 Iv2_of(const DynParams& s) { return Vec3(0.0, s.EIz, s.EIy).asDiagonal(); }

}  // namespace

Mat6 inertia_matrix(const LinkModel& link, const DynParams& s) {
  Mat6 M = Mat6::Zero();
  const Mat3 C = s.rhoA * skew(link.unit_first_moment);
  M.topLeftCorner<3, 3>() = inertia_block(link, s);
  M.topRightCorner<3, 3>() = C;
  M.bottomLeftCorner<3, 3>() = -C;
  M.bottomRightCorner<3, 3>() = s.rhoA * link.params.l() * Mat3::Identity();
  return M;
}

Mat6 inertia_matrix(const LinkModel& link) {
  const Mat6 M = inertia_matrix(link, link.truth);
  Eigen::SelfAdjointEigenSolver<Mat6> eig(M);
  if (eig.eigenvalues().minCoeff() <= 0.0) throw std::runtime_error("inertia matrix is not positive definite");
  return M;
}

NodeKinematics node_kinematics(const LinkModel& link, const LinkMotion& x) {
  NodeKinematics k;
  const Vec3 w = ang(x.V);
  const Vec3 v = lin(x.V);
  const int n = link.n();
  for (int j = 0; j < kQuadNodes; ++j) {
    k.r_b[j] = reference_point(link.params, link.basis.quad().xi[j]);
    if (n > 0) {
      k.r_xi[j] = link.basis.node_shapes(j, 0) * x.q;
      k.rdot_xi[j] = link.basis.node_shapes(j, 0) * x.qd;
      k.r2[j] = link.basis.node_shapes(j, 2) * x.q;
      k.r4[j] = link.basis.node_shapes(j, 4) * x.q;
    } else {
      k.r_xi[j] = k.rdot_xi[j] = k.r2[j] = k.r4[j] = Vec3::Zero();
    }
    k.r_ib[j] = k.r_b[j] + k.r_xi[j];
    k.v_xi[j] = k.rdot_xi[j] + w.cross(k.r_xi[j]);
    k.v_b[j] = v + w.cross(k.r_b[j]);
    k.v_ib[j] = k.v_xi[j] + k.v_b[j];
  }
  return k;
}

Vec6 bias_Hc(const LinkModel& link, const DynParams& s, const LinkMotion& x, const Vec3& g) {
  const NodeKinematics k = node_kinematics(link, x);
  const Vec3 w = ang(x.V);
  const Vec3 gb = x.R.transpose() * g;
  const Mat3 Iv1 = link.stiffness.Iv1;
  const Mat3 Iv2 = Iv2_of(s);
  const auto& quad = link.basis.quad();
  Vec3 rot = Vec3::Zero(), tr = Vec3::Zero();
  for (int j = 0; j < kQuadNodes; ++j) {
    const double wj = quad.w[j];
    const Vec3 elastic = Iv1 * k.r2[j] - Iv2 * k.r4[j];
    const Vec3 inertial = s.rhoA * (w.cross(k.v_b[j]) + gb);
    rot += wj * k.r_ib[j].cross(inertial + elastic);
    tr += wj * (s.rhoA * w.cross(k.v_b[j]) + elastic);
  }
  tr += s.rhoA * link.params.l() * gb;
  return stack(rot, tr);
}

Vec6 bias_Hc(const LinkModel& link, const LinkMotion& x, const Vec3& g) { return bias_Hc(link, link.truth, x, g); }

Vec6 bias_H(const LinkModel& link, const LinkMotion& x, const Vec3& g) {
  const NodeKinematics k = node_kinematics(link, x);
  const Vec3 w = ang(x.V);
  const Vec3 gb = x.R.transpose() * g;
  const double rhoA = link.params.rhoA();
  const auto& quad = link.basis.quad();
  Vec3 rot = Vec3::Zero(), tr = Vec3::Zero();
  for (int j = 0; j < kQuadNodes; ++j) {
    const Vec3 cor = w.cross(k.v_ib[j]);
    rot += quad.w[j] * k.r_ib[j].cross(cor + gb);
    tr += quad.w[j] * cor;
  }
  return stack(rhoA * rot, rhoA * tr + link.params.mass() * gb);
}

Vec6 distributed_inertia_D(const LinkModel& link, const VecX& q, const NodeField& vxidot) {
  const auto& quad = link.basis.quad();
  Vec3 rot = Vec3::Zero(), tr = Vec3::Zero();
  for (int j = 0; j < kQuadNodes; ++j) {
    Vec3 r_ib = reference_point(link.params, quad.xi[j]);
    if (link.n() > 0) r_ib += link.basis.node_shapes(j, 0) * q;
    rot += quad.w[j] * r_ib.cross(vxidot[j]);
    tr += quad.w[j] * vxidot[j];
  }
  const double rhoA = link.params.rhoA();
  return stack(rhoA * rot, rhoA * tr);
}

NodeField substituted_vxidot(const LinkModel& link, const LinkMotion& x) {
  const NodeKinematics k = node_kinematics(link, x);
  const Vec3 w = ang(x.V);
  const double rhoA = link.params.rhoA();
  NodeField out;
  for (int j = 0; j < kQuadNodes; ++j) {
    out[j] = -w.cross(k.v_xi[j]) -
             (link.stiffness.Iv2 * k.r4[j] - link.stiffness.Iv1 * k.r2[j]) / rhoA;
  }
  return out;
}

Wrench endpoint_wrench_map(const LinkModel& link, const Wrench& W_base, const Wrench& W_tip, const VecX& q) {
  Vec3 ra = Vec3::Zero(), rc = Vec3::Zero();
  if (link.n() > 0) {
    ra = link.basis.shapes(link.params.a, 0) * q;
    rc = link.basis.shapes(link.params.c, 0) * q;
  }
  const Vec3 FB = lin(W_base), FT = lin(W_tip);
  const Vec3 rot = ang(W_base) - ang(W_tip) - ra.cross(FB) + rc.cross(FT);
  return stack(rot, FB - FT);
}

VecX strain_pde_modal_rhs(const LinkModel& link, const LinkMotion& x, const Vec3& omega_dot,
                          const VecX& modal_force) {
  const int n = link.n();
  VecX qdd = VecX::Zero(n);
  if (n == 0) return qdd;
  const NodeKinematics k = node_kinematics(link, x);
  const Vec3 w = ang(x.V);
  const auto& quad = link.basis.quad();
  const double rhoA = link.params.rhoA();
  for (int j = 0; j < kQuadNodes; ++j) {
    // Projected vxidot target minus the parts of vxidot not carried by qdd.
    const Vec3 f = -w.cross(k.v_xi[j]) - w.cross(k.rdot_xi[j]) + k.r_xi[j].cross(omega_dot);
    qdd += rhoA * quad.w[j] * link.basis.node_shapes(j, 0).transpose() * f;
  }
  qdd -= link.basis.omega_sq().cwiseProduct(x.q);
  if (modal_force.size() == n) qdd += modal_force;
  return qdd;
}

Twist tip_twist(const LinkModel& link, const LinkMotion& x) {
  const double c = link.params.c;
  const Vec3 rb = reference_point(link.params, c);
  Twist out = point_shift(-rb) * x.V;
  if (link.n() > 0) {
    const MatX S = link.basis.shapes(c, 0);
    const Vec3 rxi = S * x.q;
    out.tail<3>() += S * x.qd + ang(x.V).cross(rxi);
  }
  return out;
}

Twist tip_rigid_twist(const LinkModel& link, const LinkMotion& x) {
  Vec3 r = reference_point(link.params, link.params.c);
  if (link.n() > 0) r += link.basis.shapes(link.params.c, 0) * x.q;
  return point_shift(-r) * x.V;
}

LinkEquations assemble_link(const LinkModel& link, const LinkMotion& x, const Vec3& g, const Wrench& W_applied,
                            const Mat6& extra_inertia) {
  const int n = link.n();
  const NodeKinematics k = node_kinematics(link, x);
  const Vec3 w = ang(x.V);
  const Vec3 gb = x.R.transpose() * g;
  const double rhoA = link.params.rhoA();
  const auto& quad = link.basis.quad();

  LinkEquations eq;
  eq.A = MatX::Zero(6 + n, 6 + n);
  eq.b = VecX::Zero(6 + n);
  eq.A.topLeftCorner<6, 6>() = inertia_matrix(link, link.truth) + extra_inertia;
  eq.b.head<6>() = W_applied - bias_H(link, x, g);
  if (n == 0) return eq;

  eq.A.bottomRightCorner(n, n).setIdentity();
  VecX bq = -link.basis.omega_sq().cwiseProduct(x.q);
  for (int j = 0; j < kQuadNodes; ++j) {
    const double c = rhoA * quad.w[j];
    const MatX& Phi = link.basis.node_shapes(j, 0);
    const Mat3 Rib = skew(k.r_ib[j]);
    const Mat3 Rxi = skew(k.r_xi[j]);
    // vxidot = Phi qdd - r_xi~ wdot + w~ Phi qd
    eq.A.block<3, 3>(0, 0) -= c * Rib * Rxi;
    eq.A.block<3, 3>(3, 0) -= c * Rxi;
    eq.A.block(0, 6, 3, n) += c * Rib * Phi;
    eq.A.block(3, 6, 3, n) += c * Phi;
    const Vec3 wphid = w.cross(k.rdot_xi[j]);
    eq.b.segment<3>(0) -= c * k.r_ib[j].cross(wphid);
    eq.b.segment<3>(3) -= c * wphid;
    // Modal row: rhoA int Phi^T (vdot - r_ib~ wdot + vxidot + w~ v_ib + R^T g)
    eq.A.block(6, 0, n, 3) -= c * Phi.transpose() * Rib;
    eq.A.block(6, 3, n, 3) += c * Phi.transpose();
    bq -= c * Phi.transpose() * (wphid + w.cross(k.v_ib[j]) + gb);
  }
  eq.b.tail(n) = bq;
  return eq;
}

RegressorV regressor_V(const LinkModel& link, const LinkMotion& x, const Twist& Vdot, const Vec3& g) {
  const NodeKinematics k = node_kinematics(link, x);
  const Vec3 w = ang(x.V);
  const Vec3 wd = ang(Vdot), vd = lin(Vdot);
  const Vec3 gb = x.R.transpose() * g;
  const double l = link.params.l();
  const auto& quad = link.basis.quad();

  RegressorV out;
  out.Y.setZero();
  out.y0.setZero();

  Mat3 Iu = link.unit_inertia;
  Iu(1, 1) = 0.0;
  Iu(2, 2) = 0.0;
  const Mat3 Cu = skew(link.unit_first_moment);
  Vec3 rot = Iu * wd + Cu * vd;
  Vec3 tr = -Cu * wd + l * (vd + gb);
  const double EA = link.stiffness.Iv1(0, 0);
  Vec3 rot_y = Vec3::Zero(), tr_y = Vec3::Zero(), rot_z = Vec3::Zero(), tr_z = Vec3::Zero();
  Vec3 rot0 = Vec3::Zero(), tr0 = Vec3::Zero();
  for (int j = 0; j < kQuadNodes; ++j) {
    const double wj = quad.w[j];
    const Vec3 cor = w.cross(k.v_b[j]);
    rot += wj * k.r_ib[j].cross(cor + gb);
    tr += wj * cor;
    const Vec3 ey = Vec3::UnitY() * k.r4[j].y();
    const Vec3 ez = Vec3::UnitZ() * k.r4[j].z();
    const Vec3 ex = Vec3::UnitX() * k.r2[j].x();
    rot_y -= wj * k.r_ib[j].cross(ez);
    tr_y -= wj * ez;
    rot_z -= wj * k.r_ib[j].cross(ey);
    tr_z -= wj * ey;
    rot0 += wj * EA * k.r_ib[j].cross(ex);
    tr0 += wj * EA * ex;
  }
  out.Y.col(0) = stack(rot, tr);
  out.Y(1, 1) = wd.y();
  out.Y(2, 2) = wd.z();
  out.Y.col(3) = stack(rot_y, tr_y);
  out.Y.col(4) = stack(rot_z, tr_z);
  rot0.x() += link.params.torsional_inertia() * wd.x();
  out.y0 = stack(rot0, tr0);
  return out;
}

Eigen::Matrix<double, 3, 2> regressor_xi(const LinkModel& link, const VecX& q) {
  Eigen::Matrix<double, 3, 2> Y = Eigen::Matrix<double, 3, 2>::Zero();
  if (link.n() == 0) return Y;
  const Vec3 r4 = link.basis.shapes(link.params.c, 4) * q;
  Y(2, 0) = r4.z();
  Y(1, 1) = r4.y();
  return Y;
}

}  // namespace flexsim
