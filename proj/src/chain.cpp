#include "flexsim/chain.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace flexsim {

int JointSpec::n_free() const {
  int n = 0;
  for (bool f : free) n += f ? 1 : 0;
  return n;
}

JointSpec JointSpec::from_projection(int parent, const Mat3& P, const std::array<double, 3>& motor_inertia_by_axis) {
  JointSpec js;
  js.parent = parent;
  std::vector<int> free_axes, fixed_axes;
  for (int ax = 2; ax >= 0; --ax) (P(ax, ax) > 0.5 ? free_axes : fixed_axes).push_back(ax);
  int m = 0;
  for (int ax : free_axes) {
    js.sequence[m] = ax;
    js.free[m] = true;
    js.motor_inertia[m] = motor_inertia_by_axis[ax];
    ++m;
  }
  for (int ax : fixed_axes) {
    js.sequence[m] = ax;
    js.free[m] = false;
    js.motor_inertia[m] = 0.0;
    ++m;
  }
  return js;
}

Mat3 tait_bryan(const std::array<int, 3>& seq, const Vec3& angles) {
  return axis_rotation(seq[0], angles[0]) * axis_rotation(seq[1], angles[1]) * axis_rotation(seq[2], angles[2]);
}

Vec3 tait_bryan_angles(const std::array<int, 3>& seq, const Mat3& R) {
  const int i = seq[0], j = seq[1], k = seq[2];
  const bool even = (j == (i + 1) % 3);
  const double s = even ? 1.0 : -1.0;
  const double b = std::asin(std::clamp(s * R(i, k), -1.0, 1.0));
  const double a = std::atan2(-s * R(j, k), R(k, k));
  const double c = std::atan2(-s * R(i, j), R(i, i));
  return {a, b, c};
}

Mat3 euler_rate_map(const std::array<int, 3>& seq, const Vec3& angles) {
  const Mat3 Rj = axis_rotation(seq[1], angles[1]);
  const Mat3 Rk = axis_rotation(seq[2], angles[2]);
  Mat3 E;
  E.col(0) = Rk.transpose() * Rj.transpose() * Vec3::Unit(seq[0]);
  E.col(1) = Rk.transpose() * Vec3::Unit(seq[1]);
  E.col(2) = Vec3::Unit(seq[2]);
  return E;
}

ChainInputs zero_inputs(const Chain& chain) {
  ChainInputs in;
  for (const auto& j : chain.joints) in.joint_torques.push_back(VecX::Zero(j.n_free()));
  in.extra.assign(chain.links.size(), Wrench::Zero());
  return in;
}

JointGeometry joint_geometry(const Chain& chain, const ChainState& s, int j) {
  const JointSpec& spec = chain.joints[j];
  JointGeometry g;
  const Mat3 Rk = s.links[j].R();
  if (spec.parent >= 0) {
    const LinkModel& pl = chain.links[spec.parent];
    const LinkState& ps = s.links[spec.parent];
    g.R_parent = ps.R();
    g.r_tip = reference_point(pl.params, pl.params.c);
    g.Phi_tip = pl.basis.shapes(pl.params.c, 0);
    if (pl.n() > 0) g.r_tip += g.Phi_tip * ps.q;
    g.p_parent_tip = ps.p + g.R_parent * g.r_tip;
  }
  g.R_pk = g.R_parent.transpose() * Rk;
  g.angles = tait_bryan_angles(spec.sequence, g.R_pk);
  g.E = euler_rate_map(spec.sequence, g.angles);
  g.Einv = g.E.inverse();
  return g;
}

std::vector<Vec3> motor_axes(const JointSpec& spec, const JointGeometry& jg) {
  std::vector<Vec3> axes;
  for (int m = 0; m < 3; ++m) {
    if (spec.free[m]) axes.push_back(jg.E.col(m));
  }
  return axes;
}

namespace {

struct Layout {
  std::vector<int> off;
  int N = 0;
  std::vector<int> row_off;
  int m = 0;
};

Layout make_layout(const Chain& chain) {
  Layout L;
  for (const auto& l : chain.links) {
    L.off.push_back(L.N);
    L.N += 6 + l.n();
  }
  for (const auto& j : chain.joints) {
    L.row_off.push_back(L.m);
    L.m += j.n_rows();
  }
  return L;
}

// Selection rows acting on the child twist (omega; v).
MatX selection(const JointSpec& spec, const Mat3& Einv) {
  const int nr = spec.n_rows();
  MatX C = MatX::Zero(nr, 6);
  int r = 0;
  for (int m = 0; m < 3; ++m) {
    if (!spec.free[m]) C.block<1, 3>(r++, 0) = Einv.row(m);
  }
  C.block<3, 3>(r, 3).setIdentity();
  return C;
}

struct JointRows {
  MatX C;        // nr x 6
  MatX G_child;  // nr x 6
  MatX G_pV;     // nr x 6
  MatX G_pq;     // nr x n_parent
  VecX kappa;
  VecX pos_err;
};

JointRows joint_rows(const Chain& chain, const ChainState& s, int j, const JointGeometry& g) {
  const JointSpec& spec = chain.joints[j];
  JointRows jr;
  jr.C = selection(spec, g.Einv);
  jr.G_child = jr.C;
  const int nr = spec.n_rows();
  const int nc = spec.n_constrained_rot();
  const Mat3 Rt = g.R_pk.transpose();
  const Vec3 wk = ang(s.links[j].V);

  Vec3 wp = Vec3::Zero(), u = Vec3::Zero(), wphid = Vec3::Zero();
  if (spec.parent >= 0) {
    const LinkState& ps = s.links[spec.parent];
    const int np = chain.links[spec.parent].n();
    wp = ang(ps.V);
    u = lin(ps.V) + wp.cross(g.r_tip);
    if (np > 0) {
      const Vec3 tip_rate = g.Phi_tip * ps.qd;
      u += tip_rate;
      wphid = wp.cross(tip_rate);
    }
    Mat6 A = Mat6::Zero();
    A.topLeftCorner<3, 3>() = Rt;
    A.bottomRightCorner<3, 3>() = Rt;
    jr.G_pV = -jr.C * A * point_shift(-g.r_tip);
    jr.G_pq = MatX::Zero(nr, np);
    if (np > 0) {
      MatX T = MatX::Zero(6, np);
      T.bottomRows(3) = Rt * g.Phi_tip;
      jr.G_pq = -jr.C * T;
    }
  }

  jr.kappa = VecX::Zero(nr);
  const Vec3 w_rel = wk - Rt * wp;
  if (nc > 0) {
    const Vec3 rates = g.Einv * w_rel;
    const double h = 1e-6;
    Mat3 dEinv = Mat3::Zero();
    for (int a = 1; a < 3; ++a) {
      Vec3 ap = g.angles, am = g.angles;
      ap[a] += h;
      am[a] -= h;
      const Mat3 d = (euler_rate_map(spec.sequence, ap).inverse() - euler_rate_map(spec.sequence, am).inverse()) / (2 * h);
      dEinv += d * rates[a];
    }
    const Vec3 kr = dEinv * w_rel + g.Einv * wk.cross(Rt * wp);
    int r = 0;
    for (int m = 0; m < 3; ++m) {
      if (!spec.free[m]) jr.kappa[r++] = kr[m];
    }
  }
  const Vec3 Rdot_t_u = Rt * wp.cross(u) - wk.cross(Rt * u);
  jr.kappa.tail<3>() = -Rdot_t_u - Rt * wphid;

  jr.pos_err = VecX::Zero(nr);
  int r = 0;
  for (int m = 0; m < 3; ++m) {
    if (!spec.free[m]) jr.pos_err[r++] = g.angles[m];
  }
  const Mat3 Rk = s.links[j].R();
  jr.pos_err.tail<3>() = Rk.transpose() * (s.links[j].p - g.p_parent_tip);
  return jr;
}

MatX assemble_G(const Chain& chain, const ChainState& s, const Layout& L, std::vector<JointRows>* rows_out,
                std::vector<JointGeometry>* geo_out) {
  MatX G = MatX::Zero(L.m, L.N);
  for (int j = 0; j < static_cast<int>(chain.joints.size()); ++j) {
    const JointGeometry g = joint_geometry(chain, s, j);
    JointRows jr = joint_rows(chain, s, j, g);
    const int r0 = L.row_off[j];
    const int nr = chain.joints[j].n_rows();
    G.block(r0, L.off[j], nr, 6) = jr.G_child;
    const int p = chain.joints[j].parent;
    if (p >= 0) {
      G.block(r0, L.off[p], nr, 6) = jr.G_pV;
      if (jr.G_pq.cols() > 0) G.block(r0, L.off[p] + 6, nr, jr.G_pq.cols()) = jr.G_pq;
    }
    if (rows_out) rows_out->push_back(std::move(jr));
    if (geo_out) geo_out->push_back(g);
  }
  return G;
}

VecX pack_velocity(const Chain& chain, const ChainState& s, const Layout& L) {
  VecX x(L.N);
  for (int i = 0; i < chain.n_links(); ++i) {
    x.segment<6>(L.off[i]) = s.links[i].V;
    const int n = chain.links[i].n();
    if (n > 0) x.segment(L.off[i] + 6, n) = s.links[i].qd;
  }
  return x;
}

}  // namespace

std::vector<VecX> constraint_residuals(const Chain& chain, const ChainState& s) {
  const Layout L = make_layout(chain);
  const MatX G = assemble_G(chain, s, L, nullptr, nullptr);
  const VecX c = G * pack_velocity(chain, s, L);
  std::vector<VecX> out;
  for (int j = 0; j < static_cast<int>(chain.joints.size()); ++j) {
    out.push_back(c.segment(L.row_off[j], chain.joints[j].n_rows()));
  }
  return out;
}

Evaluation evaluate(const Chain& chain, const ChainState& s, const ChainInputs& in) {
  const Layout L = make_layout(chain);
  const int nl = chain.n_links();
  std::vector<JointRows> rows;
  std::vector<JointGeometry> geo;
  const MatX G = assemble_G(chain, s, L, &rows, &geo);

  Evaluation ev;
  ev.W_applied.assign(nl, Wrench::Zero());
  std::vector<Mat6> extra_inertia(nl, Mat6::Zero());
  for (int j = 0; j < static_cast<int>(chain.joints.size()); ++j) {
    const JointSpec& spec = chain.joints[j];
    const auto axes = motor_axes(spec, geo[j]);
    Vec3 torque = Vec3::Zero();
    int m_free = 0;
    for (int m = 0; m < 3; ++m) {
      if (!spec.free[m]) continue;
      const Vec3& a = axes[m_free];
      if (j < static_cast<int>(in.joint_torques.size()) && in.joint_torques[j].size() > m_free) {
        torque += a * in.joint_torques[j][m_free];
      }
      extra_inertia[j].topLeftCorner<3, 3>() += spec.motor_inertia[m] * a * a.transpose();
      ++m_free;
    }
    ev.W_applied[j].head<3>() += torque;
    if (spec.parent >= 0) ev.W_applied[spec.parent].head<3>() -= geo[j].R_pk * torque;
  }
  for (int i = 0; i < nl && i < static_cast<int>(in.extra.size()); ++i) ev.W_applied[i] += in.extra[i];

  // Per-link LU of the generalized mass.
  std::vector<Eigen::PartialPivLU<MatX>> lu;
  VecX Ainv_f = VecX::Zero(L.N);
  MatX Ainv_Gt = MatX::Zero(L.N, L.m);
  const MatX Gt = G.transpose();
  for (int i = 0; i < nl; ++i) {
    const LinkModel& lm = chain.links[i];
    const LinkEquations eq = assemble_link(lm, s.links[i].motion(), chain.g_eq, ev.W_applied[i], extra_inertia[i]);
    lu.emplace_back(eq.A);
    const int sz = 6 + lm.n();
    Ainv_f.segment(L.off[i], sz) = lu.back().solve(eq.b);
    Ainv_Gt.middleRows(L.off[i], sz) = lu.back().solve(Gt.middleRows(L.off[i], sz));
  }

  VecX gamma(L.m);
  const VecX c = G * pack_velocity(chain, s, L);
  const double wb = chain.baumgarte.omega, zeta = chain.baumgarte.zeta;
  for (int j = 0; j < static_cast<int>(chain.joints.size()); ++j) {
    const int r0 = L.row_off[j], nr = chain.joints[j].n_rows();
    gamma.segment(r0, nr) = -rows[j].kappa - 2 * zeta * wb * c.segment(r0, nr) - wb * wb * rows[j].pos_err;
  }
  const MatX S = G * Ainv_Gt;
  Eigen::JacobiSVD<MatX> svd(S);
  const auto& sv = svd.singularValues();
  ev.condition = sv.size() ? sv(0) / std::max(sv(sv.size() - 1), 1e-300) : 1.0;
  if (sv.size() && (!std::isfinite(ev.condition) || ev.condition > 1e14)) {
    throw NumericalError("singular constraint system, condition " + std::to_string(ev.condition));
  }
  const VecX lambda = S.partialPivLu().solve(gamma - G * Ainv_f);
  const VecX acc = Ainv_f + Ainv_Gt * lambda;
  if (!acc.allFinite()) throw NumericalError("non-finite accelerations");

  const VecX GtL = Gt * lambda;
  ev.Vdot.resize(nl);
  ev.qdd.resize(nl);
  ev.W_J.resize(nl);
  ev.Q_J.resize(nl);
  for (int i = 0; i < nl; ++i) {
    const int n = chain.links[i].n();
    ev.Vdot[i] = acc.segment<6>(L.off[i]);
    ev.qdd[i] = acc.segment(L.off[i] + 6, n);
    ev.W_J[i] = -GtL.segment<6>(L.off[i]);
    ev.Q_J[i] = GtL.segment(L.off[i] + 6, n);
  }
  for (int j = 0; j < static_cast<int>(chain.joints.size()); ++j) {
    const int r0 = L.row_off[j], nr = chain.joints[j].n_rows();
    const VecX lj = lambda.segment(r0, nr);
    ev.lambda.push_back(lj);
    const Wrench WB = rows[j].C.transpose() * lj;
    ev.W_base_view.push_back(WB);
    ev.W_tip_view.push_back(coadjoint_apply({geo[j].R_pk, Vec3::Zero()}, WB));
    ev.velocity_residual.push_back(c.segment(r0, nr));
    ev.position_error.push_back(rows[j].pos_err);
  }
  return ev;
}

void project_velocities(const Chain& chain, ChainState& s) {
  const Layout L = make_layout(chain);
  if (L.m == 0) return;
  const MatX G = assemble_G(chain, s, L, nullptr, nullptr);
  VecX x = pack_velocity(chain, s, L);
  const MatX GGt = G * G.transpose();
  x -= G.transpose() * GGt.ldlt().solve(G * x);
  for (int i = 0; i < chain.n_links(); ++i) {
    s.links[i].V = x.segment<6>(L.off[i]);
    const int n = chain.links[i].n();
    if (n > 0) s.links[i].qd = x.segment(L.off[i] + 6, n);
  }
}

namespace {

struct Deriv {
  std::vector<Vec3> theta_dot, p_dot;
  std::vector<Twist> Vdot;
  std::vector<VecX> qdot, qdd;
};

Deriv derivative(const Chain& chain, const ChainState& s, const ChainInputs& in, Evaluation* ev_out) {
  Evaluation ev = evaluate(chain, s, in);
  Deriv d;
  for (int i = 0; i < chain.n_links(); ++i) {
    const LinkState& ls = s.links[i];
    d.theta_dot.push_back(body_jacobian(ls.theta).partialPivLu().solve(ang(ls.V)));
    d.p_dot.push_back(ls.R() * lin(ls.V));
    d.Vdot.push_back(ev.Vdot[i]);
    d.qdot.push_back(ls.qd);
    d.qdd.push_back(ev.qdd[i]);
  }
  if (ev_out) *ev_out = std::move(ev);
  return d;
}

ChainState advance(const ChainState& s, const Deriv& d, double h) {
  ChainState out = s;
  for (size_t i = 0; i < s.links.size(); ++i) {
    LinkState& l = out.links[i];
    l.theta += h * d.theta_dot[i];
    l.p += h * d.p_dot[i];
    l.V += h * d.Vdot[i];
    if (l.q.size() > 0) {
      l.q += h * d.qdot[i];
      l.qd += h * d.qdd[i];
    }
  }
  out.t += h;
  return out;
}

void wrap_rotation(Vec3& theta) {
  const double t = theta.norm();
  if (t > std::numbers::pi) theta *= (t - 2 * std::numbers::pi) / t;
}

}  // namespace

StepResult solve_constrained_step(const Chain& chain, const ChainState& s, const ChainInputs& in, double dt) {
  if (!(dt > 0)) throw std::invalid_argument("dt must be positive");
  StepResult res;
  const Deriv k1 = derivative(chain, s, in, &res.eval);
  const Deriv k2 = derivative(chain, advance(s, k1, 0.5 * dt), in, nullptr);
  const Deriv k3 = derivative(chain, advance(s, k2, 0.5 * dt), in, nullptr);
  const Deriv k4 = derivative(chain, advance(s, k3, dt), in, nullptr);
  Deriv sum = k1;
  for (size_t i = 0; i < s.links.size(); ++i) {
    sum.theta_dot[i] = (k1.theta_dot[i] + 2 * k2.theta_dot[i] + 2 * k3.theta_dot[i] + k4.theta_dot[i]) / 6.0;
    sum.p_dot[i] = (k1.p_dot[i] + 2 * k2.p_dot[i] + 2 * k3.p_dot[i] + k4.p_dot[i]) / 6.0;
    sum.Vdot[i] = (k1.Vdot[i] + 2 * k2.Vdot[i] + 2 * k3.Vdot[i] + k4.Vdot[i]) / 6.0;
    sum.qdot[i] = (k1.qdot[i] + 2 * k2.qdot[i] + 2 * k3.qdot[i] + k4.qdot[i]) / 6.0;
    sum.qdd[i] = (k1.qdd[i] + 2 * k2.qdd[i] + 2 * k3.qdd[i] + k4.qdd[i]) / 6.0;
  }
  res.next = advance(s, sum, dt);
  res.next.t = s.t + dt;
  for (auto& l : res.next.links) wrap_rotation(l.theta);
  if (chain.project_velocities) project_velocities(chain, res.next);
  for (const auto& l : res.next.links) {
    if (!l.V.allFinite() || !l.theta.allFinite()) throw NumericalError("state diverged");
  }
  return res;
}

namespace {

Vec3 log_so3(const Mat3& R) {
  const Eigen::AngleAxisd aa(R);
  return aa.angle() * aa.axis();
}

}  // namespace

ChainState initial_state(const Chain& chain, const std::vector<Vec3>& angles) {
  ChainState s;
  for (int i = 0; i < chain.n_links(); ++i) {
    LinkState l;
    const int n = chain.links[i].n();
    l.q = VecX::Zero(n);
    l.qd = VecX::Zero(n);
    s.links.push_back(l);
  }
  for (int j = 0; j < static_cast<int>(chain.joints.size()); ++j) {
    const int p = chain.joints[j].parent;
    Mat3 Rp = Mat3::Identity();
    Vec3 tip = Vec3::Zero();
    if (p >= 0) {
      Rp = s.links[p].R();
      tip = s.links[p].p + Rp * reference_point(chain.links[p].params, chain.links[p].params.c);
    }
    const Mat3 Rk = Rp * tait_bryan(chain.joints[j].sequence, angles[j]);
    s.links[j].theta = log_so3(Rk);
    s.links[j].p = tip;
  }
  return s;
}

std::vector<Vec3> joint_angles(const Chain& chain, const ChainState& s) {
  std::vector<Vec3> out;
  for (int j = 0; j < static_cast<int>(chain.joints.size()); ++j) out.push_back(joint_geometry(chain, s, j).angles);
  return out;
}

double kinetic_energy(const Chain& chain, const ChainState& s) {
  double T = 0.0;
  for (int i = 0; i < chain.n_links(); ++i) {
    const LinkModel& lm = chain.links[i];
    const LinkMotion x = s.links[i].motion();
    const NodeKinematics k = node_kinematics(lm, x);
    const auto& quad = lm.basis.quad();
    const Vec3 w = ang(x.V);
    for (int j = 0; j < kQuadNodes; ++j) {
      const Vec3 u = lin(x.V) + w.cross(k.r_ib[j]) + k.rdot_xi[j];
      T += 0.5 * lm.params.rhoA() * quad.w[j] * u.squaredNorm();
    }
    T += 0.5 * lm.params.torsional_inertia() * w.x() * w.x();
  }
  for (int j = 0; j < static_cast<int>(chain.joints.size()); ++j) {
    const JointSpec& spec = chain.joints[j];
    const auto axes = motor_axes(spec, joint_geometry(chain, s, j));
    const Vec3 w = ang(s.links[j].V);
    int mf = 0;
    for (int m = 0; m < 3; ++m) {
      if (!spec.free[m]) continue;
      const double wa = axes[mf++].dot(w);
      T += 0.5 * spec.motor_inertia[m] * wa * wa;
    }
  }
  return T;
}

double potential_energy(const Chain& chain, const ChainState& s) {
  double U = 0.0;
  for (int i = 0; i < chain.n_links(); ++i) {
    const LinkModel& lm = chain.links[i];
    const LinkState& ls = s.links[i];
    const Mat3 R = ls.R();
    const auto& quad = lm.basis.quad();
    for (int j = 0; j < kQuadNodes; ++j) {
      Vec3 r = reference_point(lm.params, quad.xi[j]);
      if (lm.n() > 0) r += lm.basis.node_shapes(j, 0) * ls.q;
      U += lm.params.rhoA() * quad.w[j] * chain.g_eq.dot(ls.p + R * r);
    }
    if (lm.n() > 0) U += 0.5 * ls.q.dot(lm.basis.omega_sq().cwiseProduct(ls.q));
  }
  return U;
}

Vec3 point_position(const Chain& chain, const ChainState& s, int i, double xi) {
  const LinkModel& lm = chain.links[i];
  Vec3 r = reference_point(lm.params, xi);
  if (lm.n() > 0) r += lm.basis.shapes(xi, 0) * s.links[i].q;
  return s.links[i].p + s.links[i].R() * r;
}

}  // namespace flexsim
