#include "flexsim/reference.hpp"

#include <cmath>

namespace flexsim {

EndpointSample endpoint_reference(const TrajectorySpec& spec, double t) {
  const double rho = 1.0 - std::exp(-t / spec.tau_ramp);
  const double rho_dot = std::exp(-t / spec.tau_ramp) / spec.tau_ramp;
  const double s = std::sin(spec.omega_d * t), c = std::cos(spec.omega_d * t);
  EndpointSample out;
  out.p = Vec3(0.0, spec.r_d * s * rho, spec.r_d * c * rho);
  out.pdot = Vec3(0.0, spec.r_d * (spec.omega_d * c * rho + s * rho_dot),
                  spec.r_d * (-spec.omega_d * s * rho + c * rho_dot));
  return out;
}

Deflection deflection_estimate(const Chain& chain, const ChainState& s) {
  Deflection d;
  for (int i = 0; i < chain.n_links(); ++i) {
    const LinkModel& lm = chain.links[i];
    if (lm.n() == 0) continue;
    const LinkState& ls = s.links[i];
    const MatX S = lm.basis.shapes(lm.params.c, 0);
    const Vec3 r = S * ls.q;
    const Vec3 rd = S * ls.qd;
    const Mat3 R = ls.R();
    d.delta += R * r;
    d.delta_dot += R * (ang(ls.V).cross(r) + rd);
  }
  return d;
}

AngleReference corrected_joint_reference(const TrajectorySpec& spec, const Deflection& d, double t) {
  const EndpointSample e = endpoint_reference(spec, t);
  const Vec3 p = e.p - d.delta;
  const Vec3 pd = e.pdot - d.delta_dot;
  const double b = std::exp(-t / spec.tau_blend);
  const double bd = -b / spec.tau_blend;
  const double L = spec.L;
  AngleReference r;
  r.q = Vec3(-p.z() / L + spec.theta1y0 * b, p.y() / L + spec.theta1z0 * b, p.y() / L + spec.theta2z0 * b);
  r.qd = Vec3(-pd.z() / L + spec.theta1y0 * bd, pd.y() / L + spec.theta1z0 * bd, pd.y() / L + spec.theta2z0 * bd);
  return r;
}

VecX free_coordinates(const Chain& chain, const ChainState& s) {
  std::vector<double> out;
  for (int j = 0; j < static_cast<int>(chain.joints.size()); ++j) {
    const Vec3 a = joint_geometry(chain, s, j).angles;
    for (int m = 0; m < 3; ++m) {
      if (chain.joints[j].free[m]) out.push_back(a[m]);
    }
  }
  return Eigen::Map<VecX>(out.data(), static_cast<Eigen::Index>(out.size()));
}

VecX free_coordinate_rates(const Chain& chain, const ChainState& s) {
  std::vector<double> out;
  for (int j = 0; j < static_cast<int>(chain.joints.size()); ++j) {
    const JointGeometry g = joint_geometry(chain, s, j);
    const int p = chain.joints[j].parent;
    Vec3 w_rel = ang(s.links[j].V);
    if (p >= 0) w_rel -= g.R_pk.transpose() * ang(s.links[p].V);
    const Vec3 rates = g.Einv * w_rel;
    for (int m = 0; m < 3; ++m) {
      if (chain.joints[j].free[m]) out.push_back(rates[m]);
    }
  }
  return Eigen::Map<VecX>(out.data(), static_cast<Eigen::Index>(out.size()));
}

namespace {

// Index of the free coordinate of joint j that rotates about body axis `axis`.
int free_index(const Chain& chain, int j, int axis) {
  int idx = 0;
  for (int jj = 0; jj < static_cast<int>(chain.joints.size()); ++jj) {
    for (int m = 0; m < 3; ++m) {
      if (!chain.joints[jj].free[m]) continue;
      if (jj == j && chain.joints[jj].sequence[m] == axis) return idx;
      ++idx;
    }
  }
  return -1;
}

int n_free_total(const Chain& chain) {
  int n = 0;
  for (const auto& j : chain.joints) n += j.n_free();
  return n;
}

}  // namespace

VecX scenario_to_free(const Chain& chain, const Vec3& absolute) {
  VecX f = VecX::Zero(n_free_total(chain));
  const int i1y = free_index(chain, 0, 1), i1z = free_index(chain, 0, 2), i2z = free_index(chain, 1, 2);
  if (i1y >= 0) f[i1y] = absolute[0];
  if (i1z >= 0) f[i1z] = absolute[1];
  if (i2z >= 0) f[i2z] = absolute[2] - absolute[1];
  return f;
}

Vec3 free_to_scenario(const Chain& chain, const VecX& free) {
  const int i1y = free_index(chain, 0, 1), i1z = free_index(chain, 0, 2), i2z = free_index(chain, 1, 2);
  const double t1y = i1y >= 0 ? free[i1y] : 0.0;
  const double t1z = i1z >= 0 ? free[i1z] : 0.0;
  const double phi2 = i2z >= 0 ? free[i2z] : 0.0;
  return {t1y, t1z, t1z + phi2};
}

std::vector<Vec3> joint_angles_from_free(const Chain& chain, const VecX& free) {
  std::vector<Vec3> out;
  int idx = 0;
  for (const auto& spec : chain.joints) {
    Vec3 a = Vec3::Zero();
    for (int m = 0; m < 3; ++m) {
      if (spec.free[m]) a[m] = free[idx++];
    }
    out.push_back(a);
  }
  return out;
}

std::vector<Twist> desired_twists(const Chain& chain, const ChainState& s, const VecX& free_rates,
                                  bool include_deformation_rate) {
  std::vector<Twist> Vd(chain.n_links(), Twist::Zero());
  int idx = 0;
  for (int j = 0; j < static_cast<int>(chain.joints.size()); ++j) {
    const JointSpec& spec = chain.joints[j];
    const JointGeometry g = joint_geometry(chain, s, j);
    Vec3 rates = Vec3::Zero();
    for (int m = 0; m < 3; ++m) {
      if (spec.free[m]) rates[m] = free_rates[idx++];
    }
    const Mat3 Rt = g.R_pk.transpose();
    Vec3 w = g.E * rates, v = Vec3::Zero();
    if (spec.parent >= 0) {
      const Twist& Vp = Vd[spec.parent];
      Vec3 u = lin(Vp) + ang(Vp).cross(g.r_tip);
      if (include_deformation_rate && chain.links[spec.parent].n() > 0) u += g.Phi_tip * s.links[spec.parent].qd;
      w += Rt * ang(Vp);
      v = Rt * u;
    }
    Vd[j] = stack(w, v);
  }
  return Vd;
}

std::vector<Vec6> TwistRateEstimator::push(const std::vector<Twist>& Vd) {
  hist_.push_back(Vd);
  if (hist_.size() > 3) hist_.pop_front();
  std::vector<Vec6> out(Vd.size(), Vec6::Zero());
  const size_t h = hist_.size();
  for (size_t i = 0; i < Vd.size(); ++i) {
    if (h == 2) {
      out[i] = (hist_[1][i] - hist_[0][i]) / dt_;
    } else if (h == 3) {
      out[i] = (3.0 * hist_[2][i] - 4.0 * hist_[1][i] + hist_[0][i]) / (2.0 * dt_);
    }
  }
  return out;
}

VecX damped_pinv_solve(const MatX& J, const VecX& xdot, double lambda, bool* near_singular) {
  const MatX JJt = J * J.transpose();
  if (near_singular) {
    Eigen::SelfAdjointEigenSolver<MatX> eig(JJt);
    *near_singular = eig.eigenvalues().minCoeff() < 1e3 * lambda * lambda;
  }
  const MatX reg = JJt + lambda * lambda * MatX::Identity(J.rows(), J.rows());
  return J.transpose() * reg.ldlt().solve(xdot);
}

namespace {

Vec3 rigid_tip(const Chain& chain, const VecX& free) {
  std::vector<Mat3> R(chain.n_links());
  std::vector<Vec3> p(chain.n_links());
  int idx = 0;
  for (int j = 0; j < static_cast<int>(chain.joints.size()); ++j) {
    const JointSpec& spec = chain.joints[j];
    Vec3 a = Vec3::Zero();
    for (int m = 0; m < 3; ++m) {
      if (spec.free[m]) a[m] = free[idx++];
    }
    Mat3 Rp = Mat3::Identity();
    Vec3 tip = Vec3::Zero();
    if (spec.parent >= 0) {
      Rp = R[spec.parent];
      tip = p[spec.parent] + Rp * reference_point(chain.links[spec.parent].params, chain.links[spec.parent].params.c);
    }
    R[j] = Rp * tait_bryan(spec.sequence, a);
    p[j] = tip;
  }
  const int last = chain.n_links() - 1;
  return p[last] + R[last] * reference_point(chain.links[last].params, chain.links[last].params.c);
}

}  // namespace

MatX rigid_tip_jacobian(const Chain& chain, const VecX& free) {
  const double h = 1e-7;
  MatX J(2, free.size());
  for (int k = 0; k < free.size(); ++k) {
    VecX fp = free, fm = free;
    fp[k] += h;
    fm[k] -= h;
    const Vec3 d = (rigid_tip(chain, fp) - rigid_tip(chain, fm)) / (2 * h);
    J.col(k) = d.tail<2>();
  }
  return J;
}

VecX general_joint_rates(const Chain& chain, const VecX& free_d, const Vec3& pdot_corr, double lambda) {
  return damped_pinv_solve(rigid_tip_jacobian(chain, free_d), pdot_corr.tail<2>(), lambda);
}

}  // namespace flexsim
