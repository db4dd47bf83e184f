#include "flexsim/link.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace flexsim {

LinkParams LinkParams::rectangular(double rho, double E, double width, double height, double length) {
  LinkParams p;
  p.rho = rho;
  p.E = E;
  p.A = width * height;
  p.Iz = width * height * height * height / 12.0;
  p.Iy = height * width * width * width / 12.0;
  p.a = 0.0;
  p.c = length;
  return p;
}

Quadrature make_quadrature(double a, double c) {
  using G = boost::math::quadrature::gauss<double, kQuadNodes>;
  const auto& x = G::abscissa();
  const auto& w = G::weights();
  const double half = 0.5 * (c - a);
  const double mid = 0.5 * (c + a);
  Quadrature q;
  const int n_half = kQuadNodes / 2;
  for (int i = 0; i < n_half; ++i) {
    q.xi[n_half - 1 - i] = mid - half * x[i];
    q.w[n_half - 1 - i] = half * w[i];
    q.xi[n_half + i] = mid + half * x[i];
    q.w[n_half + i] = half * w[i];
  }
  return q;
}

std::vector<double> clamped_free_roots(int n) {
  if (n > 20) throw std::invalid_argument("at most 20 clamped-free modes are supported");
  auto g = [](double x) { return std::cos(x) + 1.0 / std::cosh(x); };
  std::vector<double> roots;
  const double h = 0.5 * std::numbers::pi;
  for (int m = 1; static_cast<int>(roots.size()) < n; ++m) {
    const double lo = m * h, hi = (m + 1) * h;
    if (g(lo) * g(hi) > 0.0) continue;
    std::uintmax_t iters = 200;
    auto tol = boost::math::tools::eps_tolerance<double>(52);
    auto [r0, r1] = boost::math::tools::toms748_solve(g, lo, hi, tol, iters);
    if (iters >= 200) throw std::runtime_error("clamped-free root did not converge");
    roots.push_back(0.5 * (r0 + r1));
  }
  return roots;
}

ModalBasis::ModalBasis(const LinkParams& p, ModeCounts counts) : p_(p) {
  quad_ = make_quadrature(p.a, p.c);
  const double l = p.l();
  const double rhoA = p.rhoA();
  if (!p.rigid) {
    const auto roots = clamped_free_roots(counts.bending);
    for (int axis : {1, 2}) {
      for (double x : roots) {
        Mode m;
        m.axis = axis;
        m.beta = x / l;
        m.sigma = (std::cosh(x) + std::cos(x)) / (std::sinh(x) + std::sin(x));
        m.C = 1.0 / std::sqrt(rhoA * l);
        modes_.push_back(m);
      }
    }
    for (int k = 1; k <= counts.axial; ++k) {
      Mode m;
      m.axis = 0;
      m.beta = (2 * k - 1) * std::numbers::pi / (2.0 * l);
      m.C = std::sqrt(2.0 / (rhoA * l));
      modes_.push_back(m);
    }
  }
  const int n = size();
  omega_sq_ = VecX::Zero(n);
  for (int k = 0; k < n; ++k) {
    const Mode& m = modes_[k];
    const double b2 = m.beta * m.beta;
    if (m.axis == 0) {
      omega_sq_[k] = p.E * p.A * b2 / rhoA;
    } else {
      const double EI = m.axis == 1 ? p.E * p.Iz : p.E * p.Iy;
      omega_sq_[k] = EI * b2 * b2 / rhoA;
    }
  }
  for (int d = 0; d < 5; ++d) {
    cache_[d].reserve(kQuadNodes);
    for (int j = 0; j < kQuadNodes; ++j) cache_[d].push_back(shapes(quad_.xi[j], d));
  }
}

double ModalBasis::phi(int k, double xi, int d) const {
  const Mode& m = modes_[k];
  const double x = xi - p_.a;
  const double bx = m.beta * x;
  const double scale = m.C * std::pow(m.beta, d);
  if (m.axis == 0) {
    // d-th derivative of sin cycles through cos, -sin, -cos, sin
    switch (d % 4) {
      case 0: return scale * std::sin(bx);
      case 1: return scale * std::cos(bx);
      case 2: return -scale * std::sin(bx);
      default: return -scale * std::cos(bx);
    }
  }
  const double ch = std::cosh(bx), sh = std::sinh(bx), cs = std::cos(bx), sn = std::sin(bx);
  const double s = m.sigma;
  switch (d) {
    case 0: return scale * (ch - cs - s * (sh - sn));
    case 1: return scale * (sh + sn - s * (ch - cs));
    case 2: return scale * (ch + cs - s * (sh + sn));
    case 3: return scale * (sh - sn - s * (ch + cs));
    default: return scale * (ch - cs - s * (sh - sn));
  }
}

MatX ModalBasis::shapes(double xi, int d) const {
  MatX S = MatX::Zero(3, size());
  for (int k = 0; k < size(); ++k) S(modes_[k].axis, k) = phi(k, xi, d);
  return S;
}

ModalBasis make_clamped_free_basis(int n_bending, const LinkParams& params, int n_axial) {
  if (n_bending < 0 || n_axial < 0) throw std::invalid_argument("mode counts must be nonnegative");
  return ModalBasis(params, ModeCounts{n_bending, n_axial});
}

FieldSample eval_deformation(const ModalBasis& basis, const VecX& q, double xi) {
  const LinkParams& p = basis.params();
  const double tol = 1e-12 * std::max(1.0, std::abs(p.c));
  if (xi < p.a - tol || xi > p.c + tol) throw std::domain_error("xi outside the link");
  FieldSample out;
  for (int d = 0; d < 5; ++d) {
    out.r[d] = basis.size() == 0 ? Vec3::Zero() : Vec3(basis.shapes(xi, d) * q);
  }
  return out;
}

CrossSectionStiffness stiffness_matrices(const LinkParams& p) {
  CrossSectionStiffness s;
  s.Iv1(0, 0) = p.E * p.A;
  s.Iv2(1, 1) = p.E * p.Iz;
  s.Iv2(2, 2) = p.E * p.Iy;
  return s;
}

Vec3 reference_point(const LinkParams& p, double xi) { return Vec3(xi, p.ry_b, p.rz_b); }

MassProperties mass_properties(const LinkParams& p, const ModalBasis& basis) {
  MassProperties mp;
  mp.m = p.mass();
  const Quadrature& q = basis.quad();
  const double rhoA = p.rhoA();
  for (int j = 0; j < kQuadNodes; ++j) {
    const Mat3 S = skew(reference_point(p, q.xi[j]));
    mp.I_b -= rhoA * q.w[j] * S * S;
    mp.first_moment += rhoA * q.w[j] * reference_point(p, q.xi[j]);
  }
  mp.coupling = skew(mp.first_moment);
  return mp;
}

double elastic_energy(const ModalBasis& basis, const VecX& q, const VecX& qdot, const Vec3& omega) {
  if (basis.size() == 0) return 0.0;
  const LinkParams& p = basis.params();
  const CrossSectionStiffness st = stiffness_matrices(p);
  const Quadrature& quad = basis.quad();
  double kin = 0.0, pot = 0.0;
  for (int j = 0; j < kQuadNodes; ++j) {
    const Vec3 r = basis.node_shapes(j, 0) * q;
    const Vec3 v = basis.node_shapes(j, 0) * qdot + omega.cross(r);
    const Vec3 r1 = basis.node_shapes(j, 1) * q;
    const Vec3 r2 = basis.node_shapes(j, 2) * q;
    kin += quad.w[j] * v.squaredNorm();
    pot += quad.w[j] * (r1.dot(st.Iv1 * r1) + r2.dot(st.Iv2 * r2));
  }
  return 0.5 * p.rhoA() * kin + 0.5 * pot;
}

}  // namespace flexsim
