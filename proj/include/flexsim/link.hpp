#pragma once

#include <array>
#include <vector>

#include "flexsim/screw.hpp"

namespace flexsim {

struct LinkParams {
  double rho = 7800.0;
  double A = 0.0;
  double E = 0.0;
  double Iy = 0.0;
  double Iz = 0.0;
  double a = 0.0;
  double c = 0.0;
  double ry_b = 0.0;
  double rz_b = 0.0;
  bool rigid = false;

  double l() const { return c - a; }
  double rhoA() const { return rho * A; }
  double mass() const { return rho * A * (c - a); }
  // Torsional inertia of the cross-sections; absent from the line integral.
  double torsional_inertia() const { return rho * (c - a) * (Iy + Iz); }

  static LinkParams rectangular(double rho, double E, double width, double height, double length);
};

struct ModeCounts {
  int bending = 3;
  int axial = 1;
};

struct Mode {
  int axis = 1;  // displacement direction: 0 axial, 1 y, 2 z
  double beta = 0.0;
  double sigma = 0.0;
  double C = 0.0;
};

inline constexpr int kQuadNodes = 32;

// Gauss-Legendre nodes on [a, c].
struct Quadrature {
  std::array<double, kQuadNodes> xi{};
  std::array<double, kQuadNodes> w{};
};
Quadrature make_quadrature(double a, double c);

// Clamped at a, free at c. Bending modes along y then z, then axial modes.
class ModalBasis {
 public:
  ModalBasis() = default;
  ModalBasis(const LinkParams& p, ModeCounts counts);

  int size() const { return static_cast<int>(modes_.size()); }
  const std::vector<Mode>& modes() const { return modes_; }
  const LinkParams& params() const { return p_; }
  const Quadrature& quad() const { return quad_; }

  // d-th spatial derivative of mode k at xi.
  double phi(int k, double xi, int d) const;
  // 3 x n matrix of mode vectors (d-th derivative) at xi.
  MatX shapes(double xi, int d) const;
  // Cached shapes at quadrature node j.
  const MatX& node_shapes(int j, int d) const { return cache_[d][j]; }

  // Squared natural frequencies; diagonal of the modal stiffness.
  const VecX& omega_sq() const { return omega_sq_; }

 private:
  LinkParams p_;
  std::vector<Mode> modes_;
  Quadrature quad_;
  std::array<std::vector<MatX>, 5> cache_;
  VecX omega_sq_;
};

ModalBasis make_clamped_free_basis(int n_bending, const LinkParams& params, int n_axial = 1);

// Roots of 1 + cos x cosh x = 0 in increasing order.
std::vector<double> clamped_free_roots(int n);

struct FieldSample {
  std::array<Vec3, 5> r;  // r, r', r'', r''', r''''
};

FieldSample eval_deformation(const ModalBasis& basis, const VecX& q, double xi);

struct CrossSectionStiffness {
  Mat3 Iv1 = Mat3::Zero();
  Mat3 Iv2 = Mat3::Zero();
};

CrossSectionStiffness stiffness_matrices(const LinkParams& p);

struct MassProperties {
  double m = 0.0;
  Mat3 I_b = Mat3::Zero();
  Mat3 coupling = Mat3::Zero();  // rhoA * int r_b~
  Vec3 first_moment = Vec3::Zero();  // rhoA * int r_b
};

MassProperties mass_properties(const LinkParams& p, const ModalBasis& basis);

Vec3 reference_point(const LinkParams& p, double xi);

double elastic_energy(const ModalBasis& basis, const VecX& q, const VecX& qdot, const Vec3& omega);

}  // namespace flexsim
