#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <stdexcept>

#include "support.hpp"

using namespace flexsim;
using namespace testing_support;

namespace {

double bisect(const std::function<double(double)>& f, double lo, double hi) {
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if ((f(lo) < 0) == (f(mid) < 0)) lo = mid; else hi = mid;
  }
  return 0.5 * (lo + hi);
}

// Composite Simpson over [a, c] with n (even) panels.
double simpson(const std::function<double(double)>& f, double a, double c, int n = 1000) {
  const double h = (c - a) / n;
  double s = f(a) + f(c);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

}  // namespace

TEST(ClampedFreeRoots, MatchBisectionOracle) {
  const auto f = [](double x) { return 1.0 + std::cos(x) * std::cosh(x); };
  const auto roots = clamped_free_roots(3);
  ASSERT_EQ(roots.size(), 3u);
  EXPECT_NEAR(roots[0], bisect(f, 1.0, 3.0), 1e-10);
  EXPECT_NEAR(roots[1], bisect(f, 4.0, 6.0), 1e-10);
  EXPECT_NEAR(roots[0], 1.8751, 1e-4);
  EXPECT_NEAR(roots[1], 4.6941, 1e-4);
  EXPECT_NEAR(roots[2], 7.8548, 1e-4);
}

TEST(ModalBasis, EmptyForRigidOrZeroModes) {
  const ModalBasis b = make_clamped_free_basis(0, link2_params(), 0);
  EXPECT_EQ(b.size(), 0);
  const FieldSample f = eval_deformation(b, VecX(), 0.5);
  for (const auto& r : f.r) EXPECT_TRUE(r.isZero(0.0));
  LinkParams p = link2_params();
  p.rigid = true;
  EXPECT_EQ(make_link_model(p, {}).n(), 0);
}

TEST(ModalBasis, BoundaryConditions) {
  for (const LinkParams& p : {link1_params(), link2_params()}) {
    const ModalBasis b = make_clamped_free_basis(5, p, 2);
    for (int k = 0; k < b.size(); ++k) {
      EXPECT_NEAR(b.phi(k, p.a, 0), 0.0, 1e-8);
      const double s1 = std::abs(b.phi(k, p.c, 1)) + 1.0;
      if (b.modes()[k].axis == 0) {
        EXPECT_NEAR(b.phi(k, p.c, 1) / s1, 0.0, 1e-8);
      } else {
        const double s2 = std::abs(b.phi(k, p.a, 2));
        const double s3 = std::abs(b.phi(k, p.a, 3));
        EXPECT_NEAR(b.phi(k, p.a, 1), 0.0, 1e-8);
        EXPECT_NEAR(b.phi(k, p.c, 2) / s2, 0.0, 1e-8);
        EXPECT_NEAR(b.phi(k, p.c, 3) / s3, 0.0, 1e-8);
      }
    }
  }
}

TEST(ModalBasis, MassOrthonormal) {
  const LinkParams p = link2_params();
  const ModalBasis b = make_clamped_free_basis(4, p, 2);
  const double rhoA = p.rhoA();
  for (int j = 0; j < b.size(); ++j) {
    for (int k = 0; k < b.size(); ++k) {
      const double gram = simpson(
          [&](double xi) { return rhoA * b.shapes(xi, 0).col(j).dot(b.shapes(xi, 0).col(k)); }, p.a, p.c, 4000);
      EXPECT_NEAR(gram, j == k ? 1.0 : 0.0, 1e-8) << j << "," << k;
    }
  }
}

TEST(ModalBasis, QuadratureMatchesClosedFormStiffness) {
  const LinkParams p = link1_params();
  const ModalBasis b = make_clamped_free_basis(3, p, 1);
  const CrossSectionStiffness st = stiffness_matrices(p);
  const auto& quad = b.quad();
  for (int k = 0; k < b.size(); ++k) {
    double K = 0.0;
    for (int j = 0; j < kQuadNodes; ++j) {
      const Vec3 r1 = b.node_shapes(j, 1).col(k), r2 = b.node_shapes(j, 2).col(k);
      K += quad.w[j] * (r1.dot(st.Iv1 * r1) + r2.dot(st.Iv2 * r2));
    }
    EXPECT_NEAR(K / b.omega_sq()[k], 1.0, 1e-8);
  }
}

TEST(EvalDeformation, ZeroStateAndClampedEnd) {
  const ModalBasis b = make_clamped_free_basis(3, link2_params(), 1);
  const VecX zero = VecX::Zero(b.size());
  for (double xi : {0.0, 0.3, 1.0}) {
    for (const auto& r : eval_deformation(b, zero, xi).r) EXPECT_TRUE(r.isZero(0.0));
  }
  for (int n = 0; n < 20; ++n) {
    const FieldSample f = eval_deformation(b, random_vecx(b.size(), 0.1), 0.0);
    EXPECT_LT(f.r[0].norm(), 1e-12);
    EXPECT_LT(f.r[1].tail<2>().norm(), 1e-12);
  }
  EXPECT_THROW(eval_deformation(b, zero, 1.01), std::domain_error);
  EXPECT_THROW(eval_deformation(b, zero, -0.01), std::domain_error);
}

TEST(EvalDeformation, DerivativesMatchFiniteDifferences) {
  const LinkParams p = link1_params();
  const ModalBasis b = make_clamped_free_basis(3, p, 1);
  const VecX q = random_vecx(b.size(), 0.05);
  const double h = 1e-5;
  for (int i = 1; i <= 20; ++i) {
    const double xi = p.a + p.l() * i / 21.0;
    const FieldSample f = eval_deformation(b, q, xi);
    const FieldSample fp = eval_deformation(b, q, xi + h);
    const FieldSample fm = eval_deformation(b, q, xi - h);
    for (int d = 1; d < 5; ++d) {
      const Vec3 fd = (fp.r[d - 1] - fm.r[d - 1]) / (2 * h);
      EXPECT_LT((f.r[d] - fd).norm(), 1e-5 * std::max(1.0, f.r[d].norm())) << "order " << d << " at " << xi;
    }
  }
}

TEST(Stiffness, RectangularSection) {
  const CrossSectionStiffness s = stiffness_matrices(link2_params());
  EXPECT_NEAR(s.Iv2(1, 1), 2.1e11 * 0.010 * std::pow(0.050, 3) / 12.0, 1e-6);
  EXPECT_NEAR(s.Iv2(1, 1), 2.1875e4, 1e-6);
  EXPECT_NEAR(s.Iv2(2, 2), 875.0, 1e-9);
  EXPECT_NEAR(s.Iv1(0, 0), 2.1e11 * 5e-4, 1e-3);
  EXPECT_TRUE(s.Iv1.isDiagonal() && s.Iv2.isDiagonal());
}

TEST(MassProperties, Link2ClosedForms) {
  const LinkParams p = link2_params();
  const MassProperties mp = mass_properties(p, make_clamped_free_basis(3, p));
  EXPECT_NEAR(mp.m, 3.9, 1e-12);
  const double I = 7800.0 * 5e-4 / 3.0;
  EXPECT_LT((mp.I_b - Vec3(0.0, I, I).asDiagonal().toDenseMatrix()).norm(), 1e-12);
  EXPECT_NEAR(I, 1.3, 1e-12);
  EXPECT_LT((mp.coupling - skew(Vec3(1.95, 0, 0))).norm(), 1e-12);
  Eigen::SelfAdjointEigenSolver<Mat3> eig(mp.I_b);
  EXPECT_GE(eig.eigenvalues().minCoeff(), -1e-12);
}

TEST(ElasticEnergy, ZeroAndFirstModeOracle) {
  const LinkParams p = link2_params();
  const ModalBasis b = make_clamped_free_basis(3, p, 1);
  const VecX zero = VecX::Zero(b.size());
  EXPECT_DOUBLE_EQ(elastic_energy(b, zero, zero, Vec3(1, 2, 3)), 0.0);

  VecX q = zero;
  q[0] = 1.0;
  const CrossSectionStiffness st = stiffness_matrices(p);
  const double oracle = 0.5 * simpson([&](double xi) {
    const Vec3 r2 = b.shapes(xi, 2) * q;
    return r2.dot(st.Iv2 * r2);
  }, p.a, p.c);
  EXPECT_NEAR(elastic_energy(b, q, zero, Vec3::Zero()) / oracle, 1.0, 1e-8);
  EXPECT_NEAR(oracle / (0.5 * b.omega_sq()[0]), 1.0, 1e-8);
}

TEST(ElasticEnergy, NonNegativeAndZeroOnlyAtRest) {
  const ModalBasis b = make_clamped_free_basis(3, link1_params(), 1);
  for (int n = 0; n < 1000; ++n) {
    EXPECT_GE(elastic_energy(b, random_vecx(b.size(), 0.1), random_vecx(b.size()), random_vec<3>(2.0)), 0.0);
  }
  const VecX q = random_vecx(b.size(), 1e-3);
  EXPECT_GT(elastic_energy(b, q, VecX::Zero(b.size()), Vec3::Zero()), 0.0);
}
