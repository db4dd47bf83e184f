#include <gtest/gtest.h>

#include <numbers>

#include "support.hpp"

using namespace flexsim;
using namespace testing_support;

namespace {

struct Arm {
  ScenarioConfig cfg = preset("nominal");
  Chain chain = build_chain(cfg);
  TrajectorySpec spec = effective_trajectory(cfg);
  ChainState rest() const {
    return initial_state(chain, joint_angles_from_free(chain, scenario_to_free(chain, cfg.initial_angles)));
  }
};

}  // namespace

TEST(EndpointReference, StartsAtCentreAndApproachesRadius) {
  const Arm a;
  EXPECT_TRUE(endpoint_reference(a.spec, 0.0).p.isZero(0.0));
  for (double t : {40.0, 41.3, 47.9}) {
    EXPECT_NEAR(endpoint_reference(a.spec, t).p.tail<2>().norm(), 0.5, 1e-9);
  }
}

TEST(EndpointReference, VelocityMatchesFiniteDifference) {
  const Arm a;
  const double h = 1e-6;
  for (double t = 0.05; t < 20.0; t += 0.37) {
    const Vec3 fd = (endpoint_reference(a.spec, t + h).p - endpoint_reference(a.spec, t - h).p) / (2 * h);
    EXPECT_LT((endpoint_reference(a.spec, t).pdot - fd).norm(), 1e-6);
  }
}

TEST(EndpointReference, ContinuousSampleToSample) {
  const Arm a;
  const double dt = 1e-3;
  for (int k = 0; k < 25000; k += 7) {
    const double t = k * dt;
    const EndpointSample e0 = endpoint_reference(a.spec, t), e1 = endpoint_reference(a.spec, t + dt);
    const double bound = std::max(e0.pdot.norm(), e1.pdot.norm()) * dt * 1.1 + 1e-15;
    EXPECT_LE((e1.p - e0.p).norm(), bound);
  }
}

TEST(DeflectionEstimate, UndeformedIsZero) {
  const Arm a;
  const Deflection d = deflection_estimate(a.chain, a.rest());
  EXPECT_TRUE(d.delta.isZero(0.0));
  EXPECT_TRUE(d.delta_dot.isZero(0.0));
}

TEST(DeflectionEstimate, SingleLinkTipAndRotationTerm) {
  ScenarioConfig cfg = preset("nominal");
  cfg.links.resize(1);
  cfg.joints.resize(1);
  const Chain chain = build_chain(cfg);
  ChainState s = initial_state(chain, {Vec3::Zero()});
  const LinkModel& lm = chain.links[0];
  s.links[0].q = random_vecx(lm.n(), 1e-3);
  const Vec3 tip = lm.basis.shapes(lm.params.c, 0) * s.links[0].q;
  EXPECT_LT((deflection_estimate(chain, s).delta - tip).norm(), 1e-15);
  const Vec3 w(0.0, 0.4, -1.3);
  s.links[0].V = stack(w, Vec3::Zero());
  EXPECT_LT((deflection_estimate(chain, s).delta_dot - w.cross(tip)).norm(), 1e-15);
}

TEST(CorrectedReference, InitialAngles) {
  const Arm a;
  const AngleReference r = corrected_joint_reference(a.spec, Deflection{}, 0.0);
  EXPECT_NEAR(r.q[0], 0.0, 1e-15);
  EXPECT_NEAR(r.q[1], std::numbers::pi / 6, 1e-12);
  EXPECT_NEAR(r.q[2], std::numbers::pi / 6 + std::numbers::pi / 8, 1e-12);
}

TEST(CorrectedReference, BlendDecaysToSmallAngleIk) {
  const Arm a;
  const double t = 60.0;
  const EndpointSample e = endpoint_reference(a.spec, t);
  const AngleReference r = corrected_joint_reference(a.spec, Deflection{}, t);
  EXPECT_NEAR(r.q[1], e.p.y() / 2.2, 1e-12);
  EXPECT_NEAR(r.q[2], e.p.y() / 2.2, 1e-12);
  EXPECT_NEAR(r.q[0], -e.p.z() / 2.2, 1e-12);
}

TEST(CorrectedReference, DeflectionShiftsTarget) {
  const Arm a;
  Deflection d;
  d.delta = Vec3(0.0, 0.03, -0.02);
  d.delta_dot = Vec3(0.0, 0.1, 0.2);
  for (double t : {0.0, 1.0, 7.5}) {
    const AngleReference r0 = corrected_joint_reference(a.spec, Deflection{}, t);
    const AngleReference r1 = corrected_joint_reference(a.spec, d, t);
    EXPECT_LT((r1.q - r0.q - Vec3(d.delta.z(), -d.delta.y(), -d.delta.y()) / 2.2).norm(), 1e-15);
    EXPECT_LT((r1.qd - r0.qd - Vec3(d.delta_dot.z(), -d.delta_dot.y(), -d.delta_dot.y()) / 2.2).norm(), 1e-15);
  }
}

TEST(FreeCoordinates, ScenarioMapsRoundTrip) {
  const Arm a;
  const Vec3 abs(0.1, -0.4, 0.7);
  EXPECT_LT((free_to_scenario(a.chain, scenario_to_free(a.chain, abs)) - abs).norm(), 1e-15);
  const ChainState s = initial_state(a.chain, joint_angles_from_free(a.chain, scenario_to_free(a.chain, abs)));
  EXPECT_LT((free_to_scenario(a.chain, free_coordinates(a.chain, s)) - abs).norm(), 1e-12);
}

TEST(DesiredTwists, StationaryReferenceIsZero) {
  const Arm a;
  for (const auto& V : desired_twists(a.chain, a.rest(), VecX::Zero(3))) EXPECT_TRUE(V.isZero(0.0));
}

TEST(DesiredTwists, SingleAxisRateUsesBodyJacobian) {
  const Arm a;
  const ChainState s = a.rest();
  VecX rates = VecX::Zero(3);
  rates[0] = 0.8;  // theta_1z
  const auto Vd = desired_twists(a.chain, s, rates);
  const JointGeometry g = joint_geometry(a.chain, s, 0);
  EXPECT_LT((ang(Vd[0]) - g.E.col(0) * 0.8).norm(), 1e-15);
  EXPECT_LT((ang(Vd[0]) - Vec3(0, 0, 0.8)).norm(), 1e-15);
  EXPECT_TRUE(lin(Vd[0]).isZero(0.0));
}

TEST(DesiredTwists, SatisfyJointConstraints) {
  const Arm a;
  for (int n = 0; n < 50; ++n) {
    ChainState s = a.rest();
    for (auto& l : s.links) {
      l.q = random_vecx(static_cast<int>(l.q.size()), 2e-3);
      l.qd = random_vecx(static_cast<int>(l.q.size()), 0.05);
    }
    const auto Vd = desired_twists(a.chain, s, random_vecx(3, 2.0));
    for (int i = 0; i < 2; ++i) s.links[i].V = Vd[i];
    for (const auto& c : constraint_residuals(a.chain, s)) EXPECT_LT(c.cwiseAbs().maxCoeff(), 1e-8);
    // The free rates are reproduced.
  }
  ChainState s = a.rest();
  const VecX rates = random_vecx(3);
  const auto Vd = desired_twists(a.chain, s, rates);
  for (int i = 0; i < 2; ++i) s.links[i].V = Vd[i];
  EXPECT_LT((free_coordinate_rates(a.chain, s) - rates).norm(), 1e-12);
}

TEST(TwistRateEstimator, ExactOnQuadraticAndSecondOrderOnCubic) {
  const auto run = [](double dt, int power) {
    TwistRateEstimator est(dt);
    const double t_end = 0.5;
    const int n = static_cast<int>(std::lround(t_end / dt));
    Vec6 last = Vec6::Zero();
    for (int k = 0; k <= n; ++k) {
      const double t = k * dt;
      last = est.push({Vec6::Constant(std::pow(t, power))})[0];
    }
    return std::abs(last[0] - power * std::pow(t_end, power - 1));
  };
  EXPECT_LT(run(1e-3, 2), 1e-9);
  const double e1 = run(2e-3, 3), e2 = run(1e-3, 3);
  EXPECT_NEAR(e1 / e2, 4.0, 0.05);
  TwistRateEstimator est(1e-3);
  for (int k = 0; k < 5; ++k) EXPECT_TRUE(est.push({Vec6::Constant(1.5)})[0].isZero(0.0));
}

TEST(DampedPinv, InverseWhenWellConditionedAndFlagsSingular) {
  MatX J(2, 3);
  J << 1, 0, 0.5, 0, 2, 0;
  const VecX x = random_vecx(2);
  bool near = true;
  EXPECT_LT((J * damped_pinv_solve(J, x, 1e-6, &near) - x).norm(), 1e-10);
  EXPECT_FALSE(near);
  MatX Js(2, 3);
  Js << 1, 0, 0, 1, 0, 0;
  damped_pinv_solve(Js, x, 1e-6, &near);
  EXPECT_TRUE(near);
}

TEST(RigidTipJacobian, MatchesPositionDifferences) {
  const Arm a;
  const VecX f = scenario_to_free(a.chain, Vec3(0.2, 0.3, 0.5));
  const MatX J = rigid_tip_jacobian(a.chain, f);
  const auto tip = [&](const VecX& x) {
    return point_position(a.chain, initial_state(a.chain, joint_angles_from_free(a.chain, x)), 1, 1.0);
  };
  const double h = 1e-6;
  for (int k = 0; k < 3; ++k) {
    const VecX e = h * VecX::Unit(3, k);
    const Vec3 fd = (tip(f + e) - tip(f - e)) / (2 * h);
    EXPECT_LT((J.col(k) - fd.tail<2>()).norm(), 1e-7);
  }
}

TEST(GeneralJointRates, ReproduceEndpointVelocity) {
  const Arm a;
  const VecX f = scenario_to_free(a.chain, Vec3(0.1, 0.2, 0.4));
  const Vec3 pd(0.0, 0.3, -0.2);
  const VecX rates = general_joint_rates(a.chain, f, pd);
  EXPECT_LT((rigid_tip_jacobian(a.chain, f) * rates - pd.tail<2>()).norm(), 1e-8);
}
