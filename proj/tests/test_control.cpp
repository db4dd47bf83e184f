#include <gtest/gtest.h>

#include "support.hpp"

using namespace flexsim;
using namespace testing_support;

namespace {

LinkMotion rest(const LinkModel& link) {
  LinkMotion x;
  x.q = VecX::Zero(link.n());
  x.qd = VecX::Zero(link.n());
  return x;
}

const Vec3 kGravity(0.0, 0.0, 9.81);

}  // namespace

TEST(ControllerNames, RoundTrip) {
  for (auto k : {ControllerKind::Slpc, ControllerKind::SlpcAdaptive, ControllerKind::Ptc, ControllerKind::Pd}) {
    EXPECT_EQ(parse_controller(controller_name(k)), k);
  }
  EXPECT_THROW(parse_controller("lqr"), std::invalid_argument);
}

TEST(SlpcNominal, ZeroAtRestAndFeedforwardWithoutError) {
  const LinkModel link = link2_model();
  const Mat6 K = 10.0 * Mat6::Identity();
  LinkMotion x = rest(link);
  EXPECT_TRUE(slpc_nominal(link, x, Vec3::Zero(), Twist::Zero(), Vec6::Zero(), K).isZero(0.0));

  x = random_motion(link);
  const Vec6 Vdd = random_vec<6>(3.0);
  const Wrench W = slpc_nominal(link, x, kGravity, x.V, Vdd, K);
  EXPECT_LT(rel_err(W, inertia_matrix(link) * Vdd + bias_Hc(link, x, kGravity)), 1e-14);
}

TEST(SlpcNominal, ErrorFeedbackIsKMe) {
  const Mat6 M = inertia_matrix(link2_model());
  const Mat6 K = Vec6(1, 2, 3, 4, 5, 6).asDiagonal();
  const Twist Vd = random_vec<6>(), V = random_vec<6>();
  EXPECT_LT((slpc_nominal(M, Vec6::Zero(), Vd, Vec6::Zero(), V, K) - K * M * (Vd - V)).norm(), 1e-13);
}

TEST(SlpcAdaptive, ExactEstimateMatchesNominal) {
  const LinkModel link = link2_model();
  const Mat6 K = 7.0 * Mat6::Identity();
  for (int n = 0; n < 20; ++n) {
    const LinkMotion x = random_motion(link);
    const Twist Vd = random_vec<6>();
    const Vec6 Vdd = random_vec<6>(3.0);
    const Wrench a = slpc_adaptive(link, link.truth, x, kGravity, Vd, Vdd, K);
    const Wrench b = slpc_nominal(link, x, kGravity, Vd, Vdd, K);
    EXPECT_LT((a - b).norm(), 1e-12 * std::max(1.0, b.norm()));
  }
  EXPECT_TRUE(slpc_adaptive(link, link.truth, rest(link), Vec3::Zero(), Twist::Zero(), Vec6::Zero(), K).isZero(0.0));
}

TEST(SlpcAdaptive, PerturbationFollowsRegressor) {
  const LinkModel link = link2_model();
  const Mat6 K = 7.0 * Mat6::Identity();
  const LinkMotion x = random_motion(link);
  const Vec6 Vdd = random_vec<6>(3.0);
  for (int k = 0; k < 5; ++k) {
    Vec5 s = link.truth.vec();
    const double ds = 0.1 * s[k];
    s[k] += ds;
    const Wrench diff = slpc_adaptive(link, DynParams::from_vec(s), x, kGravity, x.V, Vdd, K) -
                        slpc_nominal(link, x, kGravity, x.V, Vdd, K);
    const Vec6 expected = regressor_V(link, x, Vdd, kGravity).Y.col(k) * ds;
    EXPECT_LT(rel_err(diff, expected, 1e-9), 1e-9) << "parameter " << k;
  }
}

TEST(Ptc, ProportionalToTwistError) {
  const ScenarioConfig cfg = preset("nominal");
  const Mat6& K2 = cfg.K[1];
  const Twist V = random_vec<6>();
  EXPECT_TRUE(ptc(V, V, K2).isZero(0.0));
  for (int c = 0; c < 6; ++c) {
    const Wrench W = ptc(V + Twist::Unit(c), V, K2);
    if (c == 2) {
      EXPECT_DOUBLE_EQ(W[2], 200.0);
    } else {
      EXPECT_TRUE(W.isZero(0.0)) << c;
    }
  }
  const Twist e1 = random_vec<6>(), e2 = random_vec<6>();
  EXPECT_LT((ptc(e1 + 3.0 * e2, Twist::Zero(), K2) - ptc(e1, Twist::Zero(), K2) - 3.0 * ptc(e2, Twist::Zero(), K2)).norm(),
            1e-12);
}

TEST(PdJoint, GainsAndPositionError) {
  const ScenarioConfig cfg = preset("nominal");
  const GainSet g = build_gains(cfg);
  ASSERT_EQ(g.Kp.size(), 3);
  EXPECT_DOUBLE_EQ(g.Kp[0], 500.0);
  EXPECT_DOUBLE_EQ(g.Kd[0], 20.0);
  EXPECT_DOUBLE_EQ(g.Kp[2], 400.0);
  const VecX z = VecX::Zero(3);
  EXPECT_TRUE(pd_joint(z, z, z, z, g.Kp, g.Kd).isZero(0.0));
  const VecX e = random_vecx(3, 0.1);
  EXPECT_LT((pd_joint(e, z, z, z, g.Kp, g.Kd) - g.Kp.cwiseProduct(e)).norm(), 1e-13);
  EXPECT_LT((pd_joint(z, z, e, z, g.Kp, g.Kd) - g.Kd.cwiseProduct(e)).norm(), 1e-13);
}

TEST(Saturate, ClampsComponentwise) {
  VecX x(4);
  x << 20.0, 150.0, -150.0, -99.0;
  const VecX y = saturate(x, 100.0);
  EXPECT_DOUBLE_EQ(y[0], 20.0);
  EXPECT_DOUBLE_EQ(y[1], 100.0);
  EXPECT_DOUBLE_EQ(y[2], -100.0);
  EXPECT_DOUBLE_EQ(y[3], -99.0);
  const Vec6 w = Vec6::Constant(150.0);
  EXPECT_TRUE(saturate(w, 100.0).isApprox(Vec6::Constant(100.0)));
}

TEST(WrenchToActuation, RecoversRealizableTorques) {
  const ScenarioConfig cfg = preset("nominal");
  const Chain chain = build_chain(cfg);
  ChainState s = initial_state(chain, joint_angles_from_free(chain, scenario_to_free(chain, Vec3(0.2, 0.4, 0.9))));
  for (auto& l : s.links) l.q = random_vecx(static_cast<int>(l.q.size()), 2e-3);
  for (int n = 0; n < 20; ++n) {
    Actuation act;
    act.torques = {random_vecx(2, 30.0), random_vecx(1, 30.0)};
    actuation_wrenches(chain, s, act);
    std::vector<Wrench> W(2);
    for (int i = 0; i < 2; ++i) W[i] = endpoint_wrench_map(chain.links[i], act.W_base[i], act.W_tip[i], s.links[i].q);
    const Actuation back = wrench_to_actuation(chain, s, W, 1e6);
    for (int j = 0; j < 2; ++j) EXPECT_LT((back.torques[j] - act.torques[j]).norm(), 1e-10);
    for (const auto& r : back.residual) EXPECT_LT(r.norm(), 1e-10);
  }
}

TEST(WrenchToActuation, RespectsSaturation) {
  const ScenarioConfig cfg = preset("nominal");
  const Chain chain = build_chain(cfg);
  const ChainState s = initial_state(chain, joint_angles_from_free(chain, scenario_to_free(chain, cfg.initial_angles)));
  const std::vector<Wrench> W{random_vec<6>(1e4), random_vec<6>(1e4)};
  for (const auto& t : wrench_to_actuation(chain, s, W, 100.0).torques) EXPECT_LE(t.cwiseAbs().maxCoeff(), 100.0);
}
