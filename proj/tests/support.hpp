#pragma once

#include <random>

#include "flexsim/sim.hpp"

namespace testing_support {

using namespace flexsim;

inline std::mt19937_64& rng() {
  static std::mt19937_64 g(20240611);
  return g;
}

inline double uniform(double lo = -1.0, double hi = 1.0) {
  return std::uniform_real_distribution<double>(lo, hi)(rng());
}

template <int N>
Eigen::Matrix<double, N, 1> random_vec(double scale = 1.0) {
  Eigen::Matrix<double, N, 1> v;
  for (int i = 0; i < N; ++i) v[i] = scale * uniform();
  return v;
}

inline VecX random_vecx(int n, double scale = 1.0) {
  VecX v(n);
  for (int i = 0; i < n; ++i) v[i] = scale * uniform();
  return v;
}

inline AdjointTransform random_transform() { return {exp_so3(random_vec<3>(3.0)), random_vec<3>(2.0)}; }

// Second link of the two-link arm: 10 x 50 mm steel, 1 m.
inline LinkParams link2_params() { return LinkParams::rectangular(7800.0, 2.1e11, 0.010, 0.050, 1.0); }
inline LinkParams link1_params() { return LinkParams::rectangular(7800.0, 2.1e11, 0.010, 0.030, 1.2); }

inline LinkModel link2_model(ModeCounts counts = {}) { return make_link_model(link2_params(), counts); }

// Random motion in the operating range of the arm.
inline LinkMotion random_motion(const LinkModel& link, double q_scale = 2e-3) {
  LinkMotion x;
  x.R = exp_so3(random_vec<3>(3.0));
  x.V = random_vec<6>(2.0);
  x.q = random_vecx(link.n(), q_scale);
  x.qd = random_vecx(link.n(), 50.0 * q_scale);
  return x;
}

inline double rel_err(const VecX& a, const VecX& b, double floor = 1e-12) {
  return (a - b).norm() / std::max(b.norm(), floor);
}

inline ScenarioConfig preset(const std::string& name) { return parse_scenario(preset_text(name)); }

}  // namespace testing_support
