#pragma once

#include <vector>

#include "flexsim/adaptation.hpp"
#include "flexsim/chain.hpp"

namespace flexsim {

struct LyapunovValue {
  double nu = 0.0;
  double alpha = 0.0;
};

// nu = e^T M e, alpha = 2 lambda_min(K M) / lambda_max(M)
LyapunovValue lyapunov(const Twist& e, const Mat6& M, const Mat6& K);

double augmented_lyapunov(double nu, const Vec5& e_s, const Vec5& Lambda);

struct PowerResiduals {
  std::vector<double> p;        // per link, 2 e^T (W_J,d - W_J)
  double sum = 0.0;
  std::vector<double> p_tip;    // per joint, parent side
  std::vector<double> p_base;   // per joint, child side
  double max_abs = 0.0;
};

PowerResiduals power_residuals(const Chain& chain, const ChainState& s, const Evaluation& actual,
                               const Evaluation& desired, const std::vector<Twist>& e_V);

struct EnvelopeReport {
  int violations = 0;
  double first_violation_t = -1.0;
  double worst_ratio = 0.0;  // max V / bound
};

// V(t) <= V(t0) exp(-rate s) + (drive / rate)(1 - exp(-rate s)), s = t - t0, with relative slack.
// rate = 0 takes the limit V(t0) + drive s.
EnvelopeReport decay_envelope_check(const std::vector<double>& t, const std::vector<double>& V, double rate,
                                    double drive, double t0, double slack = 0.0);

struct BoundConstants {
  double c_M = 0.0;
  double c_H = 0.0;
  double c_Q = 0.0;
};

struct OperatingEnvelope {
  double omega_max = 2.0;
  double v_max = 2.0;
  double q_max = 0.05;
  int samples = 10000;
  unsigned seed = 1;
};

BoundConstants adaptive_bound_constants(const LinkModel& link, const Mat6& K, const Vec5& Lambda,
                                        double Vdot_d_bound, const ParamBounds& bounds, const Vec3& g,
                                        const OperatingEnvelope& env = {}, double epsilon = 1.0);

// Least-squares slope of log(V) against t over samples with V > floor.
double fitted_decay_rate(const std::vector<double>& t, const std::vector<double>& V, double t_begin, double t_end,
                         double floor = 0.0);

}  // namespace flexsim
