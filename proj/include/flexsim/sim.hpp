#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "flexsim/analysis.hpp"
#include "flexsim/scenario.hpp"

namespace flexsim {

inline constexpr const char* kLogSchema = "flexsim-log/1";
inline constexpr const char* kDeformationSchema = "flexsim-deformation/1";

struct RunOptions {
  std::string out_dir;  // empty: no files
  bool keep_trace = true;
  bool bound_constants = true;  // adaptive runs only
};

// In-memory time series, one entry per control sample.
struct RunTrace {
  std::vector<double> t;
  std::vector<double> V_total;    // sum of nu_i
  std::vector<double> Va_total;   // sum of nu_i^a
  std::vector<double> sum_p;
  std::vector<double> max_p;
  std::vector<double> constraint_residual;
  std::vector<double> max_torque;
  std::vector<double> tracking_error;  // norm of the (theta_1y, theta_1z, theta_2z) error
  std::vector<std::vector<double>> elastic_energy;  // per link
  std::vector<std::vector<Vec3>> tip_deformation;   // per link, body frame
  std::vector<std::vector<Vec5>> s_hat;             // per link
  std::vector<std::vector<double>> pe_lambda_min;   // per link, NaN until ready
};

struct AdaptiveSummary {
  std::vector<Vec5> final_error;      // normalized (s_hat - s) / s
  std::vector<Vec5> settle_time_5;    // last time the normalized error exceeded 5 %
  std::vector<Vec5> settle_time_10;
  std::vector<Vec5> settle_time_2;
  bool bounds_respected = true;
  std::vector<double> pe_min_active;  // min lambda over the active window
  double pe_active_begin = 0.0;
  double pe_active_end = 12.0;
  std::vector<BoundConstants> bounds_constants;
  double mu = 0.0;
  double c_Q = 0.0;
  int envelope_violations = 0;
};

struct RunSummary {
  std::string name;
  std::string controller;
  unsigned seed = 0;
  double dt = 0.0;
  int substeps = 1;
  double t_f = 0.0;
  long samples = 0;
  int exit_code = 0;
  std::string error;
  double wall_time = 0.0;

  double max_abs_torque = 0.0;
  std::vector<Vec3> peak_tip_deformation;  // per link, componentwise max |.|
  std::vector<double> energy_max;          // per link over the run
  std::vector<double> energy_max_early;    // over [5 s, mid]
  std::vector<double> energy_max_late;     // over [mid, t_f]
  double max_constraint_residual = 0.0;
  int telescoping_violations = 0;
  double max_telescoping_ratio = 0.0;  // |sum p| / (1e-6 max|p_i| + 1e-9)
  std::vector<double> alpha;           // per link
  int envelope_violations = 0;
  double envelope_t0 = 0.0;
  double rms_tracking = 0.0;           // over t >= rms_from
  double rms_from = 10.0;
  double max_tracking_error = 0.0;
  double max_reference_condition = 0.0;
  std::optional<AdaptiveSummary> adaptive;
};

struct RunResult {
  RunSummary summary;
  RunTrace trace;
};

// RK4 steps keep h omega_max below this, with omega_max the stiffest clamped link mode.
inline constexpr double kStepFrequencyLimit = 1.0;

int auto_substeps(const Chain& chain, double dt);

RunResult run_scenario(const ScenarioConfig& cfg, const RunOptions& opt = {});

// One run per controller in cfg.compare, in parallel threads, outputs in out_dir/<controller>.
std::vector<RunResult> run_compare(const ScenarioConfig& cfg, const RunOptions& opt = {});

std::string summary_json(const RunSummary& s);

// Column names of the main log.
std::vector<std::string> log_columns(const Chain& chain);

}  // namespace flexsim
