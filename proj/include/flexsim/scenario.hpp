#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "flexsim/adaptation.hpp"
#include "flexsim/control.hpp"
#include "flexsim/reference.hpp"

namespace flexsim {

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> errors);
  const std::vector<std::string>& errors() const { return errors_; }

 private:
  std::vector<std::string> errors_;
};

struct LinkConfig {
  double rho = 7800.0;
  double E = 2.1e11;
  double width = 0.01;
  double height = 0.03;
  double length = 1.0;
  bool rigid = false;
};

struct JointConfig {
  int parent = -1;
  Mat3 projection = Mat3::Identity();
  Vec3 motor_inertia = Vec3::Zero();  // per body axis
  std::vector<double> Kp;             // per free angle, sequence order
  std::vector<double> Kd;
};

enum class IkMode { ClosedForm, Pinv };

struct AdaptationConfig {
  std::vector<Vec5> offsets;  // relative, per link
  double bounds = 0.2;        // relative half-width of the parameter box
  Vec5 Lambda = (Vec5() << 5e5, 1e3, 1e3, 10.0, 100.0).finished();
  double noise = 0.0;         // relative std of measurement noise on the residual channels
  double pe_window = 0.0;     // 0 selects 2 pi / omega_d
};

struct ScenarioConfig {
  std::string name = "scenario";
  ControllerKind controller = ControllerKind::Slpc;
  std::vector<ControllerKind> compare;  // non-empty: one run per entry
  unsigned seed = 1;
  double dt = 1e-3;
  double t_f = 25.0;
  int decimation = 1;
  int substeps = 0;  // plant steps per control sample, 0 selects from the stiffest mode
  Vec3 gravity = Vec3::Zero();
  Baumgarte baumgarte;
  ModeCounts modes;
  std::vector<LinkConfig> links;
  std::vector<JointConfig> joints;
  Vec3 initial_angles = Vec3::Zero();  // theta_1y, theta_1z, theta_2z
  TrajectorySpec trajectory;
  IkMode ik = IkMode::ClosedForm;
  double deflection_rate_cutoff = 1.0;  // rad/s, first-order filter on the deflection rate, 0 = unfiltered
  std::vector<Mat6> K;
  double saturation = 100.0;
  AdaptationConfig adaptation;
  double deformation_interval = 0.01;
  int deformation_points = 21;
};

// Both throw ConfigError listing every problem found.
ScenarioConfig parse_scenario(const std::string& yaml_text);
ScenarioConfig load_scenario(const std::string& path);

// Physics checks on a parsed config; empty when valid.
std::vector<std::string> validate_scenario(const ScenarioConfig& cfg);

LinkParams link_params(const LinkConfig& lc);
Chain build_chain(const ScenarioConfig& cfg);
GainSet build_gains(const ScenarioConfig& cfg);
TrajectorySpec effective_trajectory(const ScenarioConfig& cfg);

// True parameter vectors of each link and the adaptation state built from the offsets.
std::vector<Vec5> true_parameters(const Chain& chain);
std::vector<AdaptState> initial_adaptation(const ScenarioConfig& cfg, const Chain& chain);

// Embedded presets.
std::vector<std::string> preset_names();
std::string preset_text(const std::string& name);

}  // namespace flexsim
