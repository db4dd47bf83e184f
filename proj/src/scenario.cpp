#include "flexsim/scenario.hpp"

#include <fstream>
#include <numbers>
#include <sstream>

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

#include "presets.hpp"

namespace flexsim {

ConfigError::ConfigError(std::vector<std::string> errors)
    : std::runtime_error(errors.empty() ? "invalid config" : errors.front()), errors_(std::move(errors)) {}

namespace {

class Reader {
 public:
  std::vector<std::string> errors;

  template <class T>
  void get(const YAML::Node& node, const std::string& key, const std::string& path, T& out, bool required = false) {
    const YAML::Node n = node[key];
    if (!n) {
      if (required) errors.push_back(fmt::format("{}{}: missing", path, key));
      return;
    }
    try {
      out = n.as<T>();
    } catch (const YAML::Exception&) {
      errors.push_back(fmt::format("{}{}: wrong type", path, key));
    }
  }

  std::vector<double> list(const YAML::Node& n, const std::string& where, int expected = -1) {
    std::vector<double> v;
    if (!n || !n.IsSequence()) {
      errors.push_back(fmt::format("{}: expected a list", where));
      return v;
    }
    try {
      v = n.as<std::vector<double>>();
    } catch (const YAML::Exception&) {
      errors.push_back(fmt::format("{}: expected numbers", where));
      return {};
    }
    if (expected >= 0 && static_cast<int>(v.size()) != expected) {
      errors.push_back(fmt::format("{}: expected {} entries, got {}", where, expected, v.size()));
      return {};
    }
    return v;
  }

  Vec3 vec3(const YAML::Node& n, const std::string& where, const Vec3& fallback) {
    if (!n) return fallback;
    const auto v = list(n, where, 3);
    return v.size() == 3 ? Vec3(v[0], v[1], v[2]) : fallback;
  }

  // A 3-list is the diagonal; a 3x3 nested list is the full matrix.
  Mat3 mat3(const YAML::Node& n, const std::string& where) {
    if (n && n.IsSequence() && n.size() == 3 && n[0].IsSequence()) {
      Mat3 M;
      for (int r = 0; r < 3; ++r) {
        const auto row = list(n[r], fmt::format("{}[{}]", where, r), 3);
        if (row.size() != 3) return Mat3::Identity();
        for (int c = 0; c < 3; ++c) M(r, c) = row[c];
      }
      return M;
    }
    const auto d = list(n, where, 3);
    if (d.size() != 3) return Mat3::Identity();
    return Vec3(d[0], d[1], d[2]).asDiagonal();
  }

  Mat6 mat6(const YAML::Node& n, const std::string& where) {
    if (n && n.IsSequence() && n.size() == 6 && n[0].IsSequence()) {
      Mat6 M;
      for (int r = 0; r < 6; ++r) {
        const auto row = list(n[r], fmt::format("{}[{}]", where, r), 6);
        if (row.size() != 6) return Mat6::Zero();
        for (int c = 0; c < 6; ++c) M(r, c) = row[c];
      }
      return M;
    }
    const auto d = list(n, where, 6);
    if (d.size() != 6) return Mat6::Zero();
    return Eigen::Map<const Vec6>(d.data()).asDiagonal();
  }

  ControllerKind controller(const std::string& name, const std::string& where) {
    try {
      return parse_controller(name);
    } catch (const std::invalid_argument&) {
      errors.push_back(fmt::format("{}: unknown controller '{}'", where, name));
      return ControllerKind::Slpc;
    }
  }
};

bool is_projection(const Mat3& P) {
  return (P * P - P).cwiseAbs().maxCoeff() < 1e-12 && (P - P.transpose()).cwiseAbs().maxCoeff() < 1e-12;
}

}  // namespace

ScenarioConfig parse_scenario(const std::string& yaml_text) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::Exception& e) {
    throw ConfigError({fmt::format("yaml: {}", e.what())});
  }
  if (!root.IsMap()) throw ConfigError({"top level must be a mapping"});

  Reader rd;
  ScenarioConfig cfg;
  rd.get(root, "name", "", cfg.name);
  std::string ctrl = "slpc";
  rd.get(root, "controller", "", ctrl, true);
  cfg.controller = rd.controller(ctrl, "controller");
  if (root["compare"]) {
    std::vector<std::string> names;
    rd.get(root, "compare", "", names);
    for (const auto& n : names) cfg.compare.push_back(rd.controller(n, "compare"));
  }
  rd.get(root, "seed", "", cfg.seed);

  if (const YAML::Node in = root["integration"]) {
    rd.get(in, "dt", "integration.", cfg.dt);
    rd.get(in, "t_f", "integration.", cfg.t_f);
    rd.get(in, "decimation", "integration.", cfg.decimation);
    rd.get(in, "substeps", "integration.", cfg.substeps);
  }
  cfg.gravity = rd.vec3(root["gravity"], "gravity", cfg.gravity);
  if (const YAML::Node b = root["baumgarte"]) {
    rd.get(b, "omega", "baumgarte.", cfg.baumgarte.omega);
    rd.get(b, "zeta", "baumgarte.", cfg.baumgarte.zeta);
  }
  if (const YAML::Node m = root["modes"]) {
    rd.get(m, "bending", "modes.", cfg.modes.bending);
    rd.get(m, "axial", "modes.", cfg.modes.axial);
  }

  const YAML::Node links = root["links"];
  if (!links || !links.IsSequence() || links.size() == 0) {
    rd.errors.push_back("links: expected a non-empty list");
  } else {
    for (size_t i = 0; i < links.size(); ++i) {
      const std::string p = fmt::format("links[{}].", i);
      LinkConfig lc;
      rd.get(links[i], "rho", p, lc.rho, true);
      rd.get(links[i], "E", p, lc.E, true);
      rd.get(links[i], "width", p, lc.width, true);
      rd.get(links[i], "height", p, lc.height, true);
      rd.get(links[i], "length", p, lc.length, true);
      rd.get(links[i], "rigid", p, lc.rigid);
      cfg.links.push_back(lc);
    }
  }

  const YAML::Node joints = root["joints"];
  if (!joints || !joints.IsSequence()) {
    rd.errors.push_back("joints: expected a list");
  } else {
    for (size_t j = 0; j < joints.size(); ++j) {
      const std::string p = fmt::format("joints[{}].", j);
      JointConfig jc;
      rd.get(joints[j], "parent", p, jc.parent, true);
      jc.projection = rd.mat3(joints[j]["projection"], p + "projection");
      jc.motor_inertia = rd.vec3(joints[j]["motor_inertia"], p + "motor_inertia", Vec3::Zero());
      if (joints[j]["Kp"]) jc.Kp = rd.list(joints[j]["Kp"], p + "Kp");
      if (joints[j]["Kd"]) jc.Kd = rd.list(joints[j]["Kd"], p + "Kd");
      cfg.joints.push_back(jc);
    }
  }

  cfg.initial_angles = rd.vec3(root["initial_angles"], "initial_angles", cfg.initial_angles);

  if (const YAML::Node tr = root["trajectory"]) {
    rd.get(tr, "r_d", "trajectory.", cfg.trajectory.r_d);
    rd.get(tr, "omega_d", "trajectory.", cfg.trajectory.omega_d);
    rd.get(tr, "tau_ramp", "trajectory.", cfg.trajectory.tau_ramp);
    rd.get(tr, "tau_blend", "trajectory.", cfg.trajectory.tau_blend);
    rd.get(tr, "deflection_rate_cutoff", "trajectory.", cfg.deflection_rate_cutoff);
    std::string ik = "closed-form";
    rd.get(tr, "ik", "trajectory.", ik);
    if (ik == "closed-form") {
      cfg.ik = IkMode::ClosedForm;
    } else if (ik == "pinv") {
      cfg.ik = IkMode::Pinv;
    } else {
      rd.errors.push_back(fmt::format("trajectory.ik: unknown mode '{}'", ik));
    }
  }

  if (const YAML::Node g = root["gains"]) {
    if (const YAML::Node K = g["K"]; K && K.IsSequence()) {
      for (size_t i = 0; i < K.size(); ++i) cfg.K.push_back(rd.mat6(K[i], fmt::format("gains.K[{}]", i)));
    } else {
      rd.errors.push_back("gains.K: expected a list");
    }
    rd.get(g, "saturation", "gains.", cfg.saturation);
  } else {
    rd.errors.push_back("gains: missing");
  }

  if (const YAML::Node a = root["adaptation"]) {
    if (const YAML::Node off = a["offsets"]; off && off.IsSequence()) {
      for (size_t i = 0; i < off.size(); ++i) {
        const auto v = rd.list(off[i], fmt::format("adaptation.offsets[{}]", i), 5);
        if (v.size() == 5) cfg.adaptation.offsets.push_back(Eigen::Map<const Vec5>(v.data()));
      }
    }
    rd.get(a, "bounds", "adaptation.", cfg.adaptation.bounds);
    if (a["Lambda"]) {
      const auto v = rd.list(a["Lambda"], "adaptation.Lambda", 5);
      if (v.size() == 5) cfg.adaptation.Lambda = Eigen::Map<const Vec5>(v.data());
    }
    rd.get(a, "noise", "adaptation.", cfg.adaptation.noise);
    rd.get(a, "pe_window", "adaptation.", cfg.adaptation.pe_window);
  }

  if (const YAML::Node o = root["output"]) {
    rd.get(o, "deformation_interval", "output.", cfg.deformation_interval);
    rd.get(o, "deformation_points", "output.", cfg.deformation_points);
  }

  if (!rd.errors.empty()) throw ConfigError(rd.errors);
  return cfg;
}

ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({fmt::format("cannot open {}", path)});
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str());
}

std::vector<std::string> validate_scenario(const ScenarioConfig& cfg) {
  std::vector<std::string> err;
  auto positive = [&](double v, const std::string& what) {
    if (!(v > 0.0) || !std::isfinite(v)) err.push_back(fmt::format("{} must be positive, got {}", what, v));
  };
  positive(cfg.dt, "integration.dt");
  if (!(cfg.t_f >= 0.0)) err.push_back("integration.t_f must be non-negative");
  if (cfg.decimation < 1) err.push_back("integration.decimation must be at least 1");
  if (cfg.substeps < 0) err.push_back("integration.substeps must be non-negative");
  positive(cfg.baumgarte.omega, "baumgarte.omega");
  positive(cfg.baumgarte.zeta, "baumgarte.zeta");
  if (cfg.modes.bending < 0 || cfg.modes.bending > 20) err.push_back("modes.bending must be in [0, 20]");
  if (cfg.modes.axial < 0 || cfg.modes.axial > 20) err.push_back("modes.axial must be in [0, 20]");

  const int n = static_cast<int>(cfg.links.size());
  for (int i = 0; i < n; ++i) {
    const auto& l = cfg.links[i];
    const std::string p = fmt::format("links[{}].", i);
    positive(l.rho, p + "rho");
    positive(l.E, p + "E");
    positive(l.width, p + "width");
    positive(l.height, p + "height");
    positive(l.length, p + "length");
  }

  if (static_cast<int>(cfg.joints.size()) != n) {
    err.push_back(fmt::format("joints: expected {} entries (one per link), got {}", n, cfg.joints.size()));
  }
  for (int j = 0; j < static_cast<int>(cfg.joints.size()); ++j) {
    const auto& jc = cfg.joints[j];
    const std::string p = fmt::format("joints[{}].", j);
    if (jc.parent < -1 || jc.parent >= j) err.push_back(p + "parent must be -1 or an earlier link");
    if (!is_projection(jc.projection)) {
      err.push_back(p + "projection must be symmetric and idempotent");
    } else if (!jc.projection.isDiagonal(1e-12)) {
      err.push_back(p + "projection must select body axes (diagonal)");
    }
    for (int a = 0; a < 3; ++a) {
      if (jc.motor_inertia[a] < 0.0) err.push_back(p + "motor_inertia must be non-negative");
    }
    const int n_free = static_cast<int>(std::lround(jc.projection.trace()));
    if (!jc.Kp.empty() && static_cast<int>(jc.Kp.size()) != n_free) err.push_back(p + "Kp needs one entry per free axis");
    if (!jc.Kd.empty() && static_cast<int>(jc.Kd.size()) != n_free) err.push_back(p + "Kd needs one entry per free axis");
  }

  positive(cfg.trajectory.tau_ramp, "trajectory.tau_ramp");
  positive(cfg.trajectory.tau_blend, "trajectory.tau_blend");
  if (!(cfg.trajectory.r_d >= 0.0)) err.push_back("trajectory.r_d must be non-negative");
  if (!(cfg.deflection_rate_cutoff >= 0.0)) err.push_back("trajectory.deflection_rate_cutoff must be non-negative");
  if (cfg.ik == IkMode::ClosedForm && n != 2) err.push_back("trajectory.ik closed-form needs the two-link arm");

  if (static_cast<int>(cfg.K.size()) != n) {
    err.push_back(fmt::format("gains.K: expected {} matrices, got {}", n, cfg.K.size()));
  }
  for (int i = 0; i < static_cast<int>(cfg.K.size()); ++i) {
    const Mat6& K = cfg.K[i];
    if ((K - K.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
      err.push_back(fmt::format("gains.K[{}] must be symmetric", i));
    } else if (Eigen::SelfAdjointEigenSolver<Mat6>(K, Eigen::EigenvaluesOnly).eigenvalues()(0) < -1e-12) {
      err.push_back(fmt::format("gains.K[{}] must be positive semidefinite", i));
    }
  }
  positive(cfg.saturation, "gains.saturation");

  const auto& ad = cfg.adaptation;
  const bool adaptive = cfg.controller == ControllerKind::SlpcAdaptive;
  if (adaptive && static_cast<int>(ad.offsets.size()) != n) {
    err.push_back(fmt::format("adaptation.offsets: expected {} rows, got {}", n, ad.offsets.size()));
  }
  if (!(ad.bounds > 0.0 && ad.bounds < 1.0)) err.push_back("adaptation.bounds must give s_l < s_h with s_l > 0");
  for (size_t i = 0; i < ad.offsets.size(); ++i) {
    if ((ad.offsets[i].cwiseAbs().array() > ad.bounds).any()) {
      err.push_back(fmt::format("adaptation.offsets[{}] lies outside the parameter bounds", i));
    }
  }
  for (int k = 0; k < 5; ++k) positive(ad.Lambda[k], fmt::format("adaptation.Lambda[{}]", k));
  if (ad.noise < 0.0) err.push_back("adaptation.noise must be non-negative");
  if (ad.pe_window < 0.0) err.push_back("adaptation.pe_window must be non-negative");
  if (ad.pe_window == 0.0 && !(cfg.trajectory.omega_d > 0.0)) {
    err.push_back("adaptation.pe_window must be set when trajectory.omega_d is zero");
  }

  positive(cfg.deformation_interval, "output.deformation_interval");
  if (cfg.deformation_points < 2) err.push_back("output.deformation_points must be at least 2");
  return err;
}

LinkParams link_params(const LinkConfig& lc) {
  LinkParams p = LinkParams::rectangular(lc.rho, lc.E, lc.width, lc.height, lc.length);
  p.rigid = lc.rigid;
  return p;
}

Chain build_chain(const ScenarioConfig& cfg) {
  Chain chain;
  for (const auto& lc : cfg.links) chain.links.push_back(make_link_model(link_params(lc), cfg.modes));
  for (const auto& jc : cfg.joints) {
    chain.joints.push_back(JointSpec::from_projection(
        jc.parent, jc.projection, {jc.motor_inertia[0], jc.motor_inertia[1], jc.motor_inertia[2]}));
  }
  chain.g_eq = -cfg.gravity;
  chain.baumgarte = cfg.baumgarte;
  return chain;
}

GainSet build_gains(const ScenarioConfig& cfg) {
  GainSet g;
  g.K = cfg.K;
  g.saturation = cfg.saturation;
  std::vector<double> kp, kd;
  for (const auto& jc : cfg.joints) {
    const int n_free = static_cast<int>(std::lround(jc.projection.trace()));
    for (int m = 0; m < n_free; ++m) {
      kp.push_back(jc.Kp.empty() ? 0.0 : jc.Kp[m]);
      kd.push_back(jc.Kd.empty() ? 0.0 : jc.Kd[m]);
    }
  }
  g.Kp = Eigen::Map<VecX>(kp.data(), static_cast<Eigen::Index>(kp.size()));
  g.Kd = Eigen::Map<VecX>(kd.data(), static_cast<Eigen::Index>(kd.size()));
  return g;
}

TrajectorySpec effective_trajectory(const ScenarioConfig& cfg) {
  TrajectorySpec t = cfg.trajectory;
  t.t_f = cfg.t_f;
  t.L = 0.0;
  for (const auto& l : cfg.links) t.L += l.length;
  t.theta1y0 = cfg.initial_angles[0];
  t.theta1z0 = cfg.initial_angles[1];
  t.theta2z0 = cfg.initial_angles[2];
  return t;
}

std::vector<Vec5> true_parameters(const Chain& chain) {
  std::vector<Vec5> out;
  for (const auto& l : chain.links) out.push_back(l.truth.vec());
  return out;
}

std::vector<AdaptState> initial_adaptation(const ScenarioConfig& cfg, const Chain& chain) {
  std::vector<AdaptState> out;
  for (int i = 0; i < chain.n_links(); ++i) {
    const Vec5 s = chain.links[i].truth.vec();
    AdaptState a;
    const Vec5 off = i < static_cast<int>(cfg.adaptation.offsets.size()) ? cfg.adaptation.offsets[i] : Vec5::Zero();
    a.s_hat = s.cwiseProduct(Vec5::Ones() + off);
    a.bounds.lo = (1.0 - cfg.adaptation.bounds) * s;
    a.bounds.hi = (1.0 + cfg.adaptation.bounds) * s;
    a.Lambda = cfg.adaptation.Lambda;
    out.push_back(a);
  }
  return out;
}

std::vector<std::string> preset_names() {
  std::vector<std::string> out;
  for (const auto& p : embedded_presets()) out.push_back(p.name);
  return out;
}

std::string preset_text(const std::string& name) {
  for (const auto& p : embedded_presets()) {
    if (name == p.name) return p.text;
  }
  throw ConfigError({fmt::format("unknown preset '{}'", name)});
}

}  // namespace flexsim
