#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>
#include <sstream>

#include "support.hpp"

using namespace flexsim;
using namespace testing_support;

namespace {

bool mentions(const std::vector<std::string>& errs, const std::string& needle) {
  return std::any_of(errs.begin(), errs.end(), [&](const auto& e) { return e.find(needle) != std::string::npos; });
}

std::vector<std::string> parse_errors(const std::string& text) {
  try {
    parse_scenario(text);
  } catch (const ConfigError& e) {
    return e.errors();
  }
  return {};
}

std::string replace(std::string text, const std::string& from, const std::string& to) {
  const auto pos = text.find(from);
  EXPECT_NE(pos, std::string::npos) << from;
  return text.replace(pos, from.size(), to);
}

}  // namespace

TEST(Presets, AllParseAndValidate) {
  const auto names = preset_names();
  EXPECT_EQ(names, (std::vector<std::string>{"nominal", "adaptive", "ptc", "pd", "compare"}));
  for (const auto& n : names) {
    const ScenarioConfig cfg = preset(n);
    EXPECT_TRUE(validate_scenario(cfg).empty()) << n;
  }
  EXPECT_EQ(preset("ptc").controller, ControllerKind::Ptc);
  EXPECT_EQ(preset("pd").controller, ControllerKind::Pd);
  EXPECT_EQ(preset("adaptive").controller, ControllerKind::SlpcAdaptive);
  EXPECT_EQ(preset("compare").compare.size(), 3u);
  EXPECT_THROW(preset_text("missing"), std::exception);
}

TEST(Presets, ConfigFilesMatchEmbeddedText) {
  for (const auto& n : preset_names()) {
    std::ifstream in(std::string(FLEXSIM_CONFIG_DIR) + "/" + n + ".yaml");
    ASSERT_TRUE(in) << n;
    std::stringstream ss;
    ss << in.rdbuf();
    EXPECT_EQ(ss.str(), preset_text(n)) << n;
  }
}

TEST(Presets, NominalValues) {
  const ScenarioConfig cfg = preset("nominal");
  ASSERT_EQ(cfg.links.size(), 2u);
  EXPECT_DOUBLE_EQ(cfg.links[0].length, 1.2);
  EXPECT_DOUBLE_EQ(cfg.links[1].height, 0.05);
  EXPECT_DOUBLE_EQ(cfg.dt, 1e-3);
  EXPECT_DOUBLE_EQ(cfg.t_f, 25.0);
  EXPECT_DOUBLE_EQ(cfg.saturation, 100.0);
  EXPECT_DOUBLE_EQ(cfg.K[0](1, 1), 300.0);
  EXPECT_DOUBLE_EQ(cfg.K[1](2, 2), 200.0);
  EXPECT_DOUBLE_EQ(cfg.K[1](5, 5), 0.0);
  EXPECT_EQ(cfg.modes.bending, 3);
  EXPECT_EQ(cfg.modes.axial, 1);
}

TEST(Validate, RejectsBadBounds) {
  for (double b : {-0.2, 0.0, 1.0, 1.5}) {
    ScenarioConfig cfg = preset("adaptive");
    cfg.adaptation.bounds = b;
    EXPECT_TRUE(mentions(validate_scenario(cfg), "adaptation.bounds")) << b;
  }
  const auto errs = parse_errors(replace(preset_text("nominal"), "bounds: 0.20", "bounds: -0.20"));
  EXPECT_TRUE(errs.empty());
  EXPECT_TRUE(mentions(validate_scenario(parse_scenario(replace(preset_text("nominal"), "bounds: 0.20", "bounds: -0.20"))),
                       "s_l < s_h"));
}

TEST(Validate, RejectsNonSymmetricGain) {
  ScenarioConfig cfg = preset("nominal");
  cfg.K[0](0, 1) = 1.0;
  EXPECT_TRUE(mentions(validate_scenario(cfg), "gains.K[0] must be symmetric"));
  cfg = preset("nominal");
  cfg.K[1](2, 2) = -1.0;
  EXPECT_TRUE(mentions(validate_scenario(cfg), "gains.K[1] must be positive semidefinite"));
}

TEST(Validate, ReportsEveryProblem) {
  ScenarioConfig cfg = preset("nominal");
  cfg.dt = 0.0;
  cfg.links[1].E = -1.0;
  cfg.joints.pop_back();
  const auto errs = validate_scenario(cfg);
  EXPECT_TRUE(mentions(errs, "integration.dt"));
  EXPECT_TRUE(mentions(errs, "links[1].E"));
  EXPECT_TRUE(mentions(errs, "joints: expected 2"));
}

TEST(Parse, MalformedYamlThrows) {
  EXPECT_THROW(parse_scenario("links: [1, 2"), ConfigError);
  EXPECT_THROW(parse_scenario("- just\n- a list\n"), ConfigError);
  EXPECT_TRUE(mentions(parse_errors("links: [1, 2"), "yaml"));
}

TEST(Parse, MissingAndMistypedKeys) {
  const std::string text = preset_text("nominal");
  EXPECT_TRUE(mentions(parse_errors(replace(text, "rho: 7800.0, ", "")), "links[0].rho: missing"));
  EXPECT_TRUE(mentions(parse_errors(replace(text, "dt: 1.0e-3", "dt: fast")), "integration.dt: wrong type"));
  EXPECT_TRUE(mentions(parse_errors(replace(text, "controller: slpc", "controller: lqr")), "unknown controller"));
  EXPECT_TRUE(mentions(parse_errors(replace(text, "ik: closed-form", "ik: newton")), "trajectory.ik"));
}

TEST(Parse, WrongCounts) {
  const std::string text = preset_text("nominal");
  EXPECT_TRUE(mentions(parse_errors(replace(text, "[0.0, 0.0, 200.0, 0.0, 0.0, 0.0]", "[0.0, 200.0]")), "gains.K[1]"));
  EXPECT_TRUE(mentions(parse_errors(replace(text, "Lambda: [5.0e5, 1.0e3, 1.0e3, 10.0, 100.0]", "Lambda: [5.0e5]")),
                       "adaptation.Lambda: expected 5 entries, got 1"));
  EXPECT_TRUE(mentions(parse_errors(replace(text, "initial_angles: [0.0, ", "initial_angles: [")), "initial_angles"));
}

TEST(Parse, LoadScenarioReadsFiles) {
  const ScenarioConfig cfg = load_scenario(std::string(FLEXSIM_CONFIG_DIR) + "/ptc.yaml");
  EXPECT_EQ(cfg.controller, ControllerKind::Ptc);
  EXPECT_THROW(load_scenario("/nonexistent/scenario.yaml"), ConfigError);
}

TEST(BuildChain, MirrorsConfig) {
  const ScenarioConfig cfg = preset("nominal");
  const Chain chain = build_chain(cfg);
  ASSERT_EQ(chain.links.size(), 2u);
  EXPECT_EQ(chain.links[0].n(), 7);
  EXPECT_EQ(chain.joints[0].n_free(), 2);
  EXPECT_EQ(chain.joints[1].n_free(), 1);
  const auto truth = true_parameters(chain);
  EXPECT_NEAR(truth[0][0], 7800.0 * 0.01 * 0.03, 1e-12);
  EXPECT_NEAR(chain.links[1].truth.EIz, 2.1875e4, 1e-8);
  EXPECT_NEAR(chain.links[1].truth.EIy, 875.0, 1e-9);
  EXPECT_DOUBLE_EQ(link_params(cfg.links[1]).l(), 1.0);
}
