#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "support.hpp"

using namespace flexsim;
using namespace testing_support;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("flexsim_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> lines(const fs::path& p) {
  std::vector<std::string> out;
  std::ifstream in(p);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

size_t fields(const std::string& row) { return std::count(row.begin(), row.end(), ',') + 1; }

int cli(const std::string& args) {
  const int rc = std::system((std::string(FLEXSIM_EXE) + " " + args + " > /dev/null 2>&1").c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

}  // namespace

TEST(Run, ZeroDurationWritesHeaders) {
  ScenarioConfig cfg = preset("nominal");
  cfg.t_f = 0.0;
  const fs::path out = scratch("zero");
  RunOptions opt;
  opt.out_dir = out.string();
  const RunResult r = run_scenario(cfg, opt);
  EXPECT_EQ(r.summary.exit_code, 0);
  const auto log = lines(out / "log.csv");
  ASSERT_GE(log.size(), 2u);
  EXPECT_EQ(log[0], std::string("# schema: ") + kLogSchema);
  EXPECT_EQ(fields(log[1]), log_columns(build_chain(cfg)).size());
  EXPECT_LE(log.size(), 3u);
  const auto defo = lines(out / "deformation.csv");
  ASSERT_GE(defo.size(), 2u);
  EXPECT_EQ(defo[0], std::string("# schema: ") + kDeformationSchema);
  EXPECT_EQ(defo[1], "t,link,xi,rx,ry,rz");
  EXPECT_TRUE(fs::exists(out / "summary.json"));
}

TEST(Run, ShortRunIsDeterministicAndWellFormed) {
  ScenarioConfig cfg = preset("adaptive");
  cfg.t_f = 0.05;
  cfg.adaptation.noise = 0.01;
  const fs::path a = scratch("det_a"), b = scratch("det_b");
  RunOptions opt;
  opt.out_dir = a.string();
  const RunResult ra = run_scenario(cfg, opt);
  opt.out_dir = b.string();
  run_scenario(cfg, opt);
  EXPECT_EQ(slurp(a / "log.csv"), slurp(b / "log.csv"));
  EXPECT_EQ(slurp(a / "deformation.csv"), slurp(b / "deformation.csv"));

  const auto log = lines(a / "log.csv");
  const size_t ncol = log_columns(build_chain(cfg)).size();
  ASSERT_GT(log.size(), 40u);
  for (size_t k = 1; k < log.size(); ++k) EXPECT_EQ(fields(log[k]), ncol) << k;
  EXPECT_EQ(ra.trace.t.size(), static_cast<size_t>(ra.summary.samples));
  EXPECT_LT(ra.summary.max_constraint_residual, 1e-6);

  const auto j = nlohmann::json::parse(slurp(a / "summary.json"));
  for (const char* key : {"name", "controller", "seed", "dt", "t_f", "samples", "exit_code", "max_abs_torque",
                          "peak_tip_deformation", "max_constraint_residual", "telescoping_violations", "alpha",
                          "rms_tracking", "adaptive"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
  EXPECT_EQ(j["adaptive"]["settle_time_5pct"].size(), 2u);
}

TEST(Run, SeedChangesNoisyRun) {
  ScenarioConfig cfg = preset("adaptive");
  cfg.t_f = 0.02;
  cfg.adaptation.noise = 0.05;
  const RunResult a = run_scenario(cfg);
  cfg.seed = 2;
  const RunResult b = run_scenario(cfg);
  bool differs = false;
  for (int i = 0; i < 2; ++i) differs = differs || a.trace.s_hat[i].back() != b.trace.s_hat[i].back();
  EXPECT_TRUE(differs);
}

TEST(Run, CompareWritesOneDirectoryPerController) {
  ScenarioConfig cfg = preset("compare");
  cfg.t_f = 0.02;
  const fs::path out = scratch("compare");
  RunOptions opt;
  opt.out_dir = out.string();
  const auto results = run_compare(cfg, opt);
  ASSERT_EQ(results.size(), 3u);
  for (const char* c : {"slpc", "ptc", "pd"}) {
    EXPECT_TRUE(fs::exists(out / c / "log.csv")) << c;
    EXPECT_TRUE(fs::exists(out / c / "summary.json")) << c;
  }
  EXPECT_EQ(results[1].summary.controller, "ptc");
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(cli("presets"), 0);
  EXPECT_EQ(cli("validate --preset nominal"), 0);
  EXPECT_EQ(cli(std::string("validate ") + FLEXSIM_CONFIG_DIR + "/adaptive.yaml"), 0);
  const fs::path bad = scratch("bad.yaml");
  std::ofstream(bad) << "links: [1, 2";
  EXPECT_EQ(cli("validate " + bad.string()), 2);
  EXPECT_EQ(cli("validate /nonexistent.yaml"), 2);
  EXPECT_EQ(cli("run --preset nominal --dt -1"), 2);
  EXPECT_EQ(cli("run --bogus"), 2);
  const fs::path out = scratch("cli");
  EXPECT_EQ(cli("run --preset ptc --tf 0.01 --out " + out.string()), 0);
  EXPECT_TRUE(fs::exists(out / "log.csv"));
}
