#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "flexsim/sim.hpp"

namespace {

struct Source {
  std::string path;
  std::string preset;
};

flexsim::ScenarioConfig load(const Source& src) {
  if (!src.preset.empty()) return flexsim::parse_scenario(flexsim::preset_text(src.preset));
  if (src.path.empty()) throw flexsim::ConfigError({"give a config file or --preset"});
  return flexsim::load_scenario(src.path);
}

int report_config_errors(const flexsim::ConfigError& e) {
  for (const auto& msg : e.errors()) std::cerr << "config error: " << msg << "\n";
  return 2;
}

void print_summary(const flexsim::RunSummary& s) {
  std::cout << fmt::format("{} [{}]: {} samples, max |tau| {:.3g} N m, rms tracking {:.3g} rad, residual {:.2g}, "
                           "{:.1f} s",
                           s.name, s.controller, s.samples, s.max_abs_torque, s.rms_tracking,
                           s.max_constraint_residual, s.wall_time)
            << "\n";
  if (s.exit_code != 0) std::cerr << "numerical failure: " << s.error << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Flexible manipulator simulator"};
  app.require_subcommand(1);

  Source run_src, val_src;
  std::string out_dir = "out";
  std::optional<unsigned> seed;
  std::optional<double> dt, tf;

  auto* run = app.add_subcommand("run", "Run a scenario");
  run->add_option("config", run_src.path, "Scenario file (YAML)");
  run->add_option("--preset", run_src.preset, "Embedded preset")
      ->check(CLI::IsMember({"nominal", "adaptive", "ptc", "pd", "compare"}));
  run->add_option("--out", out_dir, "Output directory");
  run->add_option("--seed", seed, "Random seed");
  run->add_option("--dt", dt, "Time step override [s]");
  run->add_option("--tf", tf, "Final time override [s]");

  auto* val = app.add_subcommand("validate", "Check a scenario without running it");
  val->add_option("config", val_src.path, "Scenario file (YAML)");
  val->add_option("--preset", val_src.preset, "Embedded preset")
      ->check(CLI::IsMember({"nominal", "adaptive", "ptc", "pd", "compare"}));

  auto* list = app.add_subcommand("presets", "List embedded presets");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  if (list->parsed()) {
    for (const auto& n : flexsim::preset_names()) std::cout << n << "\n";
    return 0;
  }

  if (val->parsed()) {
    try {
      const auto cfg = load(val_src);
      const auto errs = flexsim::validate_scenario(cfg);
      if (!errs.empty()) throw flexsim::ConfigError(errs);
      std::cout << "OK\n";
      return 0;
    } catch (const flexsim::ConfigError& e) {
      return report_config_errors(e);
    }
  }

  flexsim::ScenarioConfig cfg;
  try {
    cfg = load(run_src);
    if (seed) cfg.seed = *seed;
    if (dt) cfg.dt = *dt;
    if (tf) cfg.t_f = *tf;
    const auto errs = flexsim::validate_scenario(cfg);
    if (!errs.empty()) throw flexsim::ConfigError(errs);
  } catch (const flexsim::ConfigError& e) {
    return report_config_errors(e);
  }

  flexsim::RunOptions opt;
  opt.out_dir = out_dir;
  opt.keep_trace = false;
  int code = 0;
  try {
    if (!cfg.compare.empty()) {
      for (const auto& r : flexsim::run_compare(cfg, opt)) {
        print_summary(r.summary);
        code = std::max(code, r.summary.exit_code);
      }
    } else {
      const auto r = flexsim::run_scenario(cfg, opt);
      print_summary(r.summary);
      code = r.summary.exit_code;
    }
  } catch (const flexsim::ConfigError& e) {
    return report_config_errors(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return code;
}
