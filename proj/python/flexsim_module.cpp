#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>

#include "flexsim/sim.hpp"

namespace py = pybind11;

namespace {

flexsim::ScenarioConfig checked(const std::string& yaml_text) {
  auto cfg = flexsim::parse_scenario(yaml_text);
  const auto errs = flexsim::validate_scenario(cfg);
  if (!errs.empty()) throw flexsim::ConfigError(errs);
  return cfg;
}

py::dict trace_dict(const flexsim::RunTrace& tr) {
  py::dict d;
  d["t"] = tr.t;
  d["tracking_error"] = tr.tracking_error;
  d["max_torque"] = tr.max_torque;
  d["constraint_residual"] = tr.constraint_residual;
  d["sum_p"] = tr.sum_p;
  d["V_total"] = tr.V_total;
  d["elastic_energy"] = tr.elastic_energy;
  return d;
}

}  // namespace

PYBIND11_MODULE(_flexsim, m) {
  m.doc() = "Flexible multibody manipulator simulation core.";

  py::register_exception<flexsim::ConfigError>(m, "ConfigError", PyExc_ValueError);

  m.def("preset_names", &flexsim::preset_names);
  m.def("preset_text", &flexsim::preset_text, py::arg("name"));
  m.def(
      "validate",
      [](const std::string& text) {
        try {
          return flexsim::validate_scenario(flexsim::parse_scenario(text));
        } catch (const flexsim::ConfigError& e) {
          return e.errors();
        }
      },
      py::arg("yaml_text"), "List of problems in a scenario, empty when valid.");
  m.def(
      "log_columns", [](const std::string& text) { return flexsim::log_columns(flexsim::build_chain(checked(text))); },
      py::arg("yaml_text"));

  // Returns (summary JSON text, trace dict); the trace is empty unless keep_trace.
  m.def(
      "run",
      [](const std::string& text, const std::string& out_dir, std::optional<double> t_f, std::optional<unsigned> seed,
         bool keep_trace) {
        auto cfg = checked(text);
        if (t_f) cfg.t_f = *t_f;
        if (seed) cfg.seed = *seed;
        const auto errs = flexsim::validate_scenario(cfg);
        if (!errs.empty()) throw flexsim::ConfigError(errs);
        flexsim::RunOptions opt;
        opt.out_dir = out_dir;
        opt.keep_trace = keep_trace;
        flexsim::RunResult r;
        {
          py::gil_scoped_release release;
          r = flexsim::run_scenario(cfg, opt);
        }
        return py::make_tuple(flexsim::summary_json(r.summary), trace_dict(r.trace));
      },
      py::arg("yaml_text"), py::arg("out_dir") = "", py::arg("t_f") = py::none(), py::arg("seed") = py::none(),
      py::arg("keep_trace") = false);
}
