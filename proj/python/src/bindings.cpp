// Python bindings: presets, the series solution and complete runs driven by
// the same key = value settings as the config files.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <vector>

#include "biotfs/runner.hpp"

namespace py = pybind11;
using namespace biotfs;

namespace {

// Copies a list of equally sized vectors into a 2D array (levels x dofs).
py::array_t<double> to_array(const std::vector<std::vector<double>>& levels) {
  const py::ssize_t rows = static_cast<py::ssize_t>(levels.size());
  const py::ssize_t cols = rows > 0 ? static_cast<py::ssize_t>(levels.front().size()) : 0;
  py::array_t<double> out({rows, cols});
  auto view = out.mutable_unchecked<2>();
  for (py::ssize_t i = 0; i < rows; ++i) {
    for (py::ssize_t j = 0; j < cols; ++j) view(i, j) = levels[i][j];
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Fixed-stress and parallel-in-time fixed-stress splitting for Mandel's problem";

  py::class_<MaterialParams>(m, "Material")
      .def_readonly("youngs_modulus", &MaterialParams::youngs_modulus)
      .def_readonly("poisson_ratio", &MaterialParams::poisson_ratio)
      .def_readonly("biot_coefficient", &MaterialParams::biot_coefficient)
      .def_readonly("biot_modulus", &MaterialParams::biot_modulus)
      .def_readonly("permeability", &MaterialParams::permeability)
      .def_readonly("viscosity", &MaterialParams::viscosity)
      .def_readonly("skempton", &MaterialParams::skempton)
      .def_property_readonly("lame_lambda", &MaterialParams::lame_lambda)
      .def_property_readonly("shear_modulus", &MaterialParams::shear_modulus)
      .def_property_readonly("l_phys", &MaterialParams::l_phys)
      .def_property_readonly("l_min", &MaterialParams::l_min)
      .def_property_readonly("undrained_poisson_ratio", &MaterialParams::undrained_poisson_ratio)
      .def_property_readonly("diffusivity", &MaterialParams::diffusivity);

  py::class_<MandelParams>(m, "MandelParams")
      .def_readonly("a", &MandelParams::a)
      .def_readonly("b", &MandelParams::b)
      .def_readonly("force", &MandelParams::force)
      .def_readonly("material", &MandelParams::material);

  m.def("mandel_preset", &mandel_preset, py::arg("name"));
  m.def("preset_names", &mandel_preset_names);
  m.def("theoretical_rate", &theoretical_rate, py::arg("material"), py::arg("stabilization"),
        "L / (1/beta + L)");

  py::class_<MandelSolution>(m, "MandelSolution")
      .def(py::init<const MandelParams&>(), py::arg("params"))
      .def("pressure", &MandelSolution::pressure, py::arg("x"), py::arg("t"))
      .def("displacement", &MandelSolution::displacement, py::arg("x"), py::arg("y"), py::arg("t"))
      .def("plate_displacement", &MandelSolution::plate_displacement, py::arg("t"))
      .def_property_readonly("initial_pressure", &MandelSolution::initial_pressure)
      .def_property_readonly("roots", &MandelSolution::roots);

  py::class_<RunConfig>(m, "RunConfig")
      .def(py::init<>())
      .def_static("from_text", &parse_config, py::arg("text"))
      .def(
          "set",
          [](RunConfig& cfg, const std::string& key, const std::string& value) {
            apply_setting(cfg, key, value);
          },
          py::arg("key"), py::arg("value"), "apply one config setting, e.g. set('nu', '0.4')")
      .def("validate", &RunConfig::validate)
      .def_readonly("preset", &RunConfig::preset)
      .def_readonly("mandel", &RunConfig::mandel)
      .def_readwrite("nx", &RunConfig::nx)
      .def_readwrite("ny", &RunConfig::ny)
      .def_readwrite("tau", &RunConfig::tau)
      .def_readwrite("total_time", &RunConfig::total_time)
      .def_readwrite("workers", &RunConfig::workers)
      .def_readwrite("max_iter", &RunConfig::max_iter)
      .def_readwrite("tol", &RunConfig::tol)
      .def_property(
          "method", [](const RunConfig& c) { return std::string(to_string(c.method)); },
          [](RunConfig& c, const std::string& v) { apply_setting(c, "method", v); })
      .def_property_readonly("steps", &RunConfig::steps);

  py::class_<RunOutcome>(m, "RunOutcome")
      .def_property_readonly("method",
                             [](const RunOutcome& r) { return std::string(to_string(r.result.report.method)); })
      .def_property_readonly("converged", [](const RunOutcome& r) { return r.result.report.converged; })
      .def_property_readonly("iterations",
                             [](const RunOutcome& r) { return r.result.report.iteration_count; })
      .def_property_readonly("mean_step_iterations",
                             [](const RunOutcome& r) { return r.result.report.mean_step_iterations; })
      .def_property_readonly("step_iterations",
                             [](const RunOutcome& r) { return r.result.report.step_iterations; })
      .def_property_readonly("theoretical_rate",
                             [](const RunOutcome& r) { return r.result.report.theoretical_rate; })
      .def_property_readonly("observed_rates",
                             [](const RunOutcome& r) {
                               std::vector<double> rates;
                               for (const auto& rec : r.result.report.iterations) {
                                 if (rec.observed_rate_l2) rates.push_back(*rec.observed_rate_l2);
                               }
                               return rates;
                             })
      .def_property_readonly("failure", [](const RunOutcome& r) { return r.result.report.failure; })
      .def_property_readonly("warnings", [](const RunOutcome& r) { return r.result.report.warnings; })
      .def_readonly("stabilization", &RunOutcome::stabilization)
      .def_property_readonly("times",
                             [](const RunOutcome& r) {
                               std::vector<double> t;
                               for (int n = 0; n <= r.result.state.steps; ++n) t.push_back(r.result.state.time(n));
                               return t;
                             })
      .def_property_readonly("pressure", [](const RunOutcome& r) { return to_array(r.result.state.p); })
      .def_property_readonly("displacement",
                             [](const RunOutcome& r) { return to_array(r.result.state.u); })
      .def("pressure_at",
           [](const RunOutcome& r, double x, double y, int level) {
             return evaluate_pressure(r.setup.mesh, r.result.state.p.at(level), x, y);
           },
           py::arg("x"), py::arg("y"), py::arg("level"))
      .def("displacement_at",
           [](const RunOutcome& r, double x, double y, int level) {
             return evaluate_displacement(r.setup.mesh, r.result.state.u.at(level), x, y);
           },
           py::arg("x"), py::arg("y"), py::arg("level"))
      .def("probe", [](const RunOutcome& r, double x) {
             return mandel_cryer_profile(r.setup.mesh, r.result.state, x);
           },
           py::arg("x"), "pressure at (x, 0) for every time level");

  m.def("run", &run, py::arg("config"), py::call_guard<py::gil_scoped_release>(),
        "run the configured splitting; solver failures are reported, not raised");

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
}
