// Python bindings for the main operations.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "evadesos/cli.hpp"
#include "evadesos/verify.hpp"

namespace py = pybind11;
using namespace evadesos;

PYBIND11_MODULE(_core, m) {
  m.doc() = "Density-function certificates for reach-avoid pursuit-evasion";
  m.attr("__version__") = kToolkitVersion;

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<InfeasibleError>(m, "InfeasibleError");
  py::register_exception<TooLargeError>(m, "TooLargeError");
  py::register_exception<SolverFailure>(m, "SolverFailure");

  py::class_<EnvironmentConfig>(m, "EnvironmentConfig")
      .def(py::init<>())
      .def_readwrite("R", &EnvironmentConfig::R)
      .def_readwrite("R_ie", &EnvironmentConfig::R_ie)
      .def_readwrite("R_ip", &EnvironmentConfig::R_ip)
      .def_readwrite("R_a", &EnvironmentConfig::R_a)
      .def_readwrite("R_r", &EnvironmentConfig::R_r)
      .def_readwrite("x_r", &EnvironmentConfig::x_r)
      .def_readwrite("x_ie", &EnvironmentConfig::x_ie)
      .def_readwrite("x_ip", &EnvironmentConfig::x_ip)
      .def_readwrite("u_max", &EnvironmentConfig::u_max)
      .def_readwrite("w_max", &EnvironmentConfig::w_max)
      .def_readwrite("alpha", &EnvironmentConfig::alpha)
      .def_readwrite("d_rho", &EnvironmentConfig::d_rho)
      .def_readwrite("d_psi", &EnvironmentConfig::d_psi)
      .def_readwrite("d_sigma", &EnvironmentConfig::d_sigma)
      .def_readwrite("d_lambda", &EnvironmentConfig::d_lambda)
      .def_readwrite("d_y", &EnvironmentConfig::d_y)
      .def_readwrite("bound_band", &EnvironmentConfig::bound_band)
      .def_readwrite("epsilon_strict", &EnvironmentConfig::epsilon_strict)
      .def("validate", &EnvironmentConfig::validate)
      .def("__str__", &format_config);
  m.def("parse_config", &parse_config, py::arg("text"));
  m.def("load_config", &load_config, py::arg("path"));

  py::class_<ProgramSize>(m, "ProgramSize")
      .def_readonly("rows", &ProgramSize::rows)
      .def_readonly("free_vars", &ProgramSize::free_vars)
      .def_readonly("blocks", &ProgramSize::blocks)
      .def_readonly("max_side", &ProgramSize::max_side)
      .def("fits_internal", &ProgramSize::fits_internal);
  m.def("program_size", [](const EnvironmentConfig& cfg) { return program_size(build_program(cfg)); });
  m.def("export_sdpa", [](const EnvironmentConfig& cfg) { return export_sdpa(compile(build_program(cfg).prog)); },
        "SDPA sparse text of the synthesis program");

  py::class_<Certificate>(m, "Certificate")
      .def_readonly("cfg", &Certificate::cfg)
      .def_readonly("alpha", &Certificate::alpha)
      .def_readonly("manifest", &Certificate::manifest)
      .def_readonly("solver_report", &Certificate::solver_report)
      .def("rho", [](const Certificate& c, const State& x) { return c.rho_hat.evaluate(x); })
      .def("psi", [](const Certificate& c, const State& x) { return c.psi_hat.evaluate(x); })
      .def("to_text", &Certificate::to_text)
      .def_static("from_text", &Certificate::from_text)
      .def("save", [](const Certificate& c, const std::string& p) { save_certificate(c, p); });
  m.def("load_certificate", &load_certificate, py::arg("path"));
  m.def(
      "synthesize", [](const EnvironmentConfig& cfg, bool verbose) { return synthesize(cfg, verbose).cert; },
      py::arg("cfg"), py::arg("verbose") = false, py::call_guard<py::gil_scoped_release>());

  m.def(
      "verify",
      [](const Certificate& c, std::size_t n, std::uint64_t seed) {
        const VerificationReport r = check_certificate(c, n, seed);
        return py::make_tuple(r.overall, r.to_text());
      },
      py::arg("cert"), py::arg("samples") = 10000, py::arg("seed") = 1, "(overall, report text)");

  m.def(
      "simulate",
      [](const Certificate& c, const std::string& strategy, std::optional<State> x0, double dt, double t_max) {
        SimConfig sc;
        sc.strategy = parse_strategy(strategy);
        sc.x0 = x0 ? *x0 : State{c.cfg.x_ie[0], c.cfg.x_ie[1], c.cfg.x_ip[0], c.cfg.x_ip[1]};
        sc.dt = dt;
        sc.t_max = t_max;
        Trace tr = run(c, sc);
        tr.manifest = c.manifest;
        return py::make_tuple(to_string(tr.outcome), tr.min_dist(), tr.to_csv());
      },
      py::arg("cert"), py::arg("strategy") = "tail-chasing", py::arg("x0") = py::none(), py::arg("dt") = 0.1,
      py::arg("t_max") = 2000.0, "(outcome, min distance, trace CSV)");

  m.def(
      "main",
      [](std::vector<std::string> args) {
        args.insert(args.begin(), "evadesos");
        std::vector<const char*> argv;
        for (const auto& a : args) argv.push_back(a.c_str());
        return run_cli(static_cast<int>(argv.size()), argv.data());
      },
      py::arg("args"), "Runs the command line and returns its exit code");
}
