// Python bindings for the main operations: parameters, baselines, the ODE
// solver, age profiles, Monte Carlo, and cohort fitting.

#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "gomopt/baseline.hpp"
#include "gomopt/calibrate.hpp"
#include "gomopt/config.hpp"
#include "gomopt/errors.hpp"
#include "gomopt/hjb.hpp"
#include "gomopt/policy.hpp"
#include "gomopt/simulate.hpp"

namespace py = pybind11;
using namespace gomopt;

PYBIND11_MODULE(_core, mod) {
    mod.doc() = "Optimal consumption, healthcare, and investment under "
                "Gompertz mortality";

    py::register_exception<validation_error>(mod, "ValidationError");
    py::register_exception<convergence_error>(mod, "ConvergenceError");
    py::register_exception<parse_error>(mod, "ParseError");

    py::class_<ModelParams>(mod, "ModelParams")
        .def(py::init<>())
        .def(py::init<double, double, double, double, double, double, double,
                      double>(),
             py::arg("r"), py::arg("delta"), py::arg("beta"), py::arg("gamma"),
             py::arg("zeta"), py::arg("mu") = 0.0, py::arg("sigma") = 0.0,
             py::arg("m0") = 0.00019)
        .def_readonly("r", &ModelParams::r)
        .def_readonly("delta", &ModelParams::delta)
        .def_readonly("beta", &ModelParams::beta)
        .def_readonly("gamma", &ModelParams::gamma)
        .def_readonly("zeta", &ModelParams::zeta)
        .def_readonly("mu", &ModelParams::mu)
        .def_readonly("sigma", &ModelParams::sigma)
        .def_readonly("m0", &ModelParams::m0)
        .def("zeta_factor", &ModelParams::zeta_factor)
        .def("equivalent_safe_rate", &ModelParams::equivalent_safe_rate)
        .def("merton_fraction", &ModelParams::merton_fraction)
        .def("cbar", &ModelParams::cbar);

    py::class_<EfficacyModel>(mod, "EfficacyModel")
        .def_static("zero", &EfficacyModel::zero)
        .def_static("isoelastic", &EfficacyModel::isoelastic, py::arg("a"),
                    py::arg("q"))
        .def("value", &EfficacyModel::value)
        .def("marginal", &EfficacyModel::marginal)
        .def("inverse_marginal", &EfficacyModel::inverse_marginal);

    py::class_<GridSpec>(mod, "GridSpec")
        .def(py::init<>())
        .def_readwrite("m_min", &GridSpec::m_min)
        .def_readwrite("m_max", &GridSpec::m_max)
        .def_readwrite("n_points", &GridSpec::n_points)
        .def("nodes", &GridSpec::nodes);

    py::class_<PolicyCurve>(mod, "PolicyCurve")
        .def_readonly("m", &PolicyCurve::m)
        .def_readonly("u", &PolicyCurve::u)
        .def_readonly("du", &PolicyCurve::du)
        .def_readonly("h", &PolicyCurve::h)
        .def_readonly("residual", &PolicyCurve::residual)
        .def_readonly("beta_g", &PolicyCurve::beta_g)
        .def("__len__", &PolicyCurve::size);

    py::class_<AgeProfile>(mod, "AgeProfile")
        .def_readonly("ages", &AgeProfile::ages)
        .def_readonly("mortality", &AgeProfile::mortality)
        .def_readonly("consumption_rate", &AgeProfile::consumption_rate)
        .def_readonly("health_rate", &AgeProfile::health_rate)
        .def_readonly("health_share", &AgeProfile::health_share);

    py::class_<SimConfig>(mod, "SimConfig")
        .def(py::init<>())
        .def_readwrite("n_paths", &SimConfig::n_paths)
        .def_readwrite("horizon", &SimConfig::horizon)
        .def_readwrite("dt", &SimConfig::dt)
        .def_readwrite("seed", &SimConfig::seed)
        .def_readwrite("risky", &SimConfig::risky)
        .def_readwrite("x0", &SimConfig::x0)
        .def_readwrite("m_init", &SimConfig::m_init)
        .def_readwrite("threads", &SimConfig::threads);

    py::class_<SimOutcome>(mod, "SimOutcome")
        .def_readonly("welfare", &SimOutcome::welfare)
        .def_readonly("mean", &SimOutcome::mean)
        .def_readonly("std_err", &SimOutcome::std_err)
        .def_readonly("truncation_bound", &SimOutcome::truncation_bound)
        .def_readonly("n_deaths", &SimOutcome::n_deaths)
        .def_readonly("tau1", &SimOutcome::tau1);

    py::class_<FitResult>(mod, "FitResult")
        .def_readonly("values", &FitResult::values)
        .def_readonly("std_errors", &FitResult::std_errors)
        .def_readonly("loss", &FitResult::loss)
        .def_readonly("n_evals", &FitResult::n_evals)
        .def_readonly("converged", &FitResult::converged);

    py::class_<CohortTable>(mod, "CohortTable")
        .def(py::init<>())
        .def_readwrite("ages", &CohortTable::ages)
        .def_readwrite("hazards", &CohortTable::hazards)
        .def("__len__", &CohortTable::size);

    py::class_<SearchSpec>(mod, "SearchSpec")
        .def(py::init<>())
        .def_readwrite("a_min", &SearchSpec::a_min)
        .def_readwrite("a_max", &SearchSpec::a_max)
        .def_readwrite("q_min", &SearchSpec::q_min)
        .def_readwrite("q_max", &SearchSpec::q_max)
        .def_readwrite("max_iters", &SearchSpec::max_iters)
        .def_readwrite("restarts", &SearchSpec::restarts)
        .def_readwrite("seed", &SearchSpec::seed)
        .def_readwrite("grid_points", &SearchSpec::grid_points);

    mod.def("c0", &c0, py::arg("m"), py::arg("params"),
            "Constant-mortality consumption-wealth ratio");
    mod.def(
        "u0",
        [](double m, const ModelParams& p) { return u0(m, p); },
        py::arg("m"), py::arg("params"),
        "Aging, no-healthcare consumption-wealth ratio (quadrature form)");
    mod.def(
        "u0_gamma_form",
        [](double m, const ModelParams& p) { return u0_gamma_form(m, p); },
        py::arg("m"), py::arg("params"),
        "Same quantity through the incomplete-gamma representation");
    mod.def("upper_incomplete_gamma", &upper_incomplete_gamma, py::arg("s"),
            py::arg("z"));
    mod.def("beta_g", &beta_g, py::arg("params"), py::arg("efficacy"));
    mod.def("solve_u_star", &solve_u_star, py::arg("params"), py::arg("efficacy"),
            py::arg("grid") = GridSpec{}, py::arg("tol") = 1e-9,
            py::call_guard<py::gil_scoped_release>(),
            "Solve the full-model consumption ODE");
    mod.def(
        "controls",
        [](double m, const PolicyCurve& curve, const ModelParams& p,
           const EfficacyModel& e) {
            const auto ch = controls(m, curve, p, e);
            return py::make_tuple(ch.c, ch.h);
        },
        py::arg("m"), py::arg("curve"), py::arg("params"), py::arg("efficacy"),
        "Optimal (consumption, healthcare) rates at hazard m");
    mod.def("endogenous_mortality", &endogenous_mortality, py::arg("params"),
            py::arg("efficacy"), py::arg("curve"), py::arg("t0"), py::arg("t1"),
            py::arg("anchor_age"), py::arg("anchor_hazard"), py::arg("n_out") = 0);
    mod.def("value_function", &value_function, py::arg("x"), py::arg("m"),
            py::arg("curve"), py::arg("params"), py::arg("efficacy"));
    mod.def(
        "simulate_analytic",
        [](const ModelParams& p, const EfficacyModel& e, const PolicyCurve& curve,
           const SimConfig& cfg) {
            return simulate(p, e, PolicySpec::analytic(curve), cfg);
        },
        py::arg("params"), py::arg("efficacy"), py::arg("curve"),
        py::arg("config"), py::call_guard<py::gil_scoped_release>(),
        "Monte Carlo welfare under the analytic policy");
    mod.def(
        "simulate_constant",
        [](const ModelParams& p, const EfficacyModel& e, double c, double h,
           const SimConfig& cfg) {
            return simulate(p, e, PolicySpec::constant_rates(c, h), cfg);
        },
        py::arg("params"), py::arg("efficacy"), py::arg("c"), py::arg("h"),
        py::arg("config"), py::call_guard<py::gil_scoped_release>(),
        "Monte Carlo welfare under constant spending rates");
    mod.def("load_cohort_csv", &load_cohort_csv, py::arg("path"),
            py::arg("cohort_year") = 0);
    mod.def("fit_gompertz", &fit_gompertz, py::arg("table"),
            py::arg("anchor_age") = 0.0);
    mod.def("fit_efficacy", &fit_efficacy, py::arg("table_late"), py::arg("beta"),
            py::arg("m0"), py::arg("params"), py::arg("search") = SearchSpec{},
            py::call_guard<py::gil_scoped_release>());
    mod.def(
        "load_config",
        [](const std::string& path) {
            const auto cfg = load_config(path);
            return py::make_tuple(cfg.params, cfg.efficacy);
        },
        py::arg("path"), "Parse a key=value config file into (params, efficacy)");
}
