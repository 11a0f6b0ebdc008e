#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "latwave/dispersion.hpp"
#include "latwave/envelope.hpp"
#include "latwave/lattice.hpp"
#include "latwave/lyapunov.hpp"
#include "latwave/model.hpp"
#include "latwave/profile.hpp"

namespace py = pybind11;
using namespace latwave;

PYBIND11_MODULE(_core, m) {
    m.doc() = "traveling waves for a 2-D lattice SIR model: dispersion relation, "
              "upper/lower envelopes, integral fixed-point profile solver, "
              "Lyapunov functional, direct lattice simulation";

    py::class_<ModelParams>(m, "ModelParams")
        .def(py::init([](double d1, double d2, double d3, double Lambda, double beta,
                         double alpha, double mu1, double mu2, double gamma, double theta) {
                 ModelParams p{d1, d2, d3, Lambda, beta, alpha, mu1, mu2, gamma, theta};
                 return p;
             }),
             py::arg("d1") = 1.0, py::arg("d2") = 1.0, py::arg("d3") = 1.0,
             py::arg("Lambda") = 1.0, py::arg("beta") = 2.0, py::arg("alpha") = 1.0,
             py::arg("mu1") = 1.0, py::arg("mu2") = 1.0, py::arg("gamma") = 0.5,
             py::arg("theta") = 0.0)
        .def_readwrite("d1", &ModelParams::d1)
        .def_readwrite("d2", &ModelParams::d2)
        .def_readwrite("d3", &ModelParams::d3)
        .def_readwrite("Lambda", &ModelParams::Lambda)
        .def_readwrite("beta", &ModelParams::beta)
        .def_readwrite("alpha", &ModelParams::alpha)
        .def_readwrite("mu1", &ModelParams::mu1)
        .def_readwrite("mu2", &ModelParams::mu2)
        .def_readwrite("gamma", &ModelParams::gamma)
        .def_readwrite("theta", &ModelParams::theta);

    py::class_<Equilibria>(m, "Equilibria")
        .def_readonly("S0", &Equilibria::S0)
        .def_readonly("R0", &Equilibria::R0)
        .def_readonly("S_star", &Equilibria::S_star)
        .def_readonly("I_star", &Equilibria::I_star)
        .def_readonly("endemic", &Equilibria::endemic)
        .def_readonly("residual_S", &Equilibria::residual_S)
        .def_readonly("residual_I", &Equilibria::residual_I);

    m.def("validate_params", &validate_params, py::arg("params"),
          py::arg("profile_mode") = false);
    m.def("disease_free_equilibrium", &disease_free_equilibrium);
    m.def("basic_reproduction", &basic_reproduction);
    m.def("endemic_equilibrium", [](const ModelParams& p) {
        double S, I;
        endemic_equilibrium(p, S, I);
        return py::make_tuple(S, I);
    });
    m.def("equilibria", &equilibria);

    py::class_<CriticalPair>(m, "CriticalPair")
        .def_readonly("c_star", &CriticalPair::c_star)
        .def_readonly("lambda_star", &CriticalPair::lambda_star)
        .def_readonly("min_value", &CriticalPair::min_value)
        .def_readonly("dlambda_value", &CriticalPair::dlambda_value);

    py::class_<RootPair>(m, "RootPair")
        .def_readonly("lambda1", &RootPair::lambda1)
        .def_readonly("lambda2", &RootPair::lambda2);

    m.def("delta", &delta, py::arg("params"), py::arg("c"), py::arg("lam"));
    m.def("delta_dlambda", &delta_dlambda, py::arg("params"), py::arg("c"), py::arg("lam"));
    m.def("delta_min", &delta_min);
    m.def("delta_argmin", &delta_argmin);
    m.def("find_critical", &find_critical);
    m.def("find_roots", py::overload_cast<const ModelParams&, double>(&find_roots));
    m.def("classify_speed",
          [](const ModelParams& p, double c) { return std::string(to_string(classify_speed(p, c))); });

    py::class_<EnvelopeParams>(m, "EnvelopeParams")
        .def_readonly("I0", &EnvelopeParams::I0)
        .def_readonly("M1", &EnvelopeParams::M1)
        .def_readonly("M2", &EnvelopeParams::M2)
        .def_readonly("eps1", &EnvelopeParams::eps1)
        .def_readonly("eps2", &EnvelopeParams::eps2)
        .def_readonly("knot1", &EnvelopeParams::knot1)
        .def_readonly("knot2", &EnvelopeParams::knot2)
        .def_readonly("lambda1", &EnvelopeParams::lambda1);

    m.def("select_envelope", &select_envelope);
    m.def("upper_S", &upper_S);
    m.def("upper_I", &upper_I);
    m.def("lower_S", &lower_S);
    m.def("lower_I", &lower_I);

    py::class_<InequalityStats>(m, "InequalityStats")
        .def_readonly("min_residual", &InequalityStats::min_residual)
        .def_readonly("max_residual", &InequalityStats::max_residual)
        .def_readonly("violations", &InequalityStats::violations)
        .def_readonly("worst_xi", &InequalityStats::worst_xi)
        .def_readonly("worst_value", &InequalityStats::worst_value);

    py::class_<CertificateReport>(m, "CertificateReport")
        .def_readonly("a", &CertificateReport::a)
        .def_readonly("b", &CertificateReport::b)
        .def_readonly("c", &CertificateReport::c)
        .def_readonly("d", &CertificateReport::d)
        .def_readonly("points_checked", &CertificateReport::points_checked)
        .def_readonly("tolerance", &CertificateReport::tolerance)
        .def_readonly("pass_", &CertificateReport::pass)
        .def_readonly("violating_xi", &CertificateReport::violating_xi);

    m.def("verify_upper_lower", &verify_upper_lower, py::arg("params"), py::arg("c"),
          py::arg("env"), py::arg("halfwidth") = 200.0, py::arg("n") = 100001);

    py::enum_<Field>(m, "Field").value("S", Field::S).value("I", Field::I);

    py::class_<ProfileGrid>(m, "ProfileGrid")
        .def_readonly("X", &ProfileGrid::X)
        .def_readonly("h", &ProfileGrid::h)
        .def_readonly("xs", &ProfileGrid::xs)
        .def_readonly("S", &ProfileGrid::S)
        .def_readonly("I", &ProfileGrid::I)
        .def_readonly("c", &ProfileGrid::c)
        .def_readonly("env", &ProfileGrid::env)
        .def_readonly("eq", &ProfileGrid::eq);

    py::class_<FixedPointReport>(m, "FixedPointReport")
        .def_readonly("iterations", &FixedPointReport::iterations)
        .def_readonly("final_delta", &FixedPointReport::final_delta)
        .def_readonly("residual", &FixedPointReport::residual)
        .def_readonly("converged", &FixedPointReport::converged)
        .def_readonly("deltas", &FixedPointReport::deltas);

    m.def("hat_extend", &hat_extend);
    m.def("apply_P",
          [](const ModelParams& p, double c, const EnvelopeParams& env,
             const ProfileGrid& g, double kappa) { return apply_P(p, c, env, g, kappa); });
    m.def("make_lower_grid", &make_lower_grid);
    m.def("solve_fixed_point", &solve_fixed_point, py::arg("params"), py::arg("c"),
          py::arg("env"), py::arg("X"), py::arg("h"), py::arg("tol") = 1e-8,
          py::arg("maxit") = std::size_t(10000));

    py::class_<ExtendReport>(m, "ExtendReport")
        .def_readonly("Xs", &ExtendReport::Xs)
        .def_readonly("window_sup", &ExtendReport::window_sup)
        .def_readonly("left_gap_S", &ExtendReport::left_gap_S)
        .def_readonly("left_gap_I", &ExtendReport::left_gap_I)
        .def_readonly("cauchy_decreasing", &ExtendReport::cauchy_decreasing)
        .def_readonly("all_converged", &ExtendReport::all_converged);

    m.def("extend_domain", &extend_domain, py::arg("params"), py::arg("c"), py::arg("env"),
          py::arg("X_sequence"), py::arg("h"), py::arg("tol") = 1e-8);
    m.def("residual", &residual);

    py::class_<PositivityReport>(m, "PositivityReport")
        .def_readonly("pass_", &PositivityReport::pass)
        .def_readonly("min_S", &PositivityReport::min_S)
        .def_readonly("max_S", &PositivityReport::max_S)
        .def_readonly("min_I", &PositivityReport::min_I)
        .def_readonly("violations", &PositivityReport::violations);
    m.def("positivity_check", &positivity_check);

    py::class_<DerivativeBoundsReport>(m, "DerivativeBoundsReport")
        .def_readonly("N1", &DerivativeBoundsReport::N1)
        .def_readonly("N2", &DerivativeBoundsReport::N2)
        .def_readonly("max_abs_dS", &DerivativeBoundsReport::max_abs_dS)
        .def_readonly("max_abs_dI", &DerivativeBoundsReport::max_abs_dI)
        .def_readonly("pass_", &DerivativeBoundsReport::pass);
    m.def("derivative_bounds_check", &derivative_bounds_check);

    py::class_<RatioBoundsReport>(m, "RatioBoundsReport")
        .def_readonly("nu", &RatioBoundsReport::nu)
        .def_readonly("weighted_monotone", &RatioBoundsReport::weighted_monotone)
        .def_readonly("max_fwd_ratio_s", &RatioBoundsReport::max_fwd_ratio_s)
        .def_readonly("fwd_bound_s", &RatioBoundsReport::fwd_bound_s)
        .def_readonly("max_back_ratio_s", &RatioBoundsReport::max_back_ratio_s)
        .def_readonly("back_bound_s", &RatioBoundsReport::back_bound_s)
        .def_readonly("pass_", &RatioBoundsReport::pass);
    m.def("ratio_bounds_check", &ratio_bounds_check);

    py::class_<LaplaceSample>(m, "LaplaceSample")
        .def_readonly("s", &LaplaceSample::s)
        .def_readonly("lhs", &LaplaceSample::lhs)
        .def_readonly("rhs", &LaplaceSample::rhs)
        .def_readonly("rel_err", &LaplaceSample::rel_err)
        .def_readonly("pass_", &LaplaceSample::pass);

    py::class_<LaplaceReport>(m, "LaplaceReport")
        .def_readonly("samples", &LaplaceReport::samples)
        .def_readonly("left_fit_rate", &LaplaceReport::left_fit_rate)
        .def_readonly("left_fit_r2", &LaplaceReport::left_fit_r2)
        .def_readonly("tail_fit_warning", &LaplaceReport::tail_fit_warning)
        .def_readonly("pass_", &LaplaceReport::pass);
    m.def("laplace_identity_check", &laplace_identity_check);
    m.def("in_gamma_X", &in_gamma_X, py::arg("grid"), py::arg("slack") = 1e-12);

    m.def("volterra_g", &volterra_g);
    m.def("eval_L", &eval_L);
    m.def("eval_dL_analytic", &eval_dL_analytic);
    m.def("dissipation_A", &dissipation_A);

    py::class_<LyapunovTrace>(m, "LyapunovTrace")
        .def_readonly("xs", &LyapunovTrace::xs)
        .def_readonly("L", &LyapunovTrace::L)
        .def_readonly("dL_analytic", &LyapunovTrace::dL_analytic)
        .def_readonly("dL_numeric", &LyapunovTrace::dL_numeric)
        .def_readonly("max_positive_dL", &LyapunovTrace::max_positive_dL)
        .def_readonly("min_L", &LyapunovTrace::min_L)
        .def_readonly("max_abs_L", &LyapunovTrace::max_abs_L);
    m.def("lyapunov_trace", &lyapunov_trace);

    py::class_<MonotonicityReport>(m, "MonotonicityReport")
        .def_readonly("eps_mono", &MonotonicityReport::eps_mono)
        .def_readonly("compliant_fraction", &MonotonicityReport::compliant_fraction)
        .def_readonly("worst_violation", &MonotonicityReport::worst_violation)
        .def_readonly("pass_", &MonotonicityReport::pass);
    m.def("monotonicity_report", &monotonicity_report, py::arg("trace"),
          py::arg("eps_mono") = -1.0);

    py::enum_<Boundary>(m, "Boundary")
        .value("copy", Boundary::copy)
        .value("periodic", Boundary::periodic);
    py::enum_<InitShape>(m, "InitShape")
        .value("half_plane", InitShape::half_plane)
        .value("disk", InitShape::disk);

    py::class_<SimConfig>(m, "SimConfig")
        .def(py::init<>())
        .def_readwrite("Ni", &SimConfig::Ni)
        .def_readwrite("Nj", &SimConfig::Nj)
        .def_readwrite("dt", &SimConfig::dt)
        .def_readwrite("t_end", &SimConfig::t_end)
        .def_readwrite("boundary", &SimConfig::boundary)
        .def_readwrite("init_shape", &SimConfig::init_shape)
        .def_readwrite("init_level", &SimConfig::init_level)
        .def_readwrite("seed_fraction", &SimConfig::seed_fraction)
        .def_readwrite("front_level", &SimConfig::front_level)
        .def_readwrite("record_every", &SimConfig::record_every)
        .def_readwrite("window_fraction", &SimConfig::window_fraction)
        .def_readwrite("seed", &SimConfig::seed)
        .def_readwrite("integrate_R", &SimConfig::integrate_R);

    py::class_<LatticeState>(m, "LatticeState")
        .def_readonly("Ni", &LatticeState::Ni)
        .def_readonly("Nj", &LatticeState::Nj)
        .def_readonly("S", &LatticeState::S)
        .def_readonly("I", &LatticeState::I)
        .def_readonly("R", &LatticeState::R)
        .def_readonly("t", &LatticeState::t);

    py::class_<FrontTrace>(m, "FrontTrace")
        .def_readonly("times", &FrontTrace::times)
        .def_readonly("positions", &FrontTrace::positions)
        .def_readonly("speed", &FrontTrace::speed)
        .def_readonly("fit_t_lo", &FrontTrace::fit_t_lo)
        .def_readonly("fit_t_hi", &FrontTrace::fit_t_hi)
        .def_readonly("r_squared", &FrontTrace::r_squared);

    py::class_<RunSummary>(m, "RunSummary")
        .def_readonly("front_found", &RunSummary::front_found)
        .def_readonly("front_margin_ok", &RunSummary::front_margin_ok)
        .def_readonly("final_max_I", &RunSummary::final_max_I)
        .def_readonly("steps", &RunSummary::steps);

    m.def("init_lattice", &init_lattice);
    m.def("step", &step, py::arg("params"), py::arg("state"), py::arg("dt"),
          py::arg("boundary") = Boundary::copy, py::arg("integrate_R") = true);
    m.def("front_position", &front_position);
    m.def("run_simulation",
          [](const ModelParams& p, const SimConfig& cfg) { return run(p, cfg); },
          py::arg("params"), py::arg("config"),
          py::call_guard<py::gil_scoped_release>());

    py::class_<NonexistenceReport>(m, "NonexistenceReport")
        .def_readonly("c_test", &NonexistenceReport::c_test)
        .def_readonly("c_star", &NonexistenceReport::c_star)
        .def_readonly("min_delta", &NonexistenceReport::min_delta)
        .def_readonly("min_delta_grid", &NonexistenceReport::min_delta_grid)
        .def_readonly("delta_positive", &NonexistenceReport::delta_positive)
        .def_readonly("observed_speed", &NonexistenceReport::observed_speed)
        .def_readonly("margin", &NonexistenceReport::margin)
        .def_readonly("pass_", &NonexistenceReport::pass);
    m.def("nonexistence_probe",
          [](const ModelParams& p, double c_test, const SimConfig& cfg) {
              return nonexistence_probe(p, c_test, cfg, nullptr);
          },
          py::arg("params"), py::arg("c_test"), py::arg("config"),
          py::call_guard<py::gil_scoped_release>());
}
