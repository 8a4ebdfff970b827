#include "seloqr/bic.hpp"
#include "seloqr/inference.hpp"
#include "seloqr/model_core.hpp"
#include "seloqr/simulation.hpp"
#include "seloqr/solver.hpp"
#include "seloqr/version.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

namespace py = pybind11;
using namespace seloqr;

namespace {

InitPolicy init_from_name(const std::string& s) {
    if (s == "zeros") return InitPolicy::zeros;
    if (s == "l1_warm") return InitPolicy::l1_warm;
    throw contract_error("unknown init policy '" + s + "'");
}

SnPolicy sn_from_name(const std::string& s) {
    if (s == "automatic") return SnPolicy::automatic;
    if (s == "fixed") return SnPolicy::fixed;
    if (s == "formula") return SnPolicy::formula;
    throw contract_error("unknown sn policy '" + s + "'");
}

ErrorKind error_from_name(const std::string& s) {
    if (s == "normal") return ErrorKind::normal;
    if (s == "student_t") return ErrorKind::student_t;
    if (s == "laplace") return ErrorKind::laplace;
    if (s == "cauchy") return ErrorKind::cauchy;
    throw contract_error("unknown error distribution '" + s + "'");
}

FitConfig make_fit_config(int max_outer, int max_sweeps, double obj_tol, double zero_tol,
                          const std::string& init, int threads) {
    FitConfig cfg;
    cfg.max_outer = max_outer;
    cfg.max_sweeps = max_sweeps;
    cfg.obj_tol = obj_tol;
    cfg.zero_tol = zero_tol;
    cfg.init = init_from_name(init);
    cfg.threads = threads;
    return cfg;
}

}  // namespace

PYBIND11_MODULE(_seloqr, m) {
    m.doc() = "seamless-L0 penalized quantile regression";
    m.attr("__version__") = kVersion;

    py::register_exception<contract_error>(m, "ContractError", PyExc_ValueError);
    py::register_exception<data_error>(m, "DataError", PyExc_RuntimeError);
    py::register_exception<numerical_error>(m, "NumericalError", PyExc_RuntimeError);

    py::class_<FitResult>(m, "FitResult")
        .def_readonly("beta_hat", &FitResult::beta_hat)
        .def_property_readonly(
            "active_set", [](const FitResult& r) { return r.active_set.members(); })
        .def_readonly("objective", &FitResult::objective)
        .def_readonly("outer_iters", &FitResult::outer_iters)
        .def_readonly("converged", &FitResult::converged)
        .def_readonly("residuals", &FitResult::residuals)
        .def_readonly("objective_trace", &FitResult::objective_trace);

    py::class_<BicScore>(m, "BicScore")
        .def_readonly("value", &BicScore::value)
        .def_readonly("mean_loss", &BicScore::mean_loss)
        .def_readonly("k_nonzero", &BicScore::k_nonzero)
        .def_readonly("sn", &BicScore::sn)
        .def_readonly("n", &BicScore::n)
        .def_readonly("lambda_", &BicScore::lambda)
        .def_readonly("gamma", &BicScore::gamma)
        .def_readonly("feasible", &BicScore::feasible);

    py::class_<SelectionResult>(m, "SelectionResult")
        .def_readonly("best", &SelectionResult::best)
        .def_readonly("best_fit", &SelectionResult::best_fit)
        .def_readonly("scoreboard", &SelectionResult::scoreboard)
        .def_readonly("lambda_grid", &SelectionResult::lambda_grid)
        .def_readonly("gamma_grid", &SelectionResult::gamma_grid)
        .def_readonly("sn", &SelectionResult::sn)
        .def_readonly("cap", &SelectionResult::cap)
        .def_readonly("excluded", &SelectionResult::excluded);

    m.def("check_loss", [](double u, double tau) { return check_loss(u, QuantileLevel(tau)); },
          py::arg("u"), py::arg("tau"));

    m.def(
        "penalty_value",
        [](double b, double lam, double gam) { return penalty_value(b, SeloTuning(lam, gam)); },
        py::arg("b"), py::arg("lambda_"), py::arg("gamma"));

    m.def(
        "penalty_derivative",
        [](double b, double lam, double gam) {
            return penalty_derivative(b, SeloTuning(lam, gam));
        },
        py::arg("b"), py::arg("lambda_"), py::arg("gamma"));

    m.def(
        "objective",
        [](const Vector& y, const Matrix& X, const Vector& beta, double tau, double lam,
           double gam) {
            return objective(Dataset(y, X), beta, QuantileLevel(tau), SeloTuning(lam, gam));
        },
        py::arg("y"), py::arg("X"), py::arg("beta"), py::arg("tau"), py::arg("lambda_"),
        py::arg("gamma"));

    m.def(
        "coordinate_min",
        [](const Vector& r, const Vector& xj, double tau, double w) {
            return coordinate_min(r, xj, QuantileLevel(tau), w);
        },
        py::arg("r"), py::arg("xj"), py::arg("tau"), py::arg("w"));

    m.def(
        "fit",
        [](const Vector& y, const Matrix& X, double tau, double lam, double gam, int max_outer,
           int max_sweeps, double obj_tol, double zero_tol, const std::string& init) {
            return fit(Dataset(y, X), QuantileLevel(tau), SeloTuning(lam, gam),
                       make_fit_config(max_outer, max_sweeps, obj_tol, zero_tol, init, 1));
        },
        py::arg("y"), py::arg("X"), py::arg("tau"), py::arg("lambda_"), py::arg("gamma"),
        py::arg("max_outer") = 30, py::arg("max_sweeps") = 200, py::arg("obj_tol") = 1e-8,
        py::arg("zero_tol") = 1e-8, py::arg("init") = "l1_warm");

    m.def(
        "select",
        [](const Vector& y, const Matrix& X, double tau, const std::vector<double>& lambda_grid,
           const std::vector<double>& gamma_grid, const std::string& sn_policy, double sn_fixed,
           double a_exponent, double c_cap, double loss_floor, int threads) {
            BicConfig bic;
            bic.sn_policy = sn_from_name(sn_policy);
            bic.sn_fixed = sn_fixed;
            bic.a_exponent = a_exponent;
            bic.c_cap = c_cap;
            bic.loss_floor = loss_floor;
            bic.lambda_grid = lambda_grid;
            bic.gamma_grid = gamma_grid;
            FitConfig fit_cfg;
            fit_cfg.threads = threads;
            return select(Dataset(y, X), QuantileLevel(tau), bic, fit_cfg);
        },
        py::arg("y"), py::arg("X"), py::arg("tau") = 0.5,
        py::arg("lambda_grid") = std::vector<double>{},
        py::arg("gamma_grid") = std::vector<double>{}, py::arg("sn_policy") = "automatic",
        py::arg("sn_fixed") = 1.0, py::arg("a_exponent") = 0.4, py::arg("c_cap") = 1.0,
        py::arg("loss_floor") = 1e-12, py::arg("threads") = 1);

    m.def(
        "estimate_f0",
        [](const Vector& residuals, std::optional<double> bandwidth) {
            return estimate_f0(residuals, bandwidth);
        },
        py::arg("residuals"), py::arg("bandwidth") = std::nullopt);

    m.def("ks_distance", &ks_distance, py::arg("samples"));

    m.def(
        "generate",
        [](Index n, Index d, const Vector& beta0, const std::string& error, double param,
           double tau, const std::string& design, double rho, std::uint64_t seed, int rep) {
            SimScenario sc;
            sc.n = n;
            sc.d = d;
            sc.beta0 = beta0;
            sc.error = make_error_dist(error_from_name(error), param, QuantileLevel(tau));
            sc.design = design == "gaussian_correlated" ? DesignKind::gaussian_correlated
                                                        : DesignKind::gaussian_iid;
            sc.design_rho = rho;
            sc.seed = seed;
            sc.reps = rep + 1;
            auto [ds, eps] = generate(sc, rep);
            return py::make_tuple(ds.y(), ds.X(), eps);
        },
        py::arg("n"), py::arg("d"), py::arg("beta0"), py::arg("error") = "normal",
        py::arg("param") = 1.0, py::arg("tau") = 0.5, py::arg("design") = "gaussian_iid",
        py::arg("rho") = 0.0, py::arg("seed") = 12345, py::arg("rep") = 0);
}
