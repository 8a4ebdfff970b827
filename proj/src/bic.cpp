#include "seloqr/bic.hpp"

#include "seloqr/model_core.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace seloqr {

namespace {

double growing_sn(Index n, Index d) {
    const double logn = std::log(static_cast<double>(n));
    const double loglog = std::log(std::log(static_cast<double>(std::max<Index>(n, 8))));
    return (static_cast<double>(d) / logn) * loglog;
}

double mean_check_loss(const Vector& residuals, QuantileLevel tau) {
    double s = 0.0;
    for (Index i = 0; i < residuals.size(); ++i) s += check_loss(residuals[i], tau);
    return s / static_cast<double>(residuals.size());
}

// strict weak order on scoreboard cells: value, then sparsity, then stronger
// regularization
bool score_before(const BicScore& a, const BicScore& b) {
    if (a.value != b.value) return a.value < b.value;
    if (a.k_nonzero != b.k_nonzero) return a.k_nonzero < b.k_nonzero;
    if (a.lambda != b.lambda) return a.lambda > b.lambda;
    return a.gamma > b.gamma;
}

}  // namespace

double sn_value(Index n, Index d, const BicConfig& cfg) {
    if (n < 2) throw contract_error("sn_value: need n >= 2");
    if (d < 1) throw contract_error("sn_value: need d >= 1");
    switch (cfg.sn_policy) {
        case SnPolicy::fixed:
            if (!(cfg.sn_fixed > 0.0) || !std::isfinite(cfg.sn_fixed))
                throw contract_error("sn_value: sn_fixed must be finite and > 0");
            return cfg.sn_fixed;
        case SnPolicy::formula:
            return growing_sn(n, d);
        case SnPolicy::automatic:
        default:
            return static_cast<double>(d) <= std::log(static_cast<double>(n)) ? 1.0
                                                                              : growing_sn(n, d);
    }
}

Index cardinality_cap(Index n, const BicConfig& cfg) {
    if (n < 1) throw contract_error("cardinality_cap: need n >= 1");
    if (!(cfg.c_cap > 0.0) || !std::isfinite(cfg.c_cap))
        throw contract_error("cardinality_cap: c_cap must be finite and > 0");
    if (!(cfg.a_exponent > 0.0 && cfg.a_exponent < 0.5))
        throw contract_error("cardinality_cap: a_exponent must lie in (0, 1/2)");
    return static_cast<Index>(
        std::floor(cfg.c_cap * std::pow(static_cast<double>(n), cfg.a_exponent)));
}

BicScore bic_score(const Dataset& ds, const FitResult& fit, QuantileLevel tau, double sn,
                   const BicConfig& cfg, double lambda, double gamma) {
    if (!(sn > 0.0) || !std::isfinite(sn)) throw contract_error("bic_score: sn must be > 0");
    if (!(cfg.loss_floor > 0.0)) throw contract_error("bic_score: loss_floor must be > 0");
    if (fit.residuals.size() != ds.n())
        throw contract_error("bic_score: fit residuals do not match the dataset");
    const Index n = ds.n();
    BicScore s;
    s.mean_loss = mean_check_loss(fit.residuals, tau);
    s.k_nonzero = static_cast<Index>(fit.active_set.size());
    s.sn = sn;
    s.n = n;
    s.lambda = lambda;
    s.gamma = gamma;
    s.value = std::log(std::max(s.mean_loss, cfg.loss_floor)) +
              (std::log(static_cast<double>(n)) / static_cast<double>(n)) * sn *
                  static_cast<double>(s.k_nonzero);
    return s;
}

std::vector<double> default_lambda_grid(const Dataset& ds, QuantileLevel tau) {
    double qhat = 0.0;
    for (Index i = 0; i < ds.n(); ++i) qhat += check_loss(ds.y()[i], tau);
    qhat /= static_cast<double>(ds.n());
    qhat = std::max(qhat, 1e-8);  // all-zero response still gets a usable grid
    std::vector<double> grid(10);
    for (int k = 0; k < 10; ++k)
        grid[static_cast<std::size_t>(k)] = qhat * std::pow(0.01, k / 9.0);
    return grid;
}

std::vector<double> default_gamma_grid(Index n, Index d) {
    if (n < 1 || d < 1) throw contract_error("default_gamma_grid: need n >= 1 and d >= 1");
    const double base =
        std::sqrt(static_cast<double>(d)) * std::pow(static_cast<double>(n), -1.5);
    return {base, 10.0 * base, 100.0 * base};
}

SelectionResult select(const Dataset& ds, QuantileLevel tau, const BicConfig& bic_cfg,
                       const FitConfig& fit_cfg) {
    std::vector<double> lam = bic_cfg.lambda_grid;
    if (lam.empty()) {
        lam = default_lambda_grid(ds, tau);
    } else {
        for (double v : lam)
            if (!(v > 0.0) || !std::isfinite(v))
                throw contract_error("select: lambda grid entries must be finite and > 0");
        std::sort(lam.begin(), lam.end(), std::greater<double>());
        lam.erase(std::unique(lam.begin(), lam.end()), lam.end());
    }
    std::vector<double> gam = bic_cfg.gamma_grid;
    if (gam.empty()) {
        gam = default_gamma_grid(ds.n(), ds.d());
    } else {
        for (double v : gam)
            if (!(v > 0.0) || !std::isfinite(v))
                throw contract_error("select: gamma grid entries must be finite and > 0");
    }

    SelectionResult out;
    out.sn = sn_value(ds.n(), ds.d(), bic_cfg);
    out.cap = cardinality_cap(ds.n(), bic_cfg);

    FitPath path = fit_path(ds, tau, lam, gam, fit_cfg);
    out.lambda_grid = path.lambdas;
    out.gamma_grid = path.gammas;

    const std::size_t L = path.lambdas.size();
    const std::size_t G = path.gammas.size();
    out.scoreboard.reserve(L * G);

    std::size_t best_cell = 0;
    bool have_best = false;
    for (std::size_t g = 0; g < G; ++g) {
        for (std::size_t l = 0; l < L; ++l) {
            const FitResult& fr = path.cell(l, g);
            BicScore s =
                bic_score(ds, fr, tau, out.sn, bic_cfg, path.lambdas[l], path.gammas[g]);
            s.feasible = s.k_nonzero <= out.cap;
            if (!s.feasible) ++out.excluded;
            out.scoreboard.push_back(s);
            if (s.feasible && (!have_best || score_before(s, out.best))) {
                out.best = s;
                best_cell = g * L + l;
                have_best = true;
            }
        }
    }
    if (!have_best)
        throw numerical_error("select: no feasible model under the cardinality cap " +
                              std::to_string(out.cap));
    out.best_fit = std::move(path.cells[best_cell]);
    return out;
}

FitResult fit_restricted(const Dataset& ds, const IndexSet& support, QuantileLevel tau,
                         const SeloTuning& t, const FitConfig& cfg) {
    const Index d = ds.d();
    if (support.max_index() >= d)
        throw contract_error("fit_restricted: support index out of range");

    if (support.empty()) {
        FitResult out;
        out.beta_hat = Vector::Zero(d);
        out.residuals = ds.y();
        out.objective = objective(ds, out.beta_hat, tau, t);
        out.objective_trace = {out.objective};
        out.converged = true;
        out.outer_iters = 0;
        return out;
    }

    const Index m = static_cast<Index>(support.size());
    Matrix Xsub(ds.n(), m);
    for (Index k = 0; k < m; ++k)
        Xsub.col(k) = ds.X().col(support.members()[static_cast<std::size_t>(k)]);
    Dataset sub(ds.y(), std::move(Xsub));

    FitResult fr = fit(sub, tau, t, cfg);

    FitResult out;
    out.beta_hat = Vector::Zero(d);
    std::vector<Index> act;
    for (Index k = 0; k < m; ++k) {
        const Index j = support.members()[static_cast<std::size_t>(k)];
        out.beta_hat[j] = fr.beta_hat[k];
        if (fr.active_set.contains(k)) act.push_back(j);
    }
    out.active_set = IndexSet(std::move(act));
    out.residuals = std::move(fr.residuals);
    out.outer_iters = fr.outer_iters;
    out.converged = fr.converged;
    out.objective_trace = std::move(fr.objective_trace);
    out.objective = objective(ds, out.beta_hat, tau, t);
    return out;
}

BicOrdering bic_ordering_check(const Dataset& ds, const IndexSet& truth, const IndexSet& overfit,
                               const IndexSet& underfit, QuantileLevel tau, const SeloTuning& t,
                               double sn, const BicConfig& cfg, const FitConfig& fit_cfg) {
    if (truth.empty()) throw contract_error("bic_ordering_check: truth must be nonempty");
    if (!truth.is_subset_of(overfit) || overfit.size() <= truth.size())
        throw contract_error("bic_ordering_check: overfit must strictly contain truth");
    if (truth.is_subset_of(underfit))
        throw contract_error("bic_ordering_check: underfit must miss a true index");
    const Index d = ds.d();
    if (overfit.max_index() >= d || underfit.max_index() >= d || truth.max_index() >= d)
        throw contract_error("bic_ordering_check: index out of range");

    BicOrdering out;
    out.bic_true =
        bic_score(ds, fit_restricted(ds, truth, tau, t, fit_cfg), tau, sn, cfg).value;
    out.bic_over =
        bic_score(ds, fit_restricted(ds, overfit, tau, t, fit_cfg), tau, sn, cfg).value;
    out.bic_under =
        bic_score(ds, fit_restricted(ds, underfit, tau, t, fit_cfg), tau, sn, cfg).value;
    return out;
}

}  // namespace seloqr
