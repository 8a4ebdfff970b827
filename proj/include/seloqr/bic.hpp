#pragma once

#include "seloqr/solver.hpp"
#include "seloqr/types.hpp"

#include <vector>

namespace seloqr {

enum class SnPolicy { automatic, fixed, formula };

struct BicConfig {
    SnPolicy sn_policy = SnPolicy::automatic;
    double sn_fixed = 1.0;    // used by SnPolicy::fixed
    double a_exponent = 0.4;  // cardinality cap floor(c_cap * n^a)
    double c_cap = 1.0;
    double loss_floor = 1e-12;              // guards log of a vanishing loss
    std::vector<double> lambda_grid;        // empty: log-spaced on [0.01, 1] x data scale
    std::vector<double> gamma_grid;         // empty: {1, 10, 100} x sqrt(d) n^{-3/2}
};

struct BicScore {
    double value = 0.0;
    double mean_loss = 0.0;  // (1/n) sum rho_tau(residuals)
    Index k_nonzero = 0;
    double sn = 1.0;
    Index n = 0;
    double lambda = 0.0;
    double gamma = 0.0;
    bool feasible = true;  // within the cardinality cap
};

/// Per-coefficient inflation factor in front of (log n / n):
///   automatic: 1 while d <= log n, otherwise the growing rule below;
///   fixed: the configured constant;
///   formula: (d / log n) * log log max(n, 8) regardless of d.
double sn_value(Index n, Index d, const BicConfig& cfg = {});

/// Largest admissible model size, floor(c_cap * n^a_exponent).
Index cardinality_cap(Index n, const BicConfig& cfg = {});

/// log(max(mean_loss, loss_floor)) + (log n / n) * sn * k_nonzero.
/// lambda/gamma only stamp the provenance fields of the score.
BicScore bic_score(const Dataset& ds, const FitResult& fit, QuantileLevel tau, double sn,
                   const BicConfig& cfg = {}, double lambda = 0.0, double gamma = 0.0);

std::vector<double> default_lambda_grid(const Dataset& ds, QuantileLevel tau);
std::vector<double> default_gamma_grid(Index n, Index d);

struct SelectionResult {
    BicScore best;
    FitResult best_fit;
    std::vector<BicScore> scoreboard;  // gamma-major, matching FitPath cell order
    std::vector<double> lambda_grid;
    std::vector<double> gamma_grid;
    double sn = 1.0;
    Index cap = 0;
    Index excluded = 0;  // scoreboard cells over the cap
};

/// Fits the tuning grid and picks the feasible cell with the smallest score.
/// Ties break toward fewer nonzeros, then larger lambda, then larger gamma.
SelectionResult select(const Dataset& ds, QuantileLevel tau, const BicConfig& bic_cfg = {},
                       const FitConfig& fit_cfg = {});

/// Fit with coefficients outside `support` pinned at zero, reported in the
/// full d-length coordinate system. An empty support yields the zero fit.
FitResult fit_restricted(const Dataset& ds, const IndexSet& support, QuantileLevel tau,
                         const SeloTuning& t, const FitConfig& cfg = {});

struct BicOrdering {
    double bic_true = 0.0;
    double bic_over = 0.0;
    double bic_under = 0.0;
};

/// Scores restricted fits on the true support, a strict superset, and a set
/// missing at least one true index, all at a common sn.
BicOrdering bic_ordering_check(const Dataset& ds, const IndexSet& truth, const IndexSet& overfit,
                               const IndexSet& underfit, QuantileLevel tau, const SeloTuning& t,
                               double sn, const BicConfig& cfg = {}, const FitConfig& fit_cfg = {});

}  // namespace seloqr
