#pragma once

#include "seloqr/bic.hpp"
#include "seloqr/solver.hpp"
#include "seloqr/types.hpp"

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

namespace seloqr {

enum class ErrorKind { normal, student_t, laplace, cauchy };

/// Noise law recentred so that its tau-quantile is exactly zero. `shift` is
/// the tau-quantile of the base law; `f0` the density of the recentred law
/// at zero. Both come from closed forms, not simulation.
struct ErrorDistribution {
    ErrorKind kind = ErrorKind::normal;
    double param = 1.0;  // sd / degrees of freedom / scale, by kind
    double tau = 0.5;
    double shift = 0.0;
    double f0 = 0.0;
};

ErrorDistribution make_error_dist(ErrorKind kind, double param, QuantileLevel tau);

enum class DesignKind { gaussian_iid, gaussian_correlated };

struct SimScenario {
    Index n = 100;
    Index d = 10;
    Vector beta0;  // length d
    ErrorDistribution error;
    DesignKind design = DesignKind::gaussian_iid;
    double design_rho = 0.0;  // lag-one correlation for gaussian_correlated
    std::uint64_t seed = 12345;
    int reps = 100;
};

/// Exact nonzero coordinates of beta0.
IndexSet scenario_support(const Vector& beta0);
/// Smallest nonzero magnitude; 0 when beta0 is identically zero.
double scenario_min_signal(const Vector& beta0);

/// Data for one replication plus its noise vector. Deterministic in
/// (sc.seed, rep) alone; replications are independent streams.
std::pair<Dataset, Vector> generate(const SimScenario& sc, int rep);

struct AssumptionReport {
    double eig_min = 0.0;  // of X'X / n
    double eig_max = 0.0;
    double max_row_norm = 0.0;
    double alpha_n = 0.0;         // sqrt(d / n)
    double row_norm_ratio = 0.0;  // max_row_norm * alpha_n, small iff rows stay
                                  // below the 1 / alpha_n critical scale
};

AssumptionReport assumption_report(const Dataset& ds);

/// Tuning rule the harness falls back on:
/// lambda = 0.5 sqrt(log(max(d, 2)) / n), gamma = sqrt(d) n^{-3/2}.
SeloTuning default_sim_tuning(Index n, Index d);

struct RunOptions {
    bool with_selection = false;  // also run grid selection per replication
    bool with_inference = true;   // standardized stats and intervals on the true support
    double ci_level = 0.95;
    std::optional<SeloTuning> tuning;  // default: default_sim_tuning(n, d)
};

struct RepRecord {
    int rep = 0;
    bool failed = false;
    bool recovered = false;
    double l2 = 0.0;   // NaN when failed
    bool has_z = false;
    double z = 0.0;
};

struct OracleMetrics {
    std::vector<RepRecord> rep_rows;  // one per replication, replication order
    int reps_completed = 0;
    int solver_failures = 0;
    double exact_recovery_rate = 0.0;  // fitted active set equals the true support
    double tpr = 0.0;
    double fpr = 0.0;
    std::vector<double> l2_errors;  // completed replications, replication order
    double median_l2 = 0.0;
    std::vector<double> z_samples;  // standardized stats where the support was covered
    int z_skipped = 0;
    double ks_to_normal = 0.0;  // NaN without z samples
    double ci_coverage = 0.0;   // NaN without intervals
    int ci_count = 0;
    double bic_recovery_rate = 0.0;  // NaN unless selection ran
};

/// Runs the scenario end to end. Replications may run on several threads; the
/// aggregate is a function of (scenario, options) only, never of the thread
/// count. Throws if more than a tenth of the replications fail to fit.
OracleMetrics run_replications(const SimScenario& sc, const FitConfig& fit_cfg = {},
                               const BicConfig& bic_cfg = {}, const RunOptions& opts = {});

/// Kolmogorov-Smirnov distance between the samples and the standard normal.
double ks_distance(const std::vector<double>& samples);

}  // namespace seloqr
