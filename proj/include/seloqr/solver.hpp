#pragma once

#include "seloqr/model_core.hpp"
#include "seloqr/penalty.hpp"
#include "seloqr/types.hpp"

#include <optional>
#include <vector>

namespace seloqr {

enum class InitPolicy { zeros, l1_warm };

/// Inner coordinate descent stops once the largest coordinate move in a full
/// sweep falls below this.
inline constexpr double kInnerSweepTol = 1e-10;

struct FitConfig {
    int max_outer = 30;            // outer reweighting iterations
    int max_sweeps = 200;          // coordinate sweeps per inner solve
    double obj_tol = 1e-8;         // relative objective decrease for outer convergence
    double zero_tol = 1e-8;        // |beta_j| <= zero_tol counts as zero
    InitPolicy init = InitPolicy::l1_warm;
    int threads = 1;               // grid / replication parallelism; 0 = hardware
};

struct FitResult {
    Vector beta_hat;
    IndexSet active_set;                 // indices with |beta_j| > zero_tol
    double objective = 0.0;              // penalized objective at beta_hat
    int outer_iters = 0;
    bool converged = false;
    Vector residuals;                    // y - X beta_hat
    // Objective after init, after each outer pass, then one entry per accepted
    // polish or escape step. Nonincreasing from the first outer pass onward.
    std::vector<double> objective_trace;
};

/// Exact minimizer of
///   phi(t) = (1 / (2n)) * sum_i rho_tau(r_i - xj_i * t) + w * |t|
/// by a breakpoint sweep on the piecewise-linear subgradient. When the
/// minimizer is an interval, ties break toward the smallest |t| (0 whenever
/// the interval contains it).
double coordinate_min(const Vector& r, const Vector& xj, QuantileLevel tau, double w);

/// Tangent weights for the reweighting step: w_j = penalty_derivative(beta_j).
Vector lla_weights(const Vector& beta, const SeloTuning& t);

/// Penalized quantile regression fit: outer tangent reweighting around an
/// inner exact cyclic coordinate descent, followed by an exact single
/// coordinate polish on the true penalized objective and a finishing step
/// accepted only on strict objective decrease. On at most two small columns
/// the finisher enumerates the breakpoint-arrangement vertices, which is
/// globally exact; otherwise a bounded set of escape moves runs (drop one
/// active coordinate, or grow one zero coordinate at its unpenalized
/// minimizer, then re-polish). Deterministic and single threaded.
/// `init` overrides the configured initialization policy when supplied.
FitResult fit(const Dataset& ds, QuantileLevel tau, const SeloTuning& t,
              const FitConfig& cfg = {}, const std::optional<Vector>& init = std::nullopt);

/// Fits over a tuning grid. Within each gamma, lambdas run in decreasing
/// order and every cell keeps the better of a fresh fit and a continuation
/// warm started from the previous cell (ties go to the fresh fit, so a one
/// cell path matches a plain fit exactly).
/// Cells are stored gamma-major: cell(l, g) = cells[g * lambdas.size() + l].
struct FitPath {
    std::vector<double> lambdas;  // strictly decreasing
    std::vector<double> gammas;
    std::vector<FitResult> cells;

    const FitResult& cell(std::size_t l_idx, std::size_t g_idx) const {
        return cells[g_idx * lambdas.size() + l_idx];
    }
};
FitPath fit_path(const Dataset& ds, QuantileLevel tau, std::vector<double> lambdas,
                 std::vector<double> gammas, const FitConfig& cfg = {});

}  // namespace seloqr
