#include "seloqr/solver.hpp"

#include "seloqr/threading.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace seloqr {

namespace {

struct Breakpoint {
    double t;
    double jump;  // slope increase at t, always >= 0
};

// Minimizer of a convex piecewise-linear function given its slope at -inf and
// the sorted breakpoint list. The minimizing set is [t_lo, t_hi]; ties break
// toward the smallest magnitude.
double sweep_min(const std::vector<Breakpoint>& bps, double slope_neg_inf) {
    double s = slope_neg_inf;
    double t_lo = 0.0, t_hi = 0.0;
    bool have_lo = false, have_hi = false;
    for (const Breakpoint& bp : bps) {
        if (s <= 0.0) {
            t_hi = bp.t;  // slope still nonpositive entering bp.t
            have_hi = true;
        }
        s += bp.jump;
        if (!have_lo && s >= 0.0) {
            t_lo = bp.t;
            have_lo = true;
        }
    }
    if (!have_lo) return have_hi ? t_hi : 0.0;  // flat tail; last reachable kink
    if (t_lo <= 0.0 && 0.0 <= t_hi) return 0.0;
    return t_lo > 0.0 ? t_lo : t_hi;
}

// Shared breakpoint construction. Entries of xj equal to zero contribute a
// constant and are skipped; the kink of w|t| at zero is always included.
double coord_min_core(const double* r, const double* xj, Index n, double tau, double w,
                      double shift, std::vector<Breakpoint>& bps) {
    bps.clear();
    const double inv2n = 0.5 / static_cast<double>(n);
    double slope0 = -w;
    for (Index i = 0; i < n; ++i) {
        const double a = xj[i];
        if (a == 0.0) continue;
        slope0 -= (a > 0.0 ? tau * a : (1.0 - tau) * (-a)) * inv2n;
        bps.push_back({r[i] / a + shift, std::abs(a) * inv2n});
    }
    bps.push_back({0.0, 2.0 * w});
    std::sort(bps.begin(), bps.end(),
              [](const Breakpoint& a, const Breakpoint& b) { return a.t < b.t; });
    return sweep_min(bps, slope0);
}

bool column_is_zero(const Eigen::MatrixXd& colX, Index j) {
    return (colX.col(j).array() == 0.0).all();
}

// One inner solve: cyclic exact coordinate updates at fixed weights until the
// largest coordinate move in a sweep falls below kInnerSweepTol. rfull tracks
// y - X beta incrementally.
void cd_solve(const Eigen::MatrixXd& colX, double tau, const Vector& w, int max_sweeps,
              const std::vector<char>& skip, Vector& beta, Vector& rfull,
              std::vector<Breakpoint>& bps) {
    const Index n = colX.rows();
    const Index d = colX.cols();
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double max_step = 0.0;
        for (Index j = 0; j < d; ++j) {
            if (skip[static_cast<std::size_t>(j)]) continue;
            const double t_new =
                coord_min_core(rfull.data(), colX.col(j).data(), n, tau, w[j], beta[j], bps);
            const double delta = t_new - beta[j];
            if (delta != 0.0) {
                rfull.noalias() -= delta * colX.col(j);
                beta[j] = t_new;
            }
            max_step = std::max(max_step, std::abs(delta));
        }
        if (max_step < kInnerSweepTol) break;
    }
}

void validate_fit_config(const FitConfig& cfg) {
    if (cfg.max_outer < 1) throw contract_error("FitConfig: max_outer must be >= 1");
    if (cfg.max_sweeps < 1) throw contract_error("FitConfig: max_sweeps must be >= 1");
    if (!(cfg.obj_tol > 0.0) || !std::isfinite(cfg.obj_tol))
        throw contract_error("FitConfig: obj_tol must be finite and > 0");
    if (!(cfg.zero_tol >= 0.0) || !std::isfinite(cfg.zero_tol))
        throw contract_error("FitConfig: zero_tol must be finite and >= 0");
    if (cfg.threads < 0) throw contract_error("FitConfig: threads must be >= 0");
}

// Exact minimum over t of (1/(2n)) sum_i rho_tau(r_i - x_i (t - shift)) + p(|t|).
// The loss is convex piecewise linear, the penalty concave, so on every linear
// piece the total is concave and the minimum sits at a loss breakpoint or at
// t = 0. Unlike the tangent-weight update this can leave the current penalty
// basin. Returns shift unless a candidate strictly improves on it.
double selo_coord_exact(const double* r, const double* xj, Index n, double tau,
                        const SeloTuning& t, double shift, std::vector<Breakpoint>& bps) {
    bps.clear();
    const double inv2n = 0.5 / static_cast<double>(n);
    double slope = 0.0;  // loss slope left of every breakpoint
    for (Index i = 0; i < n; ++i) {
        const double a = xj[i];
        if (a == 0.0) continue;
        slope -= (a > 0.0 ? tau * a : (1.0 - tau) * (-a)) * inv2n;
        bps.push_back({r[i] / a + shift, std::abs(a) * inv2n});
    }
    if (bps.empty()) return shift;
    std::sort(bps.begin(), bps.end(),
              [](const Breakpoint& a, const Breakpoint& b) { return a.t < b.t; });

    auto loss_at = [&](double tv) {
        double s = 0.0;
        for (Index i = 0; i < n; ++i) {
            const double u = r[i] - xj[i] * (tv - shift);
            s += u * (tau - (u < 0.0 ? 1.0 : 0.0));
        }
        return s * inv2n;
    };

    double best_t = shift;
    double best_v = loss_at(shift) + penalty_value(shift, t);
    const double margin = 1e-12 * std::max(1.0, std::abs(best_v));
    auto consider = [&](double cand_t, double cand_v) {
        // move only on strict improvement; among improving candidates prefer
        // the smaller value, then the smaller magnitude (deterministic)
        if (cand_v < best_v - margin ||
            (best_t != shift && cand_v < best_v + margin && std::abs(cand_t) < std::abs(best_t))) {
            best_v = cand_v;
            best_t = cand_t;
        }
    };
    consider(0.0, loss_at(0.0));

    // one direct evaluation anchors the sweep; the rest is linear interpolation
    double lv = loss_at(bps.front().t);
    double prev = bps.front().t;
    for (std::size_t k = 0; k < bps.size(); ++k) {
        if (k > 0) {
            lv += slope * (bps[k].t - prev);
            prev = bps[k].t;
        }
        slope += bps[k].jump;
        consider(bps[k].t, lv + penalty_value(bps[k].t, t));
    }
    return best_t;
}

// Cyclic exact single-coordinate descent on the true objective until a full
// sweep makes no move. Strict improvement is required per move, so the
// objective is monotone and the loop terminates.
bool exact_polish(const Eigen::MatrixXd& colX, double tau, const SeloTuning& t, int max_sweeps,
                  const std::vector<char>& skip, Vector& beta, Vector& rfull,
                  std::vector<Breakpoint>& bps) {
    const Index n = colX.rows();
    const Index d = colX.cols();
    bool any = false;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        bool moved = false;
        for (Index j = 0; j < d; ++j) {
            if (skip[static_cast<std::size_t>(j)]) continue;
            const double t_new =
                selo_coord_exact(rfull.data(), colX.col(j).data(), n, tau, t, beta[j], bps);
            if (t_new != beta[j]) {
                rfull.noalias() -= (t_new - beta[j]) * colX.col(j);
                beta[j] = t_new;
                moved = true;
            }
        }
        any = any || moved;
        if (!moved) break;
    }
    return any;
}

constexpr int kEscapeRounds = 3;
// The escape search tries every coordinate, re-polishing after each trial
// move, so a round costs d full polish passes. That buys basin hops that
// matter on low-dimensional problems; past this width the tangent descent
// plus polish already lands well and the quadratic-in-d price is not worth
// paying inside grid searches and replication loops.
constexpr Index kEscapeMaxDim = 8;

// On one or two columns the objective is exactly minimizable: refine the
// arrangement of residual-zero lines by the coordinate axes, and on every
// cell the loss is linear while each penalty term is concave along any
// direction, so the objective is concave per cell and bottoms out at a
// vertex (the loss dominates the bounded penalty toward infinity).
// Enumerating the vertices is cheap while n stays small.
constexpr Index kTinyExactMaxN = 50;

Vector tiny_exact_candidates(const Dataset& ds, QuantileLevel tau, const SeloTuning& t,
                             const Vector& beta, double& best_q) {
    const Index n = ds.n();
    const Index d = ds.d();
    Vector best = beta;
    Vector cand(d);
    auto consider = [&](const Vector& c) {
        const double q = objective(ds, c, tau, t);
        if (q < best_q - 1e-14 * std::max(1.0, std::abs(best_q))) {
            best_q = q;
            best = c;
        }
    };
    if (d == 1) {
        cand[0] = 0.0;
        consider(cand);
        for (Index i = 0; i < n; ++i) {
            if (ds.X()(i, 0) == 0.0) continue;
            cand[0] = ds.y()[i] / ds.X()(i, 0);
            consider(cand);
        }
        return best;
    }
    // d == 2: origin, single-axis vertices, and pairwise line intersections
    cand.setZero();
    consider(cand);
    for (Index i = 0; i < n; ++i) {
        const double a = ds.X()(i, 0), b = ds.X()(i, 1), yi = ds.y()[i];
        if (a != 0.0) {
            cand[0] = yi / a;
            cand[1] = 0.0;
            consider(cand);
        }
        if (b != 0.0) {
            cand[0] = 0.0;
            cand[1] = yi / b;
            consider(cand);
        }
    }
    for (Index i = 0; i < n; ++i) {
        const double a1 = ds.X()(i, 0), b1 = ds.X()(i, 1), y1 = ds.y()[i];
        for (Index j = i + 1; j < n; ++j) {
            const double a2 = ds.X()(j, 0), b2 = ds.X()(j, 1), y2 = ds.y()[j];
            const double det = a1 * b2 - a2 * b1;
            const double scale = std::max({std::abs(a1 * b2), std::abs(a2 * b1), 1e-300});
            if (std::abs(det) <= 1e-12 * scale) continue;
            cand[0] = (y1 * b2 - y2 * b1) / det;
            cand[1] = (a1 * y2 - a2 * y1) / det;
            consider(cand);
        }
    }
    return best;
}

}  // namespace

double coordinate_min(const Vector& r, const Vector& xj, QuantileLevel tau, double w) {
    const Index n = r.size();
    if (n < 1) throw contract_error("coordinate_min: empty inputs");
    if (xj.size() != n) throw contract_error("coordinate_min: r and xj lengths differ");
    if (!(w >= 0.0) || !std::isfinite(w))
        throw contract_error("coordinate_min: w must be finite and >= 0");
    if (!r.allFinite() || !xj.allFinite())
        throw contract_error("coordinate_min: inputs must be finite");
    std::vector<Breakpoint> bps;
    bps.reserve(static_cast<std::size_t>(n) + 1);
    return coord_min_core(r.data(), xj.data(), n, tau.value(), w, 0.0, bps);
}

Vector lla_weights(const Vector& beta, const SeloTuning& t) {
    Vector w(beta.size());
    for (Index j = 0; j < beta.size(); ++j) w[j] = penalty_derivative(beta[j], t);
    return w;
}

FitResult fit(const Dataset& ds, QuantileLevel tau, const SeloTuning& t, const FitConfig& cfg,
              const std::optional<Vector>& init) {
    validate_fit_config(cfg);
    const Index n = ds.n();
    const Index d = ds.d();
    const double tau_v = tau.value();

    // column-major copy for contiguous column access during sweeps
    Eigen::MatrixXd colX = ds.X();
    std::vector<char> skip(static_cast<std::size_t>(d), 0);
    for (Index j = 0; j < d; ++j)
        skip[static_cast<std::size_t>(j)] = column_is_zero(colX, j) ? 1 : 0;

    Vector beta;
    if (init) {
        if (init->size() != d) throw contract_error("fit: init has wrong length");
        if (!init->allFinite()) throw contract_error("fit: init must be finite");
        beta = *init;
    } else {
        beta = Vector::Zero(d);
    }
    for (Index j = 0; j < d; ++j)
        if (skip[static_cast<std::size_t>(j)]) beta[j] = 0.0;

    Vector rfull = ds.y() - ds.X() * beta;
    std::vector<Breakpoint> bps;
    bps.reserve(static_cast<std::size_t>(n) + 1);

    FitResult out;

    if (!init && cfg.init == InitPolicy::l1_warm) {
        // constant-weight pass: the penalty slope at zero, capped at lambda
        const double w0 = std::min(penalty_derivative(0.0, t), t.lambda());
        const Vector w = Vector::Constant(d, w0);
        cd_solve(colX, tau_v, w, cfg.max_sweeps, skip, beta, rfull, bps);
        rfull = ds.y() - ds.X() * beta;
    }

    double q_prev = objective(ds, beta, tau, t);
    out.objective_trace.push_back(q_prev);

    int iters = 0;
    for (int k = 1; k <= cfg.max_outer; ++k) {
        const Vector w = lla_weights(beta, t);
        cd_solve(colX, tau_v, w, cfg.max_sweeps, skip, beta, rfull, bps);
        rfull = ds.y() - ds.X() * beta;
        const double q = objective(ds, beta, tau, t);
        if (!std::isfinite(q)) throw numerical_error("fit: objective became non-finite", k);
        out.objective_trace.push_back(q);
        iters = k;
        const bool done = (q_prev - q) < cfg.obj_tol * std::max(1.0, std::abs(q_prev));
        q_prev = q;
        if (done) {
            out.converged = true;
            break;
        }
    }
    // Exact-descent polish: the reweighted passes stop at a tangent fixed
    // point, which can sit in the wrong penalty basin. Single-coordinate
    // exact minimization, then either a vertex enumeration (exact on one or
    // two small columns) or two whole-support escape moves (drop an active
    // coordinate, or force a zero one to its loss-only minimizer, then
    // re-polish). Every step accepts only strict objective decreases, so the
    // recorded sequence stays nonincreasing and the loop terminates.
    if (exact_polish(colX, tau_v, t, cfg.max_sweeps, skip, beta, rfull, bps)) {
        rfull = ds.y() - ds.X() * beta;
        q_prev = objective(ds, beta, tau, t);
        out.objective_trace.push_back(q_prev);
    }
    if (d <= 2 && n <= kTinyExactMaxN) {
        double q_best = q_prev;
        const Vector b_best = tiny_exact_candidates(ds, tau, t, beta, q_best);
        if (q_best < q_prev) {
            beta = b_best;
            rfull = ds.y() - ds.X() * beta;
            q_prev = q_best;
            out.objective_trace.push_back(q_prev);
        }
    } else {
        for (int round = 0; d <= kEscapeMaxDim && round < kEscapeRounds; ++round) {
            bool improved = false;
            Vector b2, r2;
            auto attempt = [&]() {
                exact_polish(colX, tau_v, t, cfg.max_sweeps, skip, b2, r2, bps);
                const double q2 = objective(ds, b2, tau, t);
                if (q2 < q_prev - 1e-14 * std::max(1.0, std::abs(q_prev))) {
                    beta = b2;
                    rfull = ds.y() - ds.X() * beta;
                    q_prev = q2;
                    out.objective_trace.push_back(q_prev);
                    improved = true;
                }
            };
            for (Index j = 0; j < d; ++j) {
                if (beta[j] == 0.0) continue;
                b2 = beta;
                r2 = rfull + colX.col(j) * beta[j];
                b2[j] = 0.0;
                attempt();
            }
            for (Index j = 0; j < d; ++j) {
                if (beta[j] != 0.0 || skip[static_cast<std::size_t>(j)]) continue;
                const double forced =
                    coord_min_core(rfull.data(), colX.col(j).data(), n, tau_v, 0.0, 0.0, bps);
                if (forced == 0.0) continue;
                b2 = beta;
                b2[j] = forced;
                r2 = rfull - colX.col(j) * forced;
                attempt();
            }
            if (!improved) break;
        }
    }

    out.outer_iters = iters;
    out.objective = q_prev;
    out.beta_hat = std::move(beta);
    out.residuals = std::move(rfull);

    std::vector<Index> act;
    for (Index j = 0; j < d; ++j)
        if (std::abs(out.beta_hat[j]) > cfg.zero_tol) act.push_back(j);
    out.active_set = IndexSet(std::move(act));
    return out;
}

FitPath fit_path(const Dataset& ds, QuantileLevel tau, std::vector<double> lambdas,
                 std::vector<double> gammas, const FitConfig& cfg) {
    validate_fit_config(cfg);
    if (lambdas.empty()) throw contract_error("fit_path: lambda grid is empty");
    if (gammas.empty()) throw contract_error("fit_path: gamma grid is empty");
    for (std::size_t l = 0; l < lambdas.size(); ++l) {
        if (!(lambdas[l] > 0.0) || !std::isfinite(lambdas[l]))
            throw contract_error("fit_path: lambdas must be finite and > 0");
        if (l > 0 && lambdas[l] >= lambdas[l - 1])
            throw contract_error("fit_path: lambdas must be strictly decreasing");
    }
    for (double g : gammas)
        if (!(g > 0.0) || !std::isfinite(g))
            throw contract_error("fit_path: gammas must be finite and > 0");

    FitPath out;
    out.lambdas = std::move(lambdas);
    out.gammas = std::move(gammas);
    const std::size_t L = out.lambdas.size();
    const std::size_t G = out.gammas.size();
    out.cells.resize(L * G);

    // chains over lambda are independent across gamma; fits stay single threaded.
    // Each cell keeps the better of a fresh start and the warm continuation: a
    // warm chain alone can inherit zeros it cannot undo (the reweighting slope
    // at zero is steep), and the fresh start escapes that trap.
    parallel_for(G, cfg.threads, [&](std::size_t g) {
        std::optional<Vector> warm;
        for (std::size_t l = 0; l < L; ++l) {
            const SeloTuning t(out.lambdas[l], out.gammas[g]);
            FitResult fr = fit(ds, tau, t, cfg);
            if (warm) {
                FitResult fw = fit(ds, tau, t, cfg, warm);
                if (fw.objective < fr.objective) fr = std::move(fw);
            }
            warm = fr.beta_hat;
            out.cells[g * L + l] = std::move(fr);
        }
    });
    return out;
}

}  // namespace seloqr
