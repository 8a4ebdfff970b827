#include "seloqr/simulation.hpp"

#include "seloqr/inference.hpp"
#include "seloqr/rng.hpp"
#include "seloqr/threading.hpp"

#include <boost/math/distributions/cauchy.hpp>
#include <boost/math/distributions/laplace.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace seloqr {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double base_quantile(ErrorKind kind, double param, double p) {
    switch (kind) {
        case ErrorKind::normal:
            return boost::math::quantile(boost::math::normal_distribution<double>(0.0, param), p);
        case ErrorKind::student_t:
            return boost::math::quantile(boost::math::students_t_distribution<double>(param), p);
        case ErrorKind::laplace:
            return boost::math::quantile(boost::math::laplace_distribution<double>(0.0, param), p);
        case ErrorKind::cauchy:
        default:
            return boost::math::quantile(boost::math::cauchy_distribution<double>(0.0, param), p);
    }
}

double base_pdf(ErrorKind kind, double param, double x) {
    switch (kind) {
        case ErrorKind::normal:
            return boost::math::pdf(boost::math::normal_distribution<double>(0.0, param), x);
        case ErrorKind::student_t:
            return boost::math::pdf(boost::math::students_t_distribution<double>(param), x);
        case ErrorKind::laplace:
            return boost::math::pdf(boost::math::laplace_distribution<double>(0.0, param), x);
        case ErrorKind::cauchy:
        default:
            return boost::math::pdf(boost::math::cauchy_distribution<double>(0.0, param), x);
    }
}

void validate_scenario(const SimScenario& sc) {
    if (sc.n < 2) throw contract_error("SimScenario: need n >= 2");
    if (sc.d < 1) throw contract_error("SimScenario: need d >= 1");
    if (sc.beta0.size() != sc.d) throw contract_error("SimScenario: beta0 length is not d");
    if (!sc.beta0.allFinite()) throw contract_error("SimScenario: beta0 must be finite");
    if (sc.reps < 1) throw contract_error("SimScenario: need reps >= 1");
    if (!(sc.error.param > 0.0) || !std::isfinite(sc.error.param))
        throw contract_error("SimScenario: error param must be finite and > 0");
    if (!(sc.error.tau > 0.0 && sc.error.tau < 1.0))
        throw contract_error("SimScenario: error tau must lie in (0,1)");
    if (sc.design == DesignKind::gaussian_correlated &&
        !(sc.design_rho >= 0.0 && sc.design_rho < 1.0))
        throw contract_error("SimScenario: design_rho must lie in [0,1)");
}

double median_of(std::vector<double> v) {
    if (v.empty()) return kNaN;
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 == 1 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

}  // namespace

ErrorDistribution make_error_dist(ErrorKind kind, double param, QuantileLevel tau) {
    if (!(param > 0.0) || !std::isfinite(param))
        throw contract_error("make_error_dist: param must be finite and > 0");
    ErrorDistribution out;
    out.kind = kind;
    out.param = param;
    out.tau = tau.value();
    out.shift = base_quantile(kind, param, out.tau);
    out.f0 = base_pdf(kind, param, out.shift);
    return out;
}

IndexSet scenario_support(const Vector& beta0) {
    std::vector<Index> idx;
    for (Index j = 0; j < beta0.size(); ++j)
        if (beta0[j] != 0.0) idx.push_back(j);
    return IndexSet(std::move(idx));
}

double scenario_min_signal(const Vector& beta0) {
    double m = std::numeric_limits<double>::infinity();
    bool any = false;
    for (Index j = 0; j < beta0.size(); ++j)
        if (beta0[j] != 0.0) {
            m = std::min(m, std::abs(beta0[j]));
            any = true;
        }
    return any ? m : 0.0;
}

std::pair<Dataset, Vector> generate(const SimScenario& sc, int rep) {
    validate_scenario(sc);
    if (rep < 0 || rep >= sc.reps) throw contract_error("generate: rep out of range");
    auto g = replication_stream(sc.seed, static_cast<std::uint64_t>(rep));
    const boost::math::normal_distribution<double> N01;

    const Index n = sc.n;
    const Index d = sc.d;
    Matrix X(n, d);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < d; ++j) X(i, j) = boost::math::quantile(N01, u01(g));

    if (sc.design == DesignKind::gaussian_correlated && sc.design_rho > 0.0) {
        Eigen::MatrixXd cov(d, d);
        for (Index a = 0; a < d; ++a)
            for (Index b = 0; b < d; ++b)
                cov(a, b) = std::pow(sc.design_rho, std::abs(static_cast<double>(a - b)));
        const Eigen::MatrixXd L = Eigen::LLT<Eigen::MatrixXd>(cov).matrixL();
        for (Index i = 0; i < n; ++i) {
            const Eigen::VectorXd z = X.row(i).transpose();
            X.row(i) = (L * z).transpose();
        }
    }

    Vector eps(n);
    for (Index i = 0; i < n; ++i)
        eps[i] = base_quantile(sc.error.kind, sc.error.param, u01(g)) - sc.error.shift;

    Vector y = X * sc.beta0 + eps;
    return {Dataset(std::move(y), std::move(X)), std::move(eps)};
}

AssumptionReport assumption_report(const Dataset& ds) {
    const Index n = ds.n();
    const Index d = ds.d();
    const Eigen::MatrixXd Xc = ds.X();
    const Eigen::MatrixXd G = (Xc.adjoint() * Xc) / static_cast<double>(n);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G, Eigen::EigenvaluesOnly);

    AssumptionReport out;
    out.eig_min = es.eigenvalues().minCoeff();
    out.eig_max = es.eigenvalues().maxCoeff();
    out.max_row_norm = ds.X().rowwise().norm().maxCoeff();
    out.alpha_n = std::sqrt(static_cast<double>(d) / static_cast<double>(n));
    out.row_norm_ratio = out.max_row_norm * out.alpha_n;
    return out;
}

SeloTuning default_sim_tuning(Index n, Index d) {
    if (n < 2 || d < 1) throw contract_error("default_sim_tuning: need n >= 2 and d >= 1");
    const double nn = static_cast<double>(n);
    const double lambda = 0.5 * std::sqrt(std::log(static_cast<double>(std::max<Index>(d, 2))) / nn);
    const double gamma = std::sqrt(static_cast<double>(d)) * std::pow(nn, -1.5);
    return SeloTuning(lambda, gamma);
}

double ks_distance(const std::vector<double>& samples) {
    if (samples.empty()) throw contract_error("ks_distance: no samples");
    std::vector<double> s = samples;
    for (double v : s)
        if (!std::isfinite(v)) throw contract_error("ks_distance: samples must be finite");
    std::sort(s.begin(), s.end());
    const double M = static_cast<double>(s.size());
    double dist = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double F = 0.5 * std::erfc(-s[i] / std::sqrt(2.0));
        dist = std::max(dist, std::max(F - static_cast<double>(i) / M,
                                       static_cast<double>(i + 1) / M - F));
    }
    return dist;
}

OracleMetrics run_replications(const SimScenario& sc, const FitConfig& fit_cfg,
                               const BicConfig& bic_cfg, const RunOptions& opts) {
    validate_scenario(sc);
    if (!(opts.ci_level > 0.0 && opts.ci_level < 1.0))
        throw contract_error("run_replications: ci_level must lie in (0,1)");
    const QuantileLevel tau(sc.error.tau);
    const SeloTuning tuning =
        opts.tuning ? *opts.tuning : default_sim_tuning(sc.n, sc.d);
    const IndexSet support = scenario_support(sc.beta0);
    const Index m = static_cast<Index>(support.size());

    FitConfig inner = fit_cfg;
    inner.threads = 1;  // parallelism lives at the replication level

    struct Rep {
        bool failed = false;
        bool recovered = false;
        double tpr = 0.0, fpr = 0.0, l2 = 0.0;
        bool has_z = false;
        double z = 0.0;
        bool has_ci = false;
        bool covered = false;
        int bic = -1;  // -1 not run, 0 missed, 1 recovered
        bool z_candidate = false;
    };
    std::vector<Rep> reps(static_cast<std::size_t>(sc.reps));

    Vector u;
    Vector beta0_A(m);
    if (m > 0) {
        u = Vector::Zero(m);
        u[0] = 1.0;
        for (Index k = 0; k < m; ++k)
            beta0_A[k] = sc.beta0[support.members()[static_cast<std::size_t>(k)]];
    }

    parallel_for(static_cast<std::size_t>(sc.reps), fit_cfg.threads, [&](std::size_t r) {
        Rep& R = reps[r];
        auto [ds, eps] = generate(sc, static_cast<int>(r));
        (void)eps;
        FitResult fr;
        try {
            fr = fit(ds, tau, tuning, inner);
        } catch (const numerical_error&) {
            R.failed = true;
            return;
        }
        R.recovered = fr.active_set == support;
        Index tp = 0, fp = 0;
        for (Index j : fr.active_set.members())
            (support.contains(j) ? tp : fp) += 1;
        R.tpr = m == 0 ? 1.0 : static_cast<double>(tp) / static_cast<double>(m);
        R.fpr = sc.d == m ? 0.0
                          : static_cast<double>(fp) / static_cast<double>(sc.d - m);
        R.l2 = (fr.beta_hat - sc.beta0).norm();

        if (opts.with_inference && m > 0) {
            R.z_candidate = true;
            if (support.is_subset_of(fr.active_set)) {
                const SigmaHat sh = sigma_hat(ds, support);
                if (!sh.flagged) {
                    const AsymptoticContext ctx(sh.matrix, sc.error.f0, tau, sc.n, u);
                    Vector bh(m);
                    for (Index k = 0; k < m; ++k)
                        bh[k] = fr.beta_hat[support.members()[static_cast<std::size_t>(k)]];
                    R.z = standardized_stat(ctx, bh, beta0_A);
                    R.has_z = true;
                    const Interval ci = confidence_interval(ctx, bh, opts.ci_level);
                    R.covered = ci.lo <= beta0_A[0] && beta0_A[0] <= ci.hi;
                    R.has_ci = true;
                }
            }
        }

        if (opts.with_selection) {
            try {
                const SelectionResult sel = select(ds, tau, bic_cfg, inner);
                R.bic = sel.best_fit.active_set == support ? 1 : 0;
            } catch (const numerical_error&) {
                R.bic = 0;
            }
        }
    });

    OracleMetrics out;
    out.ks_to_normal = kNaN;
    out.ci_coverage = kNaN;
    out.bic_recovery_rate = kNaN;
    int rec = 0, bic_run = 0, bic_hit = 0, cov = 0;
    double tpr = 0.0, fpr = 0.0;
    for (std::size_t r = 0; r < reps.size(); ++r) {
        const Rep& R = reps[r];
        RepRecord row;
        row.rep = static_cast<int>(r);
        row.failed = R.failed;
        row.recovered = R.recovered;
        row.l2 = R.failed ? kNaN : R.l2;
        row.has_z = R.has_z;
        row.z = R.z;
        out.rep_rows.push_back(row);
        if (R.failed) {
            ++out.solver_failures;
            continue;
        }
        ++out.reps_completed;
        rec += R.recovered ? 1 : 0;
        tpr += R.tpr;
        fpr += R.fpr;
        out.l2_errors.push_back(R.l2);
        if (R.has_z)
            out.z_samples.push_back(R.z);
        else if (R.z_candidate)
            ++out.z_skipped;
        if (R.has_ci) {
            ++out.ci_count;
            cov += R.covered ? 1 : 0;
        }
        if (R.bic >= 0) {
            ++bic_run;
            bic_hit += R.bic;
        }
    }
    if (out.solver_failures * 10 > sc.reps)
        throw numerical_error("run_replications: more than 10% of replications failed (" +
                              std::to_string(out.solver_failures) + " of " +
                              std::to_string(sc.reps) + ")");
    const double done = static_cast<double>(out.reps_completed);
    out.exact_recovery_rate = rec / done;
    out.tpr = tpr / done;
    out.fpr = fpr / done;
    out.median_l2 = median_of(out.l2_errors);
    if (!out.z_samples.empty()) out.ks_to_normal = ks_distance(out.z_samples);
    if (out.ci_count > 0) out.ci_coverage = static_cast<double>(cov) / out.ci_count;
    if (bic_run > 0) out.bic_recovery_rate = static_cast<double>(bic_hit) / bic_run;
    return out;
}

}  // namespace seloqr
