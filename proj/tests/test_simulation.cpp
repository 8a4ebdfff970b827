#include "seloqr/simulation.hpp"

#include "seloqr/rng.hpp"

#include "helpers.hpp"

#include <doctest.h>

#include <boost/math/distributions/cauchy.hpp>
#include <boost/math/distributions/laplace.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>

#include <cmath>

using namespace seloqr;

namespace {

SimScenario basic_scenario(Index n, Index d, std::uint64_t seed, int reps,
                           ErrorKind kind = ErrorKind::normal, double param = 1.0,
                           double tau = 0.5) {
    SimScenario sc;
    sc.n = n;
    sc.d = d;
    sc.beta0 = Vector::Zero(d);
    if (d >= 3) {
        sc.beta0[0] = 2.0;
        sc.beta0[1] = -2.0;
        sc.beta0[2] = 1.5;
    }
    sc.error = make_error_dist(kind, param, QuantileLevel(tau));
    sc.seed = seed;
    sc.reps = reps;
    return sc;
}

}  // namespace

TEST_SUITE("simulation") {

TEST_CASE("make_error_dist closed-form shifts and densities") {
    const auto n1 = make_error_dist(ErrorKind::normal, 1.0, QuantileLevel(0.5));
    CHECK(std::abs(n1.shift) <= 1e-12);
    CHECK(std::abs(n1.f0 - 0.398942) <= 1e-6);

    const auto c1 = make_error_dist(ErrorKind::cauchy, 1.0, QuantileLevel(0.75));
    CHECK(std::abs(c1.shift - 1.0) <= 1e-10);
    CHECK(std::abs(c1.f0 - 1.0 / (2.0 * M_PI)) <= 1e-9);

    const auto l1 = make_error_dist(ErrorKind::laplace, 1.0, QuantileLevel(0.5));
    CHECK(std::abs(l1.shift) <= 1e-12);
    CHECK(l1.f0 == doctest::Approx(0.5).epsilon(1e-12));

    const auto t3 = make_error_dist(ErrorKind::student_t, 3.0, QuantileLevel(0.9));
    const boost::math::students_t_distribution<double> t_dist(3.0);
    CHECK(std::abs(boost::math::cdf(t_dist, t3.shift) - 0.9) <= 1e-10);
    CHECK(t3.f0 == doctest::Approx(boost::math::pdf(t_dist, t3.shift)).epsilon(1e-12));

    CHECK_THROWS_AS(make_error_dist(ErrorKind::normal, 0.0, QuantileLevel(0.5)), contract_error);
    CHECK_THROWS_AS(make_error_dist(ErrorKind::student_t, -3.0, QuantileLevel(0.5)),
                    contract_error);
}

TEST_CASE("shifted error law has its tau quantile at zero") {
    for (double tau : {0.1, 0.25, 0.5, 0.8}) {
        for (ErrorKind kind :
             {ErrorKind::normal, ErrorKind::student_t, ErrorKind::laplace, ErrorKind::cauchy}) {
            const double param = kind == ErrorKind::student_t ? 3.0 : 1.5;
            const auto ed = make_error_dist(kind, param, QuantileLevel(tau));
            CHECK(ed.f0 > 0.0);
            // F_base(shift) = tau means the recentred law puts mass tau below 0
            double cdf_at_shift;
            switch (kind) {
                case ErrorKind::normal:
                    cdf_at_shift = boost::math::cdf(
                        boost::math::normal_distribution<double>(0.0, param), ed.shift);
                    break;
                case ErrorKind::student_t:
                    cdf_at_shift = boost::math::cdf(
                        boost::math::students_t_distribution<double>(param), ed.shift);
                    break;
                case ErrorKind::laplace:
                    cdf_at_shift = boost::math::cdf(
                        boost::math::laplace_distribution<double>(0.0, param), ed.shift);
                    break;
                default:
                    cdf_at_shift = boost::math::cdf(
                        boost::math::cauchy_distribution<double>(0.0, param), ed.shift);
            }
            CHECK(std::abs(cdf_at_shift - tau) <= 1e-10);
        }
    }
}

TEST_CASE("scenario support helpers") {
    Vector beta(5);
    beta << 2.0, -2.0, 1.5, 0.0, 0.0;
    CHECK(scenario_support(beta) == IndexSet({0, 1, 2}));
    CHECK(scenario_min_signal(beta) == 1.5);
    CHECK(scenario_support(Vector::Zero(4)).empty());
    CHECK(scenario_min_signal(Vector::Zero(4)) == 0.0);
}

TEST_CASE("generate is deterministic and respects the model equation") {
    const SimScenario sc = basic_scenario(50, 6, 99, 3);
    const auto [ds1, eps1] = generate(sc, 1);
    const auto [ds2, eps2] = generate(sc, 1);
    CHECK((ds1.y() - ds2.y()).cwiseAbs().maxCoeff() == 0.0);
    CHECK((ds1.X() - ds2.X()).cwiseAbs().maxCoeff() == 0.0);
    CHECK((eps1 - eps2).cwiseAbs().maxCoeff() == 0.0);

    const auto [ds3, eps3] = generate(sc, 2);
    CHECK((ds1.y() - ds3.y()).cwiseAbs().maxCoeff() > 0.0);

    // y reconstructs from the pieces
    CHECK((ds1.y() - (ds1.X() * sc.beta0 + eps1)).cwiseAbs().maxCoeff() <= 1e-12);

    SimScenario flat = basic_scenario(40, 2, 100, 1);
    const auto [dsf, epsf] = generate(flat, 0);
    CHECK((dsf.y() - epsf).cwiseAbs().maxCoeff() == 0.0);  // beta0 = 0 means y = eps

    CHECK_THROWS_AS(generate(sc, 3), contract_error);
    CHECK_THROWS_AS(generate(sc, -1), contract_error);
}

TEST_CASE("generate noise mass below zero matches tau") {
    SimScenario sc = basic_scenario(100000, 2, 1234, 1, ErrorKind::student_t, 3.0, 0.3);
    const auto [ds, eps] = generate(sc, 0);
    Index neg = 0;
    for (Index i = 0; i < eps.size(); ++i) neg += eps[i] < 0.0 ? 1 : 0;
    CHECK(std::abs(static_cast<double>(neg) / 100000.0 - 0.3) <= 0.01);
}

TEST_CASE("generate correlated design shows the requested lag structure") {
    SimScenario sc = basic_scenario(20000, 4, 777, 1);
    sc.design = DesignKind::gaussian_correlated;
    sc.design_rho = 0.6;
    const auto [ds, eps] = generate(sc, 0);
    const Index n = ds.n();
    auto corr = [&](Index a, Index b) {
        const double ma = ds.X().col(a).mean();
        const double mb = ds.X().col(b).mean();
        double num = 0.0, va = 0.0, vb = 0.0;
        for (Index i = 0; i < n; ++i) {
            const double xa = ds.X()(i, a) - ma;
            const double xb = ds.X()(i, b) - mb;
            num += xa * xb;
            va += xa * xa;
            vb += xb * xb;
        }
        return num / std::sqrt(va * vb);
    };
    CHECK(std::abs(corr(0, 1) - 0.6) <= 0.03);
    CHECK(std::abs(corr(1, 2) - 0.6) <= 0.03);
    CHECK(std::abs(corr(0, 2) - 0.36) <= 0.03);

    sc.design_rho = 1.5;
    CHECK_THROWS_AS(generate(sc, 0), contract_error);
}

TEST_CASE("assumption_report closed-form cases") {
    Vector y(2);
    y << 0.5, -0.5;
    Matrix X(2, 1);
    X << 1.0, 1.0;
    const AssumptionReport a = assumption_report(Dataset(y, X));
    CHECK(a.eig_min == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(a.eig_max == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(a.max_row_norm == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(a.alpha_n == doctest::Approx(std::sqrt(0.5)).epsilon(1e-15));
    CHECK(a.row_norm_ratio == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));

    Matrix Xo(2, 2);
    Xo << std::sqrt(2.0), 0.0, 0.0, std::sqrt(2.0);  // Gram is the identity
    const AssumptionReport b = assumption_report(Dataset(y, Xo));
    CHECK(b.eig_min == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(b.eig_max == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("assumption_report eigenvalue range on a frozen gaussian design") {
    const SimScenario sc = basic_scenario(2000, 20, 42, 1);
    const auto [ds, eps] = generate(sc, 0);
    const AssumptionReport r = assumption_report(ds);
    CHECK(r.eig_min >= 0.7);
    CHECK(r.eig_min <= 1.0);
    CHECK(r.eig_max >= 1.0);
    CHECK(r.eig_max <= 1.35);
    CHECK(r.alpha_n == doctest::Approx(std::sqrt(20.0 / 2000.0)).epsilon(1e-15));
}

TEST_CASE("default_sim_tuning follows its formula") {
    const SeloTuning t = default_sim_tuning(200, 10);
    CHECK(t.lambda() == doctest::Approx(0.5 * std::sqrt(std::log(10.0) / 200.0)).epsilon(1e-12));
    CHECK(t.gamma() == doctest::Approx(std::sqrt(10.0) * std::pow(200.0, -1.5)).epsilon(1e-12));
    CHECK_THROWS_AS(default_sim_tuning(1, 5), contract_error);
}

TEST_CASE("ks_distance closed-form cases") {
    CHECK(ks_distance({0.0}) == doctest::Approx(0.5).epsilon(1e-12));

    const boost::math::normal_distribution<double> N01;
    std::vector<double> uniformized(100);
    for (int i = 0; i < 100; ++i)
        uniformized[static_cast<std::size_t>(i)] =
            boost::math::quantile(N01, (static_cast<double>(i) + 0.5) / 100.0);
    CHECK(ks_distance(uniformized) == doctest::Approx(0.005).epsilon(1e-9));

    CHECK(ks_distance({10.0, 10.0, 10.0}) >= 0.999);
    CHECK_THROWS_AS(ks_distance({}), contract_error);
    CHECK_THROWS_AS(ks_distance({0.3, std::nan("")}), contract_error);
}

TEST_CASE("run_replications on a near-noiseless strong signal recovers always") {
    SimScenario sc = basic_scenario(100, 5, 555, 20, ErrorKind::normal, 1e-8);
    const OracleMetrics m = run_replications(sc);
    CHECK(m.reps_completed == 20);
    CHECK(m.solver_failures == 0);
    CHECK(m.exact_recovery_rate == 1.0);
    CHECK(m.tpr == 1.0);
    CHECK(m.fpr == 0.0);
    CHECK(m.median_l2 <= 1e-4);
    CHECK(m.z_samples.size() + static_cast<std::size_t>(m.z_skipped) == 20);
}

TEST_CASE("run_replications single replication aggregation identity") {
    SimScenario sc = basic_scenario(120, 6, 808, 1);
    const OracleMetrics m = run_replications(sc);
    REQUIRE(m.rep_rows.size() == 1);
    REQUIRE(m.l2_errors.size() == 1);
    CHECK(m.median_l2 == m.l2_errors[0]);
    CHECK(m.exact_recovery_rate == (m.rep_rows[0].recovered ? 1.0 : 0.0));
    CHECK(m.rep_rows[0].l2 == m.l2_errors[0]);
    if (m.rep_rows[0].has_z) {
        REQUIRE(m.z_samples.size() == 1);
        CHECK(m.z_samples[0] == m.rep_rows[0].z);
    }
}

TEST_CASE("run_replications is deterministic and thread-count invariant") {
    SimScenario sc = basic_scenario(80, 5, 909, 12);
    FitConfig one, four;
    one.threads = 1;
    four.threads = 4;
    const OracleMetrics a = run_replications(sc, one);
    const OracleMetrics b = run_replications(sc, one);
    const OracleMetrics c = run_replications(sc, four);
    for (const OracleMetrics* other : {&b, &c}) {
        CHECK(a.exact_recovery_rate == other->exact_recovery_rate);
        CHECK(a.median_l2 == other->median_l2);
        CHECK(a.tpr == other->tpr);
        CHECK(a.fpr == other->fpr);
        REQUIRE(a.z_samples.size() == other->z_samples.size());
        for (std::size_t k = 0; k < a.z_samples.size(); ++k)
            CHECK(a.z_samples[k] == other->z_samples[k]);
        REQUIRE(a.l2_errors.size() == other->l2_errors.size());
        for (std::size_t k = 0; k < a.l2_errors.size(); ++k)
            CHECK(a.l2_errors[k] == other->l2_errors[k]);
    }
}

TEST_CASE("run_replications null model keeps false positives rare") {
    SimScenario sc = basic_scenario(400, 8, 666, 20);
    sc.beta0 = Vector::Zero(8);  // no signal anywhere
    RunOptions opts;
    opts.with_selection = true;
    const OracleMetrics m = run_replications(sc, {}, {}, opts);
    CHECK(m.fpr <= 0.05);
    CHECK(m.bic_recovery_rate >= 0.9);  // selected model should stay empty
    CHECK(std::isnan(m.ci_coverage));   // no support, no intervals
    CHECK(m.z_samples.empty());
}

TEST_CASE("run_replications validates its options") {
    SimScenario sc = basic_scenario(50, 4, 111, 2);
    RunOptions opts;
    opts.ci_level = 1.0;
    CHECK_THROWS_AS(run_replications(sc, {}, {}, opts), contract_error);
    sc.reps = 0;
    CHECK_THROWS_AS(run_replications(sc), contract_error);
    sc = basic_scenario(50, 4, 111, 2);
    sc.beta0 = Vector::Zero(7);
    CHECK_THROWS_AS(run_replications(sc), contract_error);
}

TEST_CASE("replication streams are stable and well spread") {
    auto g1 = replication_stream(42, 0);
    auto g2 = replication_stream(42, 0);
    CHECK(g1() == g2());
    auto g3 = replication_stream(42, 1);
    auto g4 = replication_stream(43, 0);
    const std::uint64_t a = g1(), b = g3(), c = g4();
    CHECK(a != b);
    CHECK(a != c);
    // u01 stays strictly inside the unit interval
    auto g5 = replication_stream(7, 3);
    for (int k = 0; k < 100000; ++k) {
        const double u = u01(g5);
        CHECK(u > 0.0);
        CHECK(u < 1.0);
    }
}

}  // TEST_SUITE
