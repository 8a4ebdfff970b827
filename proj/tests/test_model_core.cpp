#include "seloqr/model_core.hpp"

#include "helpers.hpp"

#include <doctest.h>

#include <cmath>

using namespace seloqr;

TEST_SUITE("model_core") {

TEST_CASE("check_loss closed-form values") {
    CHECK(check_loss(2.0, QuantileLevel(0.5)) == 1.0);
    CHECK(check_loss(0.0, QuantileLevel(0.3)) == 0.0);
    CHECK(check_loss(-2.0, QuantileLevel(0.25)) == 1.5);
}

TEST_CASE("check_loss is nonnegative and vanishes only at zero") {
    auto g = test::rng(101);
    for (int k = 0; k < 20000; ++k) {
        const double u = test::runif(g, -10.0, 10.0);
        const double tau = test::runif(g, 0.01, 0.99);
        const double v = check_loss(u, QuantileLevel(tau));
        CHECK(v >= 0.0);
        if (u != 0.0) CHECK(v > 0.0);
    }
    CHECK(check_loss(0.0, QuantileLevel(0.77)) == 0.0);
}

TEST_CASE("check_loss convexity on random chords") {
    auto g = test::rng(102);
    for (int k = 0; k < 20000; ++k) {
        const QuantileLevel tau(test::runif(g, 0.05, 0.95));
        const double u = test::runif(g, -5.0, 5.0);
        const double v = test::runif(g, -5.0, 5.0);
        const double a = test::runif(g, 0.0, 1.0);
        const double mix = check_loss(a * u + (1.0 - a) * v, tau);
        CHECK(mix <= a * check_loss(u, tau) + (1.0 - a) * check_loss(v, tau) + 1e-12);
    }
}

TEST_CASE("check_loss Lipschitz bound |rho(u-v) - rho(u)| <= |v|") {
    auto g = test::rng(103);
    for (int k = 0; k < 100000; ++k) {
        const QuantileLevel tau(test::runif(g, 0.01, 0.99));
        const double u = test::runif(g, -20.0, 20.0);
        const double v = test::runif(g, -20.0, 20.0);
        CHECK(std::abs(check_loss(u - v, tau) - check_loss(u, tau)) <= std::abs(v) + 1e-12);
    }
}

TEST_CASE("objective hand-evaluated case") {
    Vector y(2);
    y << 1.0, -1.0;
    Matrix X(2, 1);
    X << 1.0, 1.0;
    const Dataset ds(y, X);
    const Vector beta = Vector::Zero(1);
    CHECK(objective(ds, beta, QuantileLevel(0.5), SeloTuning(1.0, 0.1)) ==
          doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("objective vanishes on an exact fit in the no-penalty limit") {
    auto g = test::rng(104);
    const Matrix X = test::random_matrix(g, 12, 3);
    Vector beta(3);
    beta << 1.5, -2.0, 0.25;
    const Vector y = X * beta;
    const Dataset ds(y, X);
    // lambda so small the penalty cannot register at this tolerance
    const double q = objective(ds, beta, QuantileLevel(0.35), SeloTuning(1e-300, 1.0));
    CHECK(q >= 0.0);
    CHECK(q <= 1e-12);
}

TEST_CASE("objective matches a direct-summation oracle") {
    auto g = test::rng(105);
    for (int inst = 0; inst < 20; ++inst) {
        const Index n = 3 + static_cast<Index>(g() % 200);
        const Index d = 1 + static_cast<Index>(g() % 8);
        const Matrix X = test::random_matrix(g, n, d);
        const Vector y = test::random_vector(g, n);
        const Vector beta = test::random_vector(g, d);
        const QuantileLevel tau(test::runif(g, 0.1, 0.9));
        const SeloTuning t(test::runif(g, 0.01, 2.0), test::runif(g, 0.001, 1.0));
        const Dataset ds(y, X);

        double loss = 0.0;
        for (Index i = 0; i < n; ++i) {
            double fit = 0.0;
            for (Index j = 0; j < d; ++j) fit += X(i, j) * beta[j];
            loss += check_loss(y[i] - fit, tau);
        }
        double pen = 0.0;
        for (Index j = 0; j < d; ++j) pen += penalty_value(beta[j], t);
        const double oracle = loss / (2.0 * static_cast<double>(n)) + pen;

        CHECK(objective(ds, beta, tau, t) == doctest::Approx(oracle).epsilon(1e-12));
        // cross-module split: loss part plus penalty_total, computed independently
        CHECK(objective(ds, beta, tau, t) ==
              doctest::Approx(loss / (2.0 * static_cast<double>(n)) + penalty_total(beta, t))
                  .epsilon(1e-14));
    }
}

TEST_CASE("objective rejects a dimension mismatch") {
    Vector y(2);
    y << 1.0, 2.0;
    Matrix X(2, 2);
    X << 1.0, 0.0, 0.0, 1.0;
    const Dataset ds(y, X);
    CHECK_THROWS_AS(objective(ds, Vector::Zero(3), QuantileLevel(0.5), SeloTuning(1.0, 1.0)),
                    contract_error);
}

TEST_CASE("knight_decompose closed-form cases") {
    const auto a = knight_decompose(1.0, 2.0, QuantileLevel(0.5));
    CHECK(a.linear == -1.0);
    CHECK(a.integral == 1.0);
    const auto b = knight_decompose(-1.0, -2.0, QuantileLevel(0.5));
    CHECK(b.linear == -1.0);
    CHECK(b.integral == 1.0);
    const auto c = knight_decompose(3.0, 0.0, QuantileLevel(0.7));
    CHECK(c.linear == 0.0);
    CHECK(c.integral == 0.0);
}

TEST_CASE("knight identity holds exactly on random triples") {
    auto g = test::rng(106);
    double worst = 0.0;
    for (int k = 0; k < 100000; ++k) {
        const double x = test::runif(g, -8.0, 8.0);
        const double y = test::runif(g, -8.0, 8.0);
        const QuantileLevel tau(test::runif(g, 0.01, 0.99));
        const auto kt = knight_decompose(x, y, tau);
        const double lhs = check_loss(x - y, tau) - check_loss(x, tau);
        worst = std::max(worst, std::abs(kt.linear + kt.integral - lhs));
    }
    CHECK(worst <= 1e-12);
}

TEST_CASE("partial_residuals degenerate and reconstruction cases") {
    auto g = test::rng(107);
    const Matrix X = test::random_matrix(g, 40, 5);
    const Vector y = test::random_vector(g, 40);
    const Dataset ds(y, X);

    CHECK((partial_residuals(ds, Vector::Zero(5), 2) - y).cwiseAbs().maxCoeff() == 0.0);

    Matrix X1 = X.leftCols(1);
    const Dataset ds1(y, X1);
    Vector b1(1);
    b1 << 3.7;
    CHECK((partial_residuals(ds1, b1, 0) - y).cwiseAbs().maxCoeff() == 0.0);

    for (int inst = 0; inst < 20; ++inst) {
        const Vector beta = test::random_vector(g, 5);
        const Index j = static_cast<Index>(g() % 5);
        const Vector full = y - X * beta;
        const Vector expect = full + X.col(j) * beta[j];
        CHECK((partial_residuals(ds, beta, j) - expect).cwiseAbs().maxCoeff() <= 1e-12);
    }

    CHECK_THROWS_AS(partial_residuals(ds, Vector::Zero(5), 5), contract_error);
    CHECK_THROWS_AS(partial_residuals(ds, Vector::Zero(5), -1), contract_error);
}

TEST_CASE("domain types reject invariant violations") {
    CHECK_THROWS_AS(QuantileLevel(0.0), contract_error);
    CHECK_THROWS_AS(QuantileLevel(1.0), contract_error);
    CHECK_THROWS_AS(QuantileLevel(-0.2), contract_error);

    Vector y(2);
    y << 1.0, 2.0;
    Matrix X(3, 1);
    X << 1.0, 2.0, 3.0;
    CHECK_THROWS_AS(Dataset(y, X), contract_error);

    Vector ybad(3);
    ybad << 1.0, std::nan(""), 3.0;
    CHECK_THROWS_AS(Dataset(ybad, X), contract_error);

    Matrix Xbad(2, 1);
    Xbad << 1.0, std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(Dataset(y, Xbad), contract_error);

    CHECK_THROWS_AS(IndexSet({1, 1}), contract_error);
    CHECK_THROWS_AS(IndexSet({2, 1}), contract_error);
    CHECK_THROWS_AS(IndexSet({-1, 0}), contract_error);

    const IndexSet a({0, 2, 5});
    CHECK(a.contains(2));
    CHECK_FALSE(a.contains(3));
    CHECK(IndexSet({0, 5}).is_subset_of(a));
    CHECK_FALSE(a.is_subset_of(IndexSet({0, 5})));
    CHECK(a.max_index() == 5);
    CHECK(IndexSet().max_index() == -1);
}

}  // TEST_SUITE
