#pragma once

#include "seloqr/model_core.hpp"
#include "seloqr/penalty.hpp"
#include "seloqr/types.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

namespace test {

using seloqr::Index;
using seloqr::Matrix;
using seloqr::Vector;

inline std::mt19937_64 rng(std::uint64_t seed) { return std::mt19937_64(seed); }

inline double runif(std::mt19937_64& g, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(g);
}

inline double rnorm(std::mt19937_64& g, double sd = 1.0) {
    return std::normal_distribution<double>(0.0, sd)(g);
}

inline Vector random_vector(std::mt19937_64& g, Index n, double sd = 1.0) {
    Vector v(n);
    for (Index i = 0; i < n; ++i) v[i] = rnorm(g, sd);
    return v;
}

inline Matrix random_matrix(std::mt19937_64& g, Index n, Index d, double sd = 1.0) {
    Matrix m(n, d);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < d; ++j) m(i, j) = rnorm(g, sd);
    return m;
}

// 1-D objective of the inner coordinate problem
inline double phi_value(const Vector& r, const Vector& xj, double tau, double w, double t) {
    double s = 0.0;
    for (Index i = 0; i < r.size(); ++i) {
        const double u = r[i] - xj[i] * t;
        s += u * (tau - (u < 0.0 ? 1.0 : 0.0));
    }
    return s / (2.0 * static_cast<double>(r.size())) + w * std::abs(t);
}

// Dense-grid minimum of phi over [min breakpoint - 1, max breakpoint + 1],
// step 1e-4, plus exact evaluation at every breakpoint and 0.
inline double phi_grid_min(const Vector& r, const Vector& xj, double tau, double w) {
    std::vector<double> bps{0.0};
    for (Index i = 0; i < r.size(); ++i)
        if (xj[i] != 0.0) bps.push_back(r[i] / xj[i]);
    const auto [lo_it, hi_it] = std::minmax_element(bps.begin(), bps.end());
    const double lo = *lo_it - 1.0, hi = *hi_it + 1.0;
    double best = phi_value(r, xj, tau, w, lo);
    const long steps = static_cast<long>(std::ceil((hi - lo) / 1e-4));
    for (long k = 1; k <= steps; ++k)
        best = std::min(best, phi_value(r, xj, tau, w, lo + 1e-4 * static_cast<double>(k)));
    for (double b : bps) best = std::min(best, phi_value(r, xj, tau, w, b));
    return best;
}

// Exact global minimum over t of (1/(2n)) sum rho_tau(r_i - x_i t) + penalty(t).
// The loss is piecewise linear and the penalty concave in |t|, so on every
// linear piece the objective is concave and the minimum sits at a loss
// breakpoint or at the penalty kink t = 0.
inline double selo_1d_min(const Vector& r, const Vector& x, double tau,
                          const seloqr::SeloTuning& t) {
    std::vector<double> cand{0.0};
    for (Index i = 0; i < r.size(); ++i)
        if (x[i] != 0.0) cand.push_back(r[i] / x[i]);
    double best = std::numeric_limits<double>::infinity();
    for (double c : cand)
        best = std::min(best, phi_value(r, x, tau, 0.0, c) + seloqr::penalty_value(c, t));
    return best;
}

// Lower bound for the dense 2-D grid minimum of the full objective: sweep
// beta_1 over the grid and minimize beta_2 exactly on each section.
inline double selo_2d_oracle(const seloqr::Dataset& ds, double tau, const seloqr::SeloTuning& t) {
    double best = std::numeric_limits<double>::infinity();
    Vector r1(ds.n());
    for (int k = 0; k <= 10000; ++k) {
        const double b1 = (k - 5000) * 1e-3;
        r1 = ds.y() - ds.X().col(0) * b1;
        best = std::min(best,
                        seloqr::penalty_value(b1, t) + selo_1d_min(r1, ds.X().col(1), tau, t));
    }
    return best;
}

}  // namespace test
