#pragma once

#include "seloqr/penalty.hpp"
#include "seloqr/types.hpp"

namespace seloqr {

/// Check loss rho_tau(u) = u * (tau - 1{u < 0}).
double check_loss(double u, QuantileLevel tau);

/// Penalized objective (1 / (2n)) * sum_i rho_tau(y_i - x_i' beta) + total penalty.
double objective(const Dataset& ds, const Vector& beta, QuantileLevel tau, const SeloTuning& t);

/// The two terms of the decomposition
///   rho_tau(x - y) - rho_tau(x) = y * (1{x <= 0} - tau) + integral term,
/// where the integral term is (y - x)_+ for x > 0, (x - y)_+ for x <= 0 and
/// y < 0, and 0 otherwise.
struct KnightTerms {
    double linear;
    double integral;
};
KnightTerms knight_decompose(double x, double y, QuantileLevel tau);

/// Residuals with coordinate j backed out: y - X beta + X_col(j) * beta_j,
/// accumulated directly over the other coordinates.
Vector partial_residuals(const Dataset& ds, const Vector& beta, Index j);

}  // namespace seloqr
