#pragma once

#include "seloqr/types.hpp"

#include <optional>

namespace seloqr {

/// Relative eigenvalue threshold below which a restricted Gram matrix is
/// reported as numerically singular.
inline constexpr double kSigmaEigRelTol = 1e-10;

struct SigmaHat {
    Eigen::MatrixXd matrix;  // (1/n) sum over rows of x_A x_A'
    double eig_min = 0.0;
    double eig_max = 0.0;
    bool flagged = false;  // eig_min < kSigmaEigRelTol * eig_max
};

SigmaHat sigma_hat(const Dataset& ds, const IndexSet& support);

/// Everything the large-sample normal approximation of u' beta_hat on a fixed
/// support needs: the restricted design covariance, the error density at its
/// tau-quantile, and the direction u (unit norm). Refuses singular sigma.
class AsymptoticContext {
public:
    AsymptoticContext(Eigen::MatrixXd sigma, double f0, QuantileLevel tau, Index n, Vector u);
    static AsymptoticContext from_sigma_hat(const SigmaHat& sh, double f0, QuantileLevel tau,
                                            Index n, Vector u);

    const Eigen::MatrixXd& sigma() const { return sigma_; }
    double f0() const { return f0_; }
    double tau() const { return tau_; }
    Index n() const { return n_; }
    const Vector& u() const { return u_; }
    Index dim() const { return sigma_.rows(); }
    /// u' sigma^{-1} u, solved once at construction.
    double quad() const { return quad_; }

private:
    Eigen::MatrixXd sigma_;
    double f0_;
    double tau_;
    Index n_;
    Vector u_;
    double quad_;
};

/// sqrt(n) f0 u'(beta_hat - beta0) / sqrt(tau (1 - tau) u' sigma^{-1} u).
double standardized_stat(const AsymptoticContext& ctx, const Vector& beta_hat_A,
                         const Vector& beta0_A);

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

/// Two-sided normal interval for u' beta at the given confidence level.
Interval confidence_interval(const AsymptoticContext& ctx, const Vector& beta_hat_A,
                             double level);

/// Gaussian kernel density of the residuals at zero. The default bandwidth is
/// 1.06 min(sd, IQR/1.349) n^{-1/5}; needs at least 20 residuals.
double estimate_f0(const Vector& residuals, std::optional<double> bandwidth = std::nullopt);

}  // namespace seloqr
