#include "seloqr/inference.hpp"

#include <boost/math/distributions/normal.hpp>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace seloqr {

namespace {

// linear-interpolation sample quantile on sorted data
double sorted_quantile(const std::vector<double>& s, double p) {
    const double pos = p * static_cast<double>(s.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
    if (lo + 1 >= s.size()) return s.back();
    const double frac = pos - static_cast<double>(lo);
    return s[lo] + frac * (s[lo + 1] - s[lo]);
}

}  // namespace

SigmaHat sigma_hat(const Dataset& ds, const IndexSet& support) {
    if (support.empty()) throw contract_error("sigma_hat: support must be nonempty");
    if (support.max_index() >= ds.d())
        throw contract_error("sigma_hat: support index out of range");
    const Index n = ds.n();
    const Index m = static_cast<Index>(support.size());
    Eigen::MatrixXd S(n, m);
    for (Index k = 0; k < m; ++k)
        S.col(k) = ds.X().col(support.members()[static_cast<std::size_t>(k)]);

    SigmaHat out;
    out.matrix = (S.adjoint() * S) / static_cast<double>(n);
    out.matrix = 0.5 * (out.matrix + out.matrix.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(out.matrix,
                                                      Eigen::EigenvaluesOnly);
    out.eig_min = es.eigenvalues().minCoeff();
    out.eig_max = es.eigenvalues().maxCoeff();
    out.flagged = !(out.eig_max > 0.0) || out.eig_min < kSigmaEigRelTol * out.eig_max;
    return out;
}

AsymptoticContext::AsymptoticContext(Eigen::MatrixXd sigma, double f0, QuantileLevel tau,
                                     Index n, Vector u)
    : sigma_(std::move(sigma)), f0_(f0), tau_(tau.value()), n_(n), u_(std::move(u)) {
    const Index m = sigma_.rows();
    if (m < 1 || sigma_.cols() != m)
        throw contract_error("AsymptoticContext: sigma must be square and nonempty");
    if (!sigma_.allFinite()) throw contract_error("AsymptoticContext: sigma must be finite");
    if ((sigma_ - sigma_.transpose()).cwiseAbs().maxCoeff() > 1e-10)
        throw contract_error("AsymptoticContext: sigma must be symmetric");
    if (!(f0_ > 0.0) || !std::isfinite(f0_))
        throw contract_error("AsymptoticContext: f0 must be finite and > 0");
    if (n_ < 1) throw contract_error("AsymptoticContext: need n >= 1");
    if (u_.size() != m) throw contract_error("AsymptoticContext: u does not match sigma");
    if (std::abs(u_.norm() - 1.0) > 1e-10)
        throw contract_error("AsymptoticContext: u must have unit norm");

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sigma_, Eigen::EigenvaluesOnly);
    const double emin = es.eigenvalues().minCoeff();
    const double emax = es.eigenvalues().maxCoeff();
    if (!(emax > 0.0) || emin < kSigmaEigRelTol * emax)
        throw contract_error("AsymptoticContext: sigma is numerically singular");

    const Eigen::LDLT<Eigen::MatrixXd> ldlt(sigma_);
    quad_ = u_.dot(ldlt.solve(u_));
    if (!(quad_ > 0.0) || !std::isfinite(quad_))
        throw numerical_error("AsymptoticContext: u' sigma^{-1} u is not positive");
}

AsymptoticContext AsymptoticContext::from_sigma_hat(const SigmaHat& sh, double f0,
                                                    QuantileLevel tau, Index n, Vector u) {
    if (sh.flagged)
        throw contract_error("AsymptoticContext: sigma_hat was flagged as singular");
    return AsymptoticContext(sh.matrix, f0, tau, n, std::move(u));
}

double standardized_stat(const AsymptoticContext& ctx, const Vector& beta_hat_A,
                         const Vector& beta0_A) {
    if (beta_hat_A.size() != ctx.dim() || beta0_A.size() != ctx.dim())
        throw contract_error("standardized_stat: coefficient length does not match sigma");
    if (!beta_hat_A.allFinite() || !beta0_A.allFinite())
        throw contract_error("standardized_stat: coefficients must be finite");
    const double num = std::sqrt(static_cast<double>(ctx.n())) * ctx.f0() *
                       ctx.u().dot(beta_hat_A - beta0_A);
    const double den = std::sqrt(ctx.tau() * (1.0 - ctx.tau()) * ctx.quad());
    return num / den;
}

Interval confidence_interval(const AsymptoticContext& ctx, const Vector& beta_hat_A,
                             double level) {
    if (beta_hat_A.size() != ctx.dim())
        throw contract_error("confidence_interval: coefficient length does not match sigma");
    if (!beta_hat_A.allFinite())
        throw contract_error("confidence_interval: coefficients must be finite");
    if (!(level > 0.0 && level < 1.0))
        throw contract_error("confidence_interval: level must lie in (0,1)");
    const boost::math::normal_distribution<double> N01;
    const double z = boost::math::quantile(N01, 0.5 * (1.0 + level));
    const double center = ctx.u().dot(beta_hat_A);
    const double half = z * std::sqrt(ctx.tau() * (1.0 - ctx.tau()) * ctx.quad()) /
                        (std::sqrt(static_cast<double>(ctx.n())) * ctx.f0());
    return {center - half, center + half};
}

double estimate_f0(const Vector& residuals, std::optional<double> bandwidth) {
    const Index n = residuals.size();
    if (n < 20) throw contract_error("estimate_f0: need at least 20 residuals");
    if (!residuals.allFinite()) throw contract_error("estimate_f0: residuals must be finite");

    double h;
    if (bandwidth) {
        if (!(*bandwidth > 0.0) || !std::isfinite(*bandwidth))
            throw contract_error("estimate_f0: bandwidth must be finite and > 0");
        h = *bandwidth;
    } else {
        const double mean = residuals.mean();
        const double sd = std::sqrt((residuals.array() - mean).square().sum() /
                                    static_cast<double>(n - 1));
        std::vector<double> s(residuals.data(), residuals.data() + n);
        std::sort(s.begin(), s.end());
        const double iqr = sorted_quantile(s, 0.75) - sorted_quantile(s, 0.25);
        double scale = std::min(sd, iqr / 1.349);
        if (!(scale > 0.0)) scale = std::max(sd, iqr / 1.349);
        if (!(scale > 0.0))
            throw numerical_error(
                "estimate_f0: residual spread is zero; pass an explicit bandwidth");
        h = 1.06 * scale * std::pow(static_cast<double>(n), -0.2);
    }

    constexpr double kInvSqrt2Pi = 0.3989422804014327;
    double acc = 0.0;
    for (Index i = 0; i < n; ++i) {
        const double z = residuals[i] / h;
        acc += std::exp(-0.5 * z * z);
    }
    return kInvSqrt2Pi * acc / (static_cast<double>(n) * h);
}

}  // namespace seloqr
