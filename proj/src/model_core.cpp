#include "seloqr/model_core.hpp"

#include <cmath>
#include <string>

namespace seloqr {

double check_loss(double u, QuantileLevel tau) {
    if (!std::isfinite(u)) throw contract_error("check_loss: u must be finite");
    const double v = u * (tau.value() - (u < 0.0 ? 1.0 : 0.0));
    return v + 0.0;  // normalize -0.0
}

double objective(const Dataset& ds, const Vector& beta, QuantileLevel tau, const SeloTuning& t) {
    if (beta.size() != ds.d())
        throw contract_error("objective: beta has length " + std::to_string(beta.size()) +
                             " but d = " + std::to_string(ds.d()));
    if (!beta.allFinite()) throw contract_error("objective: beta must be finite");
    const Index n = ds.n();
    double loss = 0.0;
    for (Index i = 0; i < n; ++i)
        loss += check_loss(ds.y()[i] - ds.X().row(i).dot(beta), tau);
    return loss / (2.0 * static_cast<double>(n)) + penalty_total(beta, t);
}

KnightTerms knight_decompose(double x, double y, QuantileLevel tau) {
    if (!std::isfinite(x) || !std::isfinite(y))
        throw contract_error("knight_decompose: x and y must be finite");
    KnightTerms out;
    out.linear = y * ((x <= 0.0 ? 1.0 : 0.0) - tau.value());
    if (x > 0.0)
        out.integral = std::max(y - x, 0.0);
    else if (y < 0.0)
        out.integral = std::max(x - y, 0.0);
    else
        out.integral = 0.0;
    out.linear += 0.0;
    out.integral += 0.0;
    return out;
}

Vector partial_residuals(const Dataset& ds, const Vector& beta, Index j) {
    if (beta.size() != ds.d()) throw contract_error("partial_residuals: beta length != d");
    if (j < 0 || j >= ds.d()) throw contract_error("partial_residuals: column index out of range");
    if (!beta.allFinite()) throw contract_error("partial_residuals: beta must be finite");
    const Index n = ds.n();
    const Index d = ds.d();
    Vector r(n);
    for (Index i = 0; i < n; ++i) {
        double acc = ds.y()[i];
        const double* row = ds.X().row(i).data();
        for (Index k = 0; k < d; ++k) {
            if (k == j) continue;
            acc -= row[k] * beta[k];
        }
        r[i] = acc;
    }
    return r;
}

}  // namespace seloqr
