#include "seloqr/penalty.hpp"

#include <cmath>

namespace seloqr {

namespace {
constexpr double kInvLog2 = 1.4426950408889634;  // 1 / log(2)
}

double penalty_value(double b, const SeloTuning& t) {
    if (!std::isfinite(b)) throw contract_error("penalty_value: b must be finite");
    const double a = std::abs(b);
    // log1p keeps the value accurate when |b| << gamma.
    return t.lambda() * kInvLog2 * std::log1p(a / (a + t.gamma()));
}

double penalty_total(const Vector& beta, const SeloTuning& t) {
    double s = 0.0;
    for (Index j = 0; j < beta.size(); ++j) s += penalty_value(beta[j], t);
    return s;
}

double penalty_derivative(double b, const SeloTuning& t) {
    if (!std::isfinite(b)) throw contract_error("penalty_derivative: b must be finite");
    const double a = std::abs(b);
    const double g = t.gamma();
    return t.lambda() * kInvLog2 * g / ((a + g) * (2.0 * a + g));
}

}  // namespace seloqr
