#pragma once

#include "seloqr/types.hpp"

namespace seloqr {

/// Tuning pair (lambda, gamma) for the bounded concave penalty.
class SeloTuning {
public:
    SeloTuning(double lambda, double gamma) : lambda_(lambda), gamma_(gamma) {
        if (!(lambda > 0.0) || !std::isfinite(lambda))
            throw contract_error("SeloTuning: lambda must be finite and > 0");
        if (!(gamma > 0.0) || !std::isfinite(gamma))
            throw contract_error("SeloTuning: gamma must be finite and > 0");
    }
    double lambda() const { return lambda_; }
    double gamma() const { return gamma_; }

private:
    double lambda_;
    double gamma_;
};

/// (lambda / log 2) * log(1 + |b| / (|b| + gamma)).
/// Increases from 0 at b = 0 toward the saturation level lambda as |b| grows.
double penalty_value(double b, const SeloTuning& t);

/// Sum of penalty_value over the coefficients.
double penalty_total(const Vector& beta, const SeloTuning& t);

/// Derivative of the penalty with respect to |b| at |b|, i.e.
/// (lambda / log 2) * gamma / ((|b| + gamma) * (2|b| + gamma)).
/// At b = 0 this is the weight a fresh coordinate sees.
double penalty_derivative(double b, const SeloTuning& t);

}  // namespace seloqr
