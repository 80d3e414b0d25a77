#pragma once

#include <functional>

#include "fouexp/fou.hpp"

namespace fouexp {

/// Bounded parameter space (lo, hi) with the fallback value used when an estimate leaves it.
struct ParamSpace {
    double theta_lo = 0.1;
    double theta_hi = 10.0;
    double theta_star = 1.0;

    void validate() const;
    bool contains(double theta) const noexcept { return theta > theta_lo && theta < theta_hi; }
};

/// Choice of the second-order correction function beta.
struct BetaSpec {
    enum class Mode { zero, bias_correct, constant };

    Mode mode = Mode::zero;
    double value = 0.0;  // used by Mode::constant

    static BetaSpec zero() { return {}; }
    static BetaSpec bias_correct() { return {Mode::bias_correct, 0.0}; }
    static BetaSpec constant(double b) { return {Mode::constant, b}; }
};

using BetaFunction = std::function<double(double theta)>;

/// beta(theta) for the given mode. In bias_correct mode this is
/// 1{H <= 5/8} (b_inf(theta)/G(theta) + lambda(theta) c0(theta)), the value that
/// annihilates the first-order mean term c1.
BetaFunction make_beta(const BetaSpec& spec, const ModelParams& params);

struct EstimatorResult {
    double q_T = 0.0;
    double theta_tilde = 0.0;
    double theta_hat = 0.0;
    bool clipped = false;
    double q_exponent = 0.0;
};

/// Stationary second moment sigma^2 H Gamma(2H) theta^{-2H}.
double mu(double theta, double sigma, double hurst);

/// Correction-order exponent: 1/2 on (1/2, 5/8], 3 - 4H on (5/8, 3/4).
double q_exponent(double hurst);

/// Unique root of mu(theta) = q_T / T.
double moment_estimate(double q_T, double horizon, double sigma, double hurst);

/// theta_hat = theta_tilde - T^{-1/2-q(H)} beta(theta_tilde), replaced by theta_star
/// unless both theta_tilde and the corrected value lie in the parameter space.
EstimatorResult bias_corrected_estimate(double theta_tilde, double horizon, double hurst,
                                        const ParamSpace& space, const BetaFunction& beta);

/// Q_T, moment estimate and corrected estimate for one path.
EstimatorResult estimate(const FouPath& path, const ParamSpace& space, const BetaFunction& beta);

}  // namespace fouexp
