#include "fouexp/estimator.hpp"

#include <cmath>

#include "fouexp/constants.hpp"
#include "fouexp/errors.hpp"
#include "fouexp/kernels.hpp"

namespace fouexp {

void ParamSpace::validate() const {
    detail::require(std::isfinite(theta_lo) && theta_lo > 0.0, "theta_lo must be positive");
    detail::require(std::isfinite(theta_hi) && theta_hi > theta_lo, "theta_hi must exceed theta_lo");
    detail::require(theta_star > theta_lo && theta_star < theta_hi, "theta_star must lie inside (theta_lo, theta_hi)");
}

double mu(double theta, double sigma, double hurst) {
    detail::require(std::isfinite(theta) && theta > 0.0, "theta must be positive");
    detail::require(std::isfinite(sigma) && sigma > 0.0, "sigma must be positive");
    detail::require(hurst > 0.0 && hurst < 1.0, "H must lie in (0, 1)");
    return sigma * sigma * hurst * std::tgamma(2.0 * hurst) * std::pow(theta, -2.0 * hurst);
}

double q_exponent(double hurst) {
    detail::require(hurst > 0.5 && hurst < 0.75, "q(H) is defined for H in (1/2, 3/4)");
    return hurst <= 0.625 ? 0.5 : 3.0 - 4.0 * hurst;
}

double moment_estimate(double q_T, double horizon, double sigma, double hurst) {
    detail::require(std::isfinite(q_T) && q_T >= 0.0, "Q_T must be finite and non-negative");
    detail::require(std::isfinite(horizon) && horizon > 0.0, "T must be positive");
    if (q_T == 0.0) throw EstimationError("Q_T = 0: the moment estimator is undefined");
    const double unit = mu(1.0, sigma, hurst);
    return std::pow(q_T / (unit * horizon), -1.0 / (2.0 * hurst));
}

EstimatorResult bias_corrected_estimate(double theta_tilde, double horizon, double hurst,
                                        const ParamSpace& space, const BetaFunction& beta) {
    detail::require(std::isfinite(theta_tilde), "theta_tilde must be finite");
    detail::require(std::isfinite(horizon) && horizon > 0.0, "T must be positive");
    space.validate();

    EstimatorResult r;
    r.theta_tilde = theta_tilde;
    r.q_exponent = q_exponent(hurst);
    if (!space.contains(theta_tilde)) {
        r.theta_hat = space.theta_star;
        r.clipped = true;
        return r;
    }
    const double shift = beta ? beta(theta_tilde) : 0.0;
    const double corrected = theta_tilde - std::pow(horizon, -0.5 - r.q_exponent) * shift;
    if (space.contains(corrected)) {
        r.theta_hat = corrected;
    } else {
        r.theta_hat = space.theta_star;
        r.clipped = true;
    }
    return r;
}

EstimatorResult estimate(const FouPath& path, const ParamSpace& space, const BetaFunction& beta) {
    const auto& p = path.params;
    const double q = integrate_q(path);
    const double tilde = moment_estimate(q, path.grid.horizon(), p.sigma, p.hurst);
    EstimatorResult r = bias_corrected_estimate(tilde, path.grid.horizon(), p.hurst, space, beta);
    r.q_T = q;
    return r;
}

BetaFunction make_beta(const BetaSpec& spec, const ModelParams& params) {
    switch (spec.mode) {
        case BetaSpec::Mode::zero:
            return [](double) { return 0.0; };
        case BetaSpec::Mode::constant: {
            detail::require(std::isfinite(spec.value), "constant beta must be finite");
            const double b = spec.value;
            return [b](double) { return b; };
        }
        case BetaSpec::Mode::bias_correct: {
            const double sigma = params.sigma;
            const double hurst = params.hurst;
            const double x0 = params.x0;
            return [sigma, hurst, x0](double theta) {
                return bias_correcting_beta(theta, sigma, hurst, x0);
            };
        }
    }
    return [](double) { return 0.0; };
}

}  // namespace fouexp
