#include "fouexp/constants.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <shared_mutex>
#include <tuple>

#include "fouexp/errors.hpp"
#include "fouexp/kernels.hpp"

namespace fouexp {

namespace {

void require_model(double theta, double sigma, double hurst) {
    detail::require(std::isfinite(theta) && theta > 0.0, "theta must be positive");
    detail::require(std::isfinite(sigma) && sigma > 0.0, "sigma must be positive");
    detail::require(hurst > 0.5 && hurst < 0.75, "H must lie in (1/2, 3/4)");
}

}  // namespace

double G_coefficient(double theta, double sigma, double hurst) {
    require_model(theta, sigma, hurst);
    return -2.0 * sigma * sigma * hurst * hurst * std::tgamma(2.0 * hurst) * std::pow(theta, -2.0 * hurst - 1.0);
}

double C_coefficient(double theta, double sigma, double hurst) {
    require_model(theta, sigma, hurst);
    return 0.5 * sigma * sigma * hurst * std::tgamma(2.0 * hurst + 2.0) * std::pow(theta, -2.0 * hurst - 2.0);
}

double b_infinity(double theta, double sigma, double hurst, double x0) {
    require_model(theta, sigma, hurst);
    detail::require(std::isfinite(x0), "x0 must be finite");
    // alpha_H Gamma(2H-1) = H Gamma(2H), which stays finite as H -> 1/2
    const double alpha_gamma = hurst * std::tgamma(2.0 * hurst);
    return -0.5 * sigma * sigma * alpha_gamma * (4.0 * hurst - 1.0) * std::pow(theta, -2.0 * hurst - 1.0) +
           x0 * x0 / (2.0 * theta);
}

double lambda_coefficient(double theta, double hurst) {
    detail::require(std::isfinite(theta) && theta > 0.0, "theta must be positive");
    return (2.0 * hurst + 1.0) / (2.0 * theta);
}

double c2_closed_form(double theta, double hurst) {
    detail::require(std::isfinite(theta) && theta > 0.0, "theta must be positive");
    detail::require(hurst > 0.5 && hurst < 0.75, "H must lie in (1/2, 3/4)");
    const double g = std::tgamma(2.0 * hurst);
    return -(2.0 * hurst - 1.0) * std::pow(theta, 4.0 * hurst - 2.0) /
           (2.0 * hurst * hurst * (3.0 - 4.0 * hurst) * g * g);
}

double c0_closed_form(double theta, double hurst) { return cu2_closed_form(KernelParams(theta, hurst)); }

double bias_correcting_beta(double theta, double sigma, double hurst, double x0) {
    if (hurst > 0.625) {
        require_model(theta, sigma, hurst);
        return 0.0;
    }
    return b_infinity(theta, sigma, hurst, x0) / G_coefficient(theta, sigma, hurst) +
           lambda_coefficient(theta, hurst) * c0_closed_form(theta, hurst);
}

double cached_c3_prime(double theta, double hurst, const QuadratureSpec& spec) {
    using Key = std::tuple<double, double, double, double, std::size_t, double, bool>;
    static std::shared_mutex mutex;
    static std::map<Key, double> cache;

    const Key key{theta, hurst, spec.rel_tol, spec.abs_tol, spec.max_subdivisions, spec.tail_cutoff,
                  spec.singularity_split};
    {
        std::shared_lock lock(mutex);
        if (auto it = cache.find(key); it != cache.end()) return it->second;
    }
    const double value = cu3_quadrature(KernelParams(theta, hurst), spec).value;
    std::unique_lock lock(mutex);
    cache.emplace(key, value);
    return value;
}

ExpansionConstants assemble_constants(const ModelParams& params, const BetaSpec& beta, const QuadratureSpec& spec,
                                      C3Policy policy) {
    params.validate_for_estimation();
    spec.validate();

    ExpansionConstants c;
    c.theta = params.theta;
    c.sigma = params.sigma;
    c.hurst = params.hurst;
    c.x0 = params.x0;

    const double theta = c.theta;
    const double H = c.hurst;
    c.c0 = c0_closed_form(theta, H);
    c.c2 = c2_closed_form(theta, H);
    c.G = G_coefficient(theta, c.sigma, H);
    c.C_cap = C_coefficient(theta, c.sigma, H);
    c.b_inf = b_infinity(theta, c.sigma, H, c.x0);
    c.lambda = lambda_coefficient(theta, H);
    c.q = q_exponent(H);
    c.beta_at_theta = make_beta(beta, params)(theta);

    const double low = c.low_regime() ? 1.0 : 0.0;
    c.kappa = low * c.lambda;
    c.tau = low * (c.b_inf / c.G) - c.beta_at_theta;
    c.c1 = c.tau + c.kappa * c.c0;
    c.c11_plus = c.b_inf / c.G + c.lambda * c.c0;
    c.c12_plus = -c.beta_at_theta;

    const bool want_c3 = policy == C3Policy::finite ? H < 2.0 / 3.0
                         : policy == C3Policy::when_needed ? c.low_regime()
                                                           : false;
    if (want_c3) c.c3_prime = cached_c3_prime(theta, H, spec);
    c.c3 = c.c3_prime.value_or(0.0) + 3.0 * c.lambda * c.c0 * c.c0;
    return c;
}

std::vector<ConsistencyViolation> internal_consistency_check(const ExpansionConstants& c) {
    constexpr double kTol = 1e-12;
    std::vector<ConsistencyViolation> out;
    auto check = [&](const char* name, double lhs, double rhs, double scale) {
        const double gap = std::abs(lhs - rhs);
        const double ref = std::max({std::abs(lhs), std::abs(rhs), scale});
        const double rel = ref > 0.0 ? gap / ref : gap;
        if (!(rel <= kTol)) out.push_back({name, lhs, rhs, rel});
    };

    const double H = c.hurst;
    const double low = H <= 0.625 ? 1.0 : 0.0;
    const double high = 1.0 - low;
    const double bg = c.b_inf / c.G;

    check("c0_closed_form", c.c0, c0_closed_form(c.theta, H), 0.0);
    check("c2_closed_form", c.c2, c2_closed_form(c.theta, H), 0.0);
    check("G_closed_form", c.G, G_coefficient(c.theta, c.sigma, H), 0.0);
    check("C_closed_form", c.C_cap, C_coefficient(c.theta, c.sigma, H), 0.0);
    check("b_inf_closed_form", c.b_inf, b_infinity(c.theta, c.sigma, H, c.x0), 0.0);
    check("lambda_closed_form", c.lambda, (2.0 * H + 1.0) / (2.0 * c.theta), 0.0);
    check("lambda_ratio", c.lambda, -c.C_cap / c.G, 0.0);
    check("kappa_indicator", c.kappa, low * c.lambda, 0.0);
    check("tau_formula", c.tau, low * bg - c.beta_at_theta, std::abs(bg) + std::abs(c.beta_at_theta));
    check("c1_decomposition", c.c1, c.tau + c.kappa * c.c0, std::abs(c.tau) + std::abs(c.kappa * c.c0));
    const double c3p = c.c3_prime.value_or(0.0);
    const double lc0 = 3.0 * c.lambda * c.c0 * c.c0;
    check("c3_decomposition", c.c3, c3p + lc0, std::abs(c3p) + lc0);
    check("c11_plus_formula", c.c11_plus, bg + c.lambda * c.c0, std::abs(bg) + std::abs(c.lambda * c.c0));
    check("c12_plus_formula", c.c12_plus, -c.beta_at_theta, 0.0);
    {
        const double extra = high * (bg + c.lambda * c.c0);
        const double scale = std::abs(c.c11_plus) + std::abs(c.c12_plus) + std::abs(c.c1) + std::abs(extra);
        check("plus_decomposition", c.c11_plus + c.c12_plus, c.c1 + extra, scale);
    }
    if (H > 0.5 && H < 0.75) check("q_exponent", c.q, q_exponent(H), 0.0);
    // both branches of q and both indicator regimes meet at H = 5/8
    check("q_seam", 0.5, 3.0 - 4.0 * 0.625, 0.0);
    return out;
}

}  // namespace fouexp
