#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fouexp/estimator.hpp"
#include "fouexp/fou.hpp"
#include "fouexp/quadrature.hpp"

namespace fouexp {

/// Every scalar entering the expansion densities, for one (theta, sigma, H, x0, beta).
struct ExpansionConstants {
    double theta = 0.0;
    double sigma = 0.0;
    double hurst = 0.0;
    double x0 = 0.0;

    double c0 = 0.0;
    double c2 = 0.0;
    std::optional<double> c3_prime;  // C_U(3); absent when not computed (see C3Policy)
    double c3 = 0.0;                 // c3_prime + 3 lambda c0^2
    double G = 0.0;
    double C_cap = 0.0;
    double b_inf = 0.0;
    double lambda = 0.0;
    double kappa = 0.0;
    double tau = 0.0;
    double c1 = 0.0;
    double c11_plus = 0.0;
    double c12_plus = 0.0;
    double q = 0.0;
    double beta_at_theta = 0.0;

    /// H <= 5/8: the c3 and c1-lambda terms are active in p_{H,T}.
    bool low_regime() const noexcept { return hurst <= 0.625; }
    /// H >= 5/8: the c2 term is active in p_{H,T}.
    bool high_regime() const noexcept { return hurst >= 0.625; }
};

enum class C3Policy {
    when_needed,  // only for H <= 5/8, where p_{H,T} uses it
    finite,       // whenever the defining integral converges (H < 2/3)
    never,
};

double G_coefficient(double theta, double sigma, double hurst);      // -2 sigma^2 H^2 Gamma(2H) theta^{-2H-1}
double C_coefficient(double theta, double sigma, double hurst);      // sigma^2 H Gamma(2H+2) theta^{-2H-2} / 2
double b_infinity(double theta, double sigma, double hurst, double x0);
double lambda_coefficient(double theta, double hurst);               // (2H+1) / (2 theta)
double c2_closed_form(double theta, double hurst);                   // -(2H-1) theta^{4H-2} / (2H^2 (3-4H) Gamma(2H)^2)
double c0_closed_form(double theta, double hurst);

/// 1{H <= 5/8} (b_inf / G + lambda c0) at the given theta: the beta that makes c1 = 0.
double bias_correcting_beta(double theta, double sigma, double hurst, double x0);

/// C_U(3, H, theta), memoized by (theta, H, quadrature settings). Safe for concurrent use.
double cached_c3_prime(double theta, double hurst, const QuadratureSpec& spec);

ExpansionConstants assemble_constants(const ModelParams& params, const BetaSpec& beta,
                                      const QuadratureSpec& spec = {},
                                      C3Policy policy = C3Policy::when_needed);

struct ConsistencyViolation {
    std::string identity;
    double lhs;
    double rhs;
    double relative_gap;
};

/// Re-derives every relation between the stored fields and reports each one that fails
/// at 1e-12 relative. Identities, by name:
///   c0_closed_form, c2_closed_form, G_closed_form, C_closed_form, b_inf_closed_form,
///   lambda_closed_form, lambda_ratio (lambda = -C/G), kappa_indicator, tau_formula,
///   c1_decomposition (c1 = tau + kappa c0), c3_decomposition (c3 = c3' + 3 lambda c0^2),
///   c11_plus_formula, c12_plus_formula, plus_decomposition
///   (c11+ + c12+ = c1 + 1{H > 5/8}(b_inf/G + lambda c0)), q_exponent, q_seam.
std::vector<ConsistencyViolation> internal_consistency_check(const ExpansionConstants& c);

}  // namespace fouexp
