#include "fouexp/density.hpp"

#include <cmath>
#include <numbers>

#include "fouexp/errors.hpp"

namespace fouexp {

void DensityModel::validate() const {
    detail::require(std::isfinite(horizon) && horizon > 0.0, "T must be positive");
    detail::require(std::isfinite(constants.c0) && constants.c0 > 0.0, "c0 must be positive");
}

HermiteCoefficients correction_coefficients(const DensityModel& model) {
    model.validate();
    const auto& c = model.constants;
    const double T = model.horizon;
    const double root = std::pow(T, -0.5);
    const double c2_power = std::pow(T, 4.0 * c.hurst - 3.0);

    HermiteCoefficients a;
    switch (model.variant) {
        case DensityVariant::normal_only:
            break;
        case DensityVariant::expansion:
            a.a1 = c.c1 * std::pow(T, -c.q);
            if (c.high_regime()) a.a2 = 0.5 * c.c2 * c2_power;
            if (c.low_regime()) a.a3 = c.c3 * root / 3.0;
            break;
        case DensityVariant::expansion_plus:
            a.a1 = c.c11_plus * root + c.c12_plus * std::pow(T, -c.q);
            a.a2 = 0.5 * c.c2 * c2_power;
            a.a3 = c.c3 * root / 3.0;
            break;
    }
    return a;
}

double hermite(int k, double x, double c0) {
    detail::require(std::isfinite(c0) && c0 > 0.0, "c0 must be positive");
    const double u = x / c0;
    switch (k) {
        case 0:
            return 1.0;
        case 1:
            return u;
        case 2:
            return u * u - 1.0 / c0;
        case 3:
            return u * u * u - 3.0 * u / c0;
        default:
            throw DomainError("Hermite polynomials are provided for k = 0..3 only");
    }
}

double normal_pdf(double x, double variance) {
    return std::exp(-0.5 * x * x / variance) / std::sqrt(2.0 * std::numbers::pi * variance);
}

double normal_cdf(double x, double variance) {
    return 0.5 * std::erfc(-x / std::sqrt(2.0 * variance));
}

double expansion_pdf(const DensityModel& model, double x) {
    const auto a = correction_coefficients(model);
    const double c0 = model.constants.c0;
    const double bracket = 1.0 + a.a1 * hermite(1, x, c0) + a.a2 * hermite(2, x, c0) + a.a3 * hermite(3, x, c0);
    return normal_pdf(x, c0) * bracket;
}

double expansion_cdf(const DensityModel& model, double x) {
    const auto a = correction_coefficients(model);
    const double c0 = model.constants.c0;
    // int_{-inf}^x H_k phi = -H_{k-1}(x) phi(x)
    const double shift = a.a1 + a.a2 * hermite(1, x, c0) + a.a3 * hermite(2, x, c0);
    return normal_cdf(x, c0) - normal_pdf(x, c0) * shift;
}

double expansion_moment(const DensityModel& model, int order) {
    const auto a = correction_coefficients(model);
    const double c0 = model.constants.c0;
    // int x^m H_k phi = m!/(m-k)! int x^{m-k} phi for m >= k, else 0
    switch (order) {
        case 1:
            return a.a1;
        case 2:
            return c0 + 2.0 * a.a2;
        case 3:
            return 3.0 * c0 * a.a1 + 6.0 * a.a3;
        default:
            throw DomainError("expansion moments are provided for orders 1..3 only");
    }
}

}  // namespace fouexp
