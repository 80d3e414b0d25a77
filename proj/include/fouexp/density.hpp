#pragma once

#include "fouexp/constants.hpp"

namespace fouexp {

enum class DensityVariant { normal_only, expansion, expansion_plus };

struct DensityModel {
    ExpansionConstants constants;
    double horizon = 1.0;
    DensityVariant variant = DensityVariant::expansion;

    void validate() const;
};

/// Coefficients of H_1, H_2, H_3 in p = phi (1 + a1 H_1 + a2 H_2 + a3 H_3).
///   expansion:      a1 = c1 T^{-q}, a2 = 1{H >= 5/8} c2 T^{4H-3} / 2, a3 = 1{H <= 5/8} c3 T^{-1/2} / 3
///   expansion_plus: a1 = c11+ T^{-1/2} + c12+ T^{-q}, a2 = c2 T^{4H-3} / 2, a3 = c3 T^{-1/2} / 3
struct HermiteCoefficients {
    double a1 = 0.0;
    double a2 = 0.0;
    double a3 = 0.0;
};

HermiteCoefficients correction_coefficients(const DensityModel& model);

/// H_k(x; 0, c0) = e^{x^2/(2 c0)} (-d/dx)^k e^{-x^2/(2 c0)} for k in {0, 1, 2, 3}.
double hermite(int k, double x, double c0);

double normal_pdf(double x, double variance);
double normal_cdf(double x, double variance);

/// Signed density; Edgeworth-type tails may dip below zero and are returned as-is.
double expansion_pdf(const DensityModel& model, double x);

/// Phi(x; 0, c0) - phi(x; 0, c0) (a1 + a2 H_1(x) + a3 H_2(x)).
double expansion_cdf(const DensityModel& model, double x);

/// Raw moments of the signed density, order 1..3:
///   m1 = a1, m2 = c0 + 2 a2, m3 = 3 c0 a1 + 6 a3.
double expansion_moment(const DensityModel& model, int order);

}  // namespace fouexp
