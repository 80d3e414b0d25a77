#pragma once

#include "fouexp/quadrature.hpp"

namespace fouexp {

/// theta and H together with the derived constants alpha_H = H(2H-1) and
/// K_U = -theta^{2H} / (4 H^2 Gamma(2H)).
struct KernelParams {
    double theta;
    double hurst;
    double alpha_H;
    double K_U;

    /// Requires theta > 0 and H in (1/2, 3/4).
    KernelParams(double theta, double hurst);

    double exponent() const noexcept { return 2.0 * hurst - 2.0; }  // p = 2H - 2
    double nu() const noexcept { return 2.0 * hurst - 1.0; }        // p + 1
    double scale() const noexcept { return 1.0 / theta; }           // exponential decay length
};

/// a(x1, x2, x3) = e^{-theta|x1 - x2|} |x2 - x3|^{2H-2}. Throws SingularityError at x2 == x3.
double kernel_a(double x1, double x2, double x3, const KernelParams& p);

/// A(x, y) = int_0^inf e^{-theta|x - u|} |u - y|^{2H-2} du for x, y >= 0.
double half_line_kernel_A(double x, double y, const KernelParams& p, const QuadratureSpec& spec = {});

/// a_T(x, y) = int_0^T e^{-theta|x - z|} |z - y|^{2H-2} dz for x, y in [0, T].
double truncated_kernel_aT(double x, double y, double horizon, const KernelParams& p,
                           const QuadratureSpec& spec = {});

/// Full-line kernel abar(r) = int_R e^{-theta|z|} |z - r|^{2H-2} dz.
double full_line_kernel(double r, const KernelParams& p, const QuadratureSpec& spec = {});

/// abar(0) = 2 Gamma(2H-1) theta^{1-2H}.
double full_line_kernel_at_zero(const KernelParams& p);

/// Constant C with abar(r) <= C (1 ^ r^{2H-2}):
/// 2^{3-2H} theta^{-1} (1 + (2H-1)^{-1} e^{-1}) + 2 theta^{-1} + 2 (2H-1)^{-1}.
double kernel_bound_constant(const KernelParams& p);

/// Closed form of C_U(2, H, theta):
/// theta (4H-1)/(2H)^2 {1 + Gamma(3-4H) Gamma(4H-1) / (Gamma(2H) Gamma(2-2H))}.
double cu2_closed_form(const KernelParams& p);

/// 2 K_U^2 alpha_H^2 * 4 int_0^inf A(0, x) A(x, 0) dx.
QuadResult cu2_quadrature(const KernelParams& p, const QuadratureSpec& spec = {});

/// C_U(3, H, theta) = 4 K_U^3 alpha_H^3 * 6 int int_{(0,inf)^2} A(0, y) A(y, z) A(z, 0) dy dz.
/// Requires H < 2/3, where the double integral converges.
QuadResult cu3_quadrature(const KernelParams& p, const QuadratureSpec& spec = {});

/// E[Gamma^(2)(U_T, U_T)] = 2 K_U^2 alpha_H^2 T^{-1} int int_{[0,T]^2} a_T(x, y) a_T(y, x) dx dy.
QuadResult gamma2_finite_T(const KernelParams& p, double horizon, const QuadratureSpec& spec = {});

}  // namespace fouexp
