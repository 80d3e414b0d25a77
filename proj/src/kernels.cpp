#include "fouexp/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "fouexp/errors.hpp"

namespace fouexp {

namespace {

using quad::Segment;

double grading_power(const KernelParams& p) { return std::min(1.0 / p.nu(), 20.0); }

// Plain segments covering [a, b] (0 < a < b), broken geometrically with the given ratio.
void add_geometric(std::vector<Segment>& out, const quad::Integrand& f, double a, double b, double ratio) {
    while (a < b) {
        const double next = std::min(a * ratio, b);
        out.push_back(quad::plain(f, a, next));
        a = next;
    }
}

// int_{w_lo}^{w_hi} e^{-theta|w|} |w + d|^{2H-2} dw. The singular point sits at w = -d and
// the exponential has a kink at w = 0; the d-parametrization lets callers pass the
// distance to the singularity exactly.
double marginal(double w_lo, double w_hi, double d, const KernelParams& p, const QuadratureSpec& spec) {
    if (!(w_hi > w_lo)) return 0.0;
    const double theta = p.theta;
    const double expo = p.exponent();
    const double nu = p.nu();
    const double ell = p.scale();
    const double s0 = -d;

    std::vector<double> cuts = {w_lo, w_hi};
    auto add_cut = [&](double w) {
        if (w > w_lo && w < w_hi) cuts.push_back(w);
    };
    add_cut(0.0);
    add_cut(s0);
    for (double m : {1.0, 4.0, 16.0}) {
        add_cut(-m * ell);
        add_cut(m * ell);
    }
    if (spec.singularity_split) {
        add_cut(s0 - ell);
        add_cut(s0 + ell);
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    const quad::Integrand direct = [theta, expo, d](double w) {
        return std::exp(-theta * std::abs(w)) * std::pow(std::abs(w + d), expo);
    };
    const quad::Integrand smooth = [theta, s0](double s) { return std::exp(-theta * std::abs(s0 + s)); };

    std::vector<Segment> segments;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double a = cuts[i];
        const double b = cuts[i + 1];
        const bool right_near = a >= s0 && b <= s0 + ell;
        const bool left_near = b <= s0 && a >= s0 - ell;
        if (spec.singularity_split && right_near) {
            segments.push_back(quad::algebraic(smooth, nu, a - s0, b - s0));
        } else if (spec.singularity_split && left_near) {
            segments.push_back(quad::algebraic(smooth, nu, b - s0, a - s0));
        } else {
            segments.push_back(quad::plain(direct, a, b));
        }
    }
    return quad::integrate(segments, spec).value;
}

double reach(const KernelParams& p, const QuadratureSpec& spec) { return spec.tail_cutoff / p.theta; }

// A(x, y) with y = x - d supplied through d.
double A_offset(double x, double d, const KernelParams& p, const QuadratureSpec& inner) {
    const double r = reach(p, inner);
    return marginal(std::max(-x, -r), r, d, p, inner);
}

}  // namespace

KernelParams::KernelParams(double theta_, double hurst_) : theta(theta_), hurst(hurst_) {
    detail::require(std::isfinite(theta) && theta > 0.0, "theta must be positive");
    detail::require(hurst > 0.5 && hurst < 0.75, "H must lie in (1/2, 3/4)");
    alpha_H = hurst * (2.0 * hurst - 1.0);
    K_U = -std::pow(theta, 2.0 * hurst) / (4.0 * hurst * hurst * std::tgamma(2.0 * hurst));
}

double kernel_a(double x1, double x2, double x3, const KernelParams& p) {
    if (x2 == x3) throw SingularityError("kernel a is singular at x2 == x3");
    return std::exp(-p.theta * std::abs(x1 - x2)) * std::pow(std::abs(x2 - x3), p.exponent());
}

double half_line_kernel_A(double x, double y, const KernelParams& p, const QuadratureSpec& spec) {
    detail::require(x >= 0.0 && y >= 0.0, "A(x, y) needs x, y >= 0");
    spec.validate();
    return A_offset(x, x - y, p, spec);
}

double truncated_kernel_aT(double x, double y, double horizon, const KernelParams& p,
                           const QuadratureSpec& spec) {
    detail::require(std::isfinite(horizon) && horizon > 0.0, "T must be positive");
    detail::require(x >= 0.0 && x <= horizon && y >= 0.0 && y <= horizon, "a_T needs x, y in [0, T]");
    spec.validate();
    const double r = reach(p, spec);
    return marginal(std::max(-x, -r), std::min(horizon - x, r), x - y, p, spec);
}

double full_line_kernel(double r, const KernelParams& p, const QuadratureSpec& spec) {
    spec.validate();
    const double R = reach(p, spec);
    return marginal(-R, R, -r, p, spec);
}

double full_line_kernel_at_zero(const KernelParams& p) {
    return 2.0 * std::tgamma(p.nu()) * std::pow(p.theta, -p.nu());
}

double kernel_bound_constant(const KernelParams& p) {
    const double H = p.hurst;
    const double inv_theta = 1.0 / p.theta;
    const double inv_nu = 1.0 / p.nu();
    return std::pow(2.0, 3.0 - 2.0 * H) * inv_theta * (1.0 + inv_nu * std::exp(-1.0)) + 2.0 * inv_theta +
           2.0 * inv_nu;
}

double cu2_closed_form(const KernelParams& p) {
    const double H = p.hurst;
    const double ratio = std::tgamma(3.0 - 4.0 * H) * std::tgamma(4.0 * H - 1.0) /
                         (std::tgamma(2.0 * H) * std::tgamma(2.0 - 2.0 * H));
    return p.theta * (4.0 * H - 1.0) / (4.0 * H * H) * (1.0 + ratio);
}

QuadResult cu2_quadrature(const KernelParams& p, const QuadratureSpec& spec) {
    spec.validate();
    const QuadratureSpec inner = spec.nested();
    const double ell = p.scale();

    // A(0, x) A(x, 0) as a function of x.
    auto product = [&p, inner](double x) {
        if (x <= 0.0) return 0.0;
        return A_offset(0.0, -x, p, inner) * A_offset(x, x, p, inner);
    };
    const quad::Integrand f = product;
    std::vector<Segment> segments;
    segments.push_back(quad::graded(f, ell, grading_power(p)));
    add_geometric(segments, f, ell, 8.0 * ell, 2.0);
    const double start = 8.0 * ell;
    const double decay = 4.0 - 4.0 * p.hurst;  // integrand ~ x^{4H-4}
    segments.push_back(quad::tail([f, start](double s) { return f(start + s); }, start, 2.0 / (decay - 1.0)));

    QuadResult r = quad::integrate(segments, spec);
    const double factor = 2.0 * p.K_U * p.K_U * p.alpha_H * p.alpha_H * 4.0;
    r.value *= factor;
    r.error *= std::abs(factor);
    return r;
}

namespace {

// F(y) = int_0^inf A(y, z) A(z, 0) dz.
double cu3_inner(double y, const KernelParams& p, const QuadratureSpec& inner, const QuadratureSpec& kernel) {
    const double ell = p.scale();
    const double kappa = grading_power(p);

    // z given as an offset s from the anchor y: A(y, y + s) has d = -s exactly.
    const quad::Integrand from_y = [y, &p, kernel](double s) {
        const double z = y + s;
        if (z <= 0.0) return 0.0;
        return A_offset(y, -s, p, kernel) * A_offset(z, z, p, kernel);
    };
    const quad::Integrand absolute = [y, &p, kernel](double z) {
        return A_offset(y, y - z, p, kernel) * A_offset(z, z, p, kernel);
    };

    std::vector<Segment> segments;
    if (y > 0.0) {
        const double half = 0.5 * y;
        const double near = std::min(half, ell);
        segments.push_back(quad::graded(absolute, near, kappa));
        if (half > near) {
            add_geometric(segments, absolute, near, half, 4.0);
            // mirror image toward y, expressed as offsets from y
            double hi = -near;
            std::vector<Segment> mirrored;
            double lo = hi;
            while (lo > -half) {
                lo = std::max(hi * 4.0, -half);
                mirrored.push_back(quad::plain(from_y, lo, hi));
                hi = lo;
            }
            segments.insert(segments.end(), mirrored.rbegin(), mirrored.rend());
        }
        segments.push_back(quad::graded(from_y, -near, kappa));
    }
    segments.push_back(quad::graded(from_y, ell, kappa));
    // beyond z = 2y + 8 ell the integrand is in its z^{4H-4} regime
    const double start = std::max(8.0 * ell, 2.0 * y);
    add_geometric(segments, from_y, ell, start, 4.0);
    const double decay = 4.0 - 4.0 * p.hurst;
    segments.push_back(
        quad::tail([from_y, start](double s) { return from_y(start + s); }, start, 2.0 / (decay - 1.0)));
    return quad::integrate(segments, inner).value;
}

}  // namespace

QuadResult cu3_quadrature(const KernelParams& p, const QuadratureSpec& spec) {
    detail::require(p.hurst < 2.0 / 3.0, "C_U(3) requires H < 2/3");
    spec.validate();
    const QuadratureSpec inner = spec.nested(1e-2);
    const QuadratureSpec kernel = inner.nested(1e-2);
    const double ell = p.scale();

    const quad::Integrand f = [&p, inner, kernel](double y) {
        if (y <= 0.0) return 0.0;
        return A_offset(0.0, -y, p, kernel) * cu3_inner(y, p, inner, kernel);
    };
    std::vector<Segment> segments;
    segments.push_back(quad::graded(f, ell, grading_power(p)));
    add_geometric(segments, f, ell, 8.0 * ell, 2.0);
    const double start = 8.0 * ell;
    const double decay = 5.0 - 6.0 * p.hurst;  // integrand ~ y^{6H-5}
    segments.push_back(quad::tail([f, start](double s) { return f(start + s); }, start, 2.0 / (decay - 1.0)));

    QuadResult r = quad::integrate(segments, spec);
    const double factor = 4.0 * std::pow(p.K_U * p.alpha_H, 3) * 6.0;
    r.value *= factor;
    r.error *= std::abs(factor);
    return r;
}

QuadResult gamma2_finite_T(const KernelParams& p, double horizon, const QuadratureSpec& spec) {
    detail::require(std::isfinite(horizon) && horizon > 0.0, "T must be positive");
    spec.validate();
    const QuadratureSpec inner = spec.nested(1e-2);
    const QuadratureSpec kernel = inner.nested(1e-2);
    const double ell = p.scale();
    const double kappa = grading_power(p);
    const double R = reach(p, kernel);
    const double T = horizon;

    // a_T(x, x + d) a_T(x + d, x)
    auto pair = [&p, kernel, R, T](double x, double d) {
        const double first = marginal(std::max(-x, -R), std::min(T - x, R), -d, p, kernel);
        const double y = x + d;
        const double second = marginal(std::max(-y, -R), std::min(T - y, R), d, p, kernel);
        return first * second;
    };
    // int_0^{(T-d)/2} pair(x, d) dx
    const quad::Integrand over_x = [pair, ell, kappa, inner, T](double d) {
        if (d <= 0.0 || d >= T) return 0.0;
        const double len = 0.5 * (T - d);
        const quad::Integrand g = [pair, d](double x) { return pair(x, d); };
        std::vector<Segment> segments;
        const double near = std::min(len, ell);
        segments.push_back(quad::graded(g, near, kappa));
        if (len > near) add_geometric(segments, g, near, len, 4.0);
        return quad::integrate(segments, inner).value;
    };

    std::vector<Segment> segments;
    const double near = std::min(T, ell);
    segments.push_back(quad::graded(over_x, near, kappa));
    if (T > near) add_geometric(segments, over_x, near, T, 2.0);

    QuadResult r = quad::integrate(segments, spec);
    const double factor = 2.0 * p.K_U * p.K_U * p.alpha_H * p.alpha_H * 4.0 / T;
    r.value *= factor;
    r.error *= std::abs(factor);
    return r;
}

}  // namespace fouexp
