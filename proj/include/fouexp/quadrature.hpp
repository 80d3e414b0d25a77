#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace fouexp {

struct QuadratureSpec {
    double rel_tol = 1e-7;
    double abs_tol = 1e-12;
    std::size_t max_subdivisions = 4000;
    double tail_cutoff = 40.0;  // R: exponential factors are truncated at |u - x| = R / theta
    bool singularity_split = true;

    void validate() const;

    /// Tolerances for an integral nested inside another one; keeps the inner
    /// noise well below the outer Kronrod error estimate.
    QuadratureSpec nested(double factor = 1e-3) const;
};

struct QuadResult {
    double value = 0.0;
    double error = 0.0;
    std::size_t evaluations = 0;
    std::size_t subdivisions = 0;
};

namespace quad {

using Integrand = std::function<double(double)>;

/// One transformed piece of an integral: the driver integrates `f` over t in [lo, hi].
struct Segment {
    Integrand f;
    double lo = 0.0;
    double hi = 1.0;
};

/// int_a^b g(u) du, no transformation.
Segment plain(Integrand g, double a, double b);

/// int_0^L g(s) s^{nu-1} ds for s in the direction of sign(L) (g receives the signed
/// offset s), integrated in v = |s|^nu, which removes the algebraic endpoint
/// singularity. `from` and `to` are offsets of equal sign with |from| <= |to|.
Segment algebraic(Integrand g, double nu, double from, double to);

/// int over offsets s between 0 and L of g(s) ds with s = L t^power; clusters nodes at
/// the offset origin, for integrands with a |s|^nu cusp there.
Segment graded(Integrand g, double length, double power);

/// int_0^inf g(s) ds with s = scale ((1 - t)^{-power} - 1); for g(s) ~ s^{-beta} pick
/// power = 2 / (beta - 1), which makes the transformed integrand vanish linearly at t = 1.
Segment tail(Integrand g, double scale, double power);

/// Global adaptive Gauss-Kronrod (10/21) over a list of segments: the panel with the
/// largest error is bisected until the total error meets the tolerance. The final sum
/// is taken in segment/panel order so the result does not depend on the refinement
/// history. `extra_error` is a known truncation bound added to the estimate.
QuadResult integrate(const std::vector<Segment>& segments, const QuadratureSpec& spec,
                     double extra_error = 0.0);

QuadResult integrate(const Integrand& f, double a, double b, const QuadratureSpec& spec);

}  // namespace quad
}  // namespace fouexp
