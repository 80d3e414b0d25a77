#include "fouexp/quadrature.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <queue>
#include <sstream>

#include "fouexp/errors.hpp"

namespace fouexp {

void QuadratureSpec::validate() const {
    detail::require(std::isfinite(rel_tol) && rel_tol > 0.0, "rel_tol must be positive");
    detail::require(std::isfinite(abs_tol) && abs_tol > 0.0, "abs_tol must be positive");
    detail::require(max_subdivisions >= 1, "max_subdivisions must be at least 1");
    detail::require(std::isfinite(tail_cutoff) && tail_cutoff > 0.0, "tail cutoff R must be positive");
}

QuadratureSpec QuadratureSpec::nested(double factor) const {
    QuadratureSpec s = *this;
    s.rel_tol = std::max(rel_tol * factor, 1e-13);
    s.abs_tol = abs_tol * factor;
    s.max_subdivisions = std::max<std::size_t>(max_subdivisions, 2000);
    return s;
}

namespace quad {

Segment plain(Integrand g, double a, double b) { return Segment{std::move(g), a, b}; }

Segment algebraic(Integrand g, double nu, double from, double to) {
    detail::require(nu > 0.0 && nu <= 1.0, "algebraic segment exponent must lie in (0, 1]");
    detail::require(from * to >= 0.0 && std::abs(from) <= std::abs(to),
                    "algebraic segment offsets must share a sign and grow in magnitude");
    const double sign = (from + to) < 0.0 ? -1.0 : 1.0;
    const double inv_nu = 1.0 / nu;
    // int g(s) |s|^{nu-1} ds = (1/nu) int g(sign v^{1/nu}) dv over v in [|from|^nu, |to|^nu]
    auto f = [g = std::move(g), sign, inv_nu](double v) { return inv_nu * g(sign * std::pow(v, inv_nu)); };
    return Segment{std::move(f), std::pow(std::abs(from), nu), std::pow(std::abs(to), nu)};
}

Segment graded(Integrand g, double length, double power) {
    detail::require(power >= 1.0, "grading power must be at least 1");
    auto f = [g = std::move(g), length, power](double t) {
        const double tp = std::pow(t, power - 1.0);
        const double s = length * tp * t;
        if (s == 0.0) return 0.0;
        return g(s) * std::abs(length) * power * tp;
    };
    return Segment{std::move(f), 0.0, 1.0};
}

Segment tail(Integrand g, double scale, double power) {
    detail::require(scale > 0.0 && power > 0.0, "tail map needs positive scale and power");
    auto f = [g = std::move(g), scale, power](double t) {
        const double r = 1.0 - t;
        if (r <= 0.0) return 0.0;
        const double stretch = std::pow(r, -power);
        const double s = scale * std::expm1(-power * std::log1p(-t));
        if (!std::isfinite(s)) return 0.0;
        return g(s) * scale * power * stretch / r;
    };
    return Segment{std::move(f), 0.0, 1.0};
}

namespace {

struct Panel {
    std::size_t segment;
    double a;
    double b;
    double value;
    double error;
    bool frozen;
};

struct ByError {
    bool operator()(const Panel& x, const Panel& y) const {
        if (x.error != y.error) return x.error < y.error;
        if (x.segment != y.segment) return x.segment > y.segment;
        return x.a > y.a;
    }
};

Panel evaluate(const Segment& seg, std::size_t index, double a, double b) {
    using Rule = boost::math::quadrature::gauss_kronrod<double, 21>;
    double err = 0.0;
    const double value = Rule::integrate(seg.f, a, b, 0, 0.0, &err);
    // Boost 1.74 returns the leaf error of the rule mapped to [-1, 1] without the
    // (b - a)/2 Jacobian that it does apply to the value.
    err *= 0.5 * (b - a);
    if (!std::isfinite(value) || !std::isfinite(err)) {
        std::ostringstream msg;
        msg << "non-finite integrand on panel [" << a << ", " << b << "]";
        throw QuadratureError(msg.str(), value, err);
    }
    return Panel{index, a, b, value, err, false};
}

}  // namespace

QuadResult integrate(const std::vector<Segment>& segments, const QuadratureSpec& spec, double extra_error) {
    spec.validate();
    constexpr std::size_t kNodes = 21;

    std::priority_queue<Panel, std::vector<Panel>, ByError> active;
    std::vector<Panel> done;
    QuadResult out;

    double total = 0.0;
    double total_err = 0.0;
    for (std::size_t i = 0; i < segments.size(); ++i) {
        const auto& seg = segments[i];
        if (!(seg.hi > seg.lo)) continue;
        Panel p = evaluate(seg, i, seg.lo, seg.hi);
        out.evaluations += kNodes;
        total += p.value;
        total_err += p.error;
        active.push(p);
    }

    auto tolerance = [&] { return std::max(spec.abs_tol, spec.rel_tol * std::abs(total)); };

    while (!active.empty() && total_err > tolerance()) {
        if (out.subdivisions >= spec.max_subdivisions) {
            std::ostringstream msg;
            msg << "adaptive quadrature did not converge within " << spec.max_subdivisions
                << " subdivisions (estimate " << total << ", error " << total_err << ")";
            throw QuadratureError(msg.str(), total, total_err);
        }
        Panel worst = active.top();
        active.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b) || (worst.b - worst.a) < 1e-15 * std::max(1.0, std::abs(mid))) {
            worst.frozen = true;
            done.push_back(worst);
            continue;
        }
        const auto& seg = segments[worst.segment];
        Panel left = evaluate(seg, worst.segment, worst.a, mid);
        Panel right = evaluate(seg, worst.segment, mid, worst.b);
        out.evaluations += 2 * kNodes;
        ++out.subdivisions;
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        active.push(left);
        active.push(right);
    }

    while (!active.empty()) {
        done.push_back(active.top());
        active.pop();
    }
    std::sort(done.begin(), done.end(), [](const Panel& x, const Panel& y) {
        return x.segment != y.segment ? x.segment < y.segment : x.a < y.a;
    });
    double value = 0.0;
    double error = 0.0;
    for (const auto& p : done) {
        value += p.value;
        error += p.error;
    }
    out.value = value;
    out.error = error + extra_error;
    // extra_error is a fixed truncation bound; refinement cannot reduce it
    if (error > std::max(spec.abs_tol, spec.rel_tol * std::abs(value))) {
        std::ostringstream msg;
        msg << "adaptive quadrature stalled at the rounding floor (estimate " << value << ", error "
            << out.error << ")";
        throw QuadratureError(msg.str(), value, out.error);
    }
    return out;
}

QuadResult integrate(const Integrand& f, double a, double b, const QuadratureSpec& spec) {
    return integrate(std::vector<Segment>{plain(f, a, b)}, spec);
}

}  // namespace quad
}  // namespace fouexp
