#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "fouexp/errors.hpp"
#include "fouexp/quadrature.hpp"

using namespace fouexp;

TEST(Quadrature, PanelErrorScalesWithWidth) {
    // int_0^b log x dx on a single refinement budget: error estimates must shrink with b
    QuadratureSpec spec;
    spec.rel_tol = 1e-12;
    const auto r = quad::integrate([](double x) { return std::log(x); }, 0.0, 1.0, spec);
    EXPECT_NEAR(r.value, -1.0, 1e-11);
}

TEST(Quadrature, SmoothIntegral) {
    const auto r = quad::integrate([](double x) { return std::cos(x); }, 0.0, std::numbers::pi / 2, {});
    EXPECT_NEAR(r.value, 1.0, 1e-12);
    EXPECT_LE(r.error, 1e-7);
}

TEST(Quadrature, AlgebraicEndpointSingularity) {
    // int_0^1 s^{-0.9} ds = 10, written as g(s) s^{nu-1} with g = 1, nu = 0.1
    const auto r = quad::integrate({quad::algebraic([](double) { return 1.0; }, 0.1, 0.0, 1.0)}, {});
    EXPECT_NEAR(r.value, 10.0, 1e-9);
    // negative direction: int_{-2}^0 |s|^{-0.5} e^{s} ds = sqrt(pi) erf(sqrt 2)
    const auto l = quad::integrate({quad::algebraic([](double s) { return std::exp(s); }, 0.5, 0.0, -2.0)}, {});
    EXPECT_NEAR(l.value, std::sqrt(std::numbers::pi) * std::erf(std::sqrt(2.0)), 1e-9);
}

TEST(Quadrature, GradedCusp) {
    // int_0^1 s^{0.05} ds
    const auto r = quad::integrate({quad::graded([](double s) { return std::pow(s, 0.05); }, 1.0, 20.0)}, {});
    EXPECT_NEAR(r.value, 1.0 / 1.05, 1e-10);
}

TEST(Quadrature, PowerLawTail) {
    // int_0^inf (1 + s)^{-1.7} ds = 1 / 0.7
    const auto r = quad::integrate({quad::tail([](double s) { return std::pow(1.0 + s, -1.7); }, 1.0, 2.0 / 0.7)}, {});
    EXPECT_NEAR(r.value, 1.0 / 0.7, 1e-8);
}

TEST(Quadrature, SegmentsAddUp) {
    auto f = [](double x) { return std::exp(-x); };
    const auto r = quad::integrate({quad::plain(f, 0.0, 1.0), quad::plain(f, 1.0, 3.0), quad::tail([&](double s) { return f(3.0 + s); }, 1.0, 1.0)}, {});
    EXPECT_NEAR(r.value, 1.0, 1e-10);
}

TEST(Quadrature, ExtraErrorIsReported) {
    const auto r = quad::integrate({quad::plain([](double) { return 1.0; }, 0.0, 1.0)}, {}, 0.25);
    EXPECT_GE(r.error, 0.25);
}

TEST(Quadrature, TighterToleranceStaysWithinReportedError) {
    auto f = [](double x) { return std::sqrt(x) * std::log(x + 1e-300); };
    QuadratureSpec loose;
    loose.rel_tol = 1e-6;
    QuadratureSpec tight;
    tight.rel_tol = 1e-10;
    const auto a = quad::integrate(f, 0.0, 1.0, loose);
    const auto b = quad::integrate(f, 0.0, 1.0, tight);
    EXPECT_LE(std::abs(a.value - b.value), a.error);
    EXPECT_NEAR(b.value, -4.0 / 9.0, 1e-9);
}

TEST(Quadrature, BudgetExhaustionThrows) {
    QuadratureSpec spec;
    spec.max_subdivisions = 3;
    spec.rel_tol = 1e-14;
    spec.abs_tol = 1e-300;
    EXPECT_THROW(quad::integrate([](double x) { return std::sin(1.0 / (x + 1e-3)); }, 0.0, 1.0, spec),
                 QuadratureError);
}

TEST(Quadrature, DeterministicResult) {
    auto f = [](double x) { return 1.0 / (1.0 + 100.0 * x * x); };
    const auto a = quad::integrate(f, -1.0, 1.0, {});
    const auto b = quad::integrate(f, -1.0, 1.0, {});
    EXPECT_EQ(a.value, b.value);
    EXPECT_NEAR(a.value, 0.2 * std::atan(10.0), 1e-10);
}

TEST(QuadratureSpec, Validation) {
    QuadratureSpec s;
    s.rel_tol = -1.0;
    EXPECT_THROW(s.validate(), DomainError);
    QuadratureSpec t;
    t.max_subdivisions = 0;
    EXPECT_THROW(t.validate(), DomainError);
    const auto n = QuadratureSpec{}.nested(1e-3);
    EXPECT_LT(n.rel_tol, QuadratureSpec{}.rel_tol);
}
