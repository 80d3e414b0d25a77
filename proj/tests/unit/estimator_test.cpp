#include <gtest/gtest.h>

#include <cmath>

#include "fouexp/constants.hpp"
#include "fouexp/errors.hpp"
#include "fouexp/estimator.hpp"

using namespace fouexp;

TEST(Mu, ClassicalLimit) {
    for (double theta : {0.5, 1.0, 3.0}) EXPECT_NEAR(mu(theta, 1.0, 0.5 + 1e-12), 1.0 / (2.0 * theta), 1e-10);
}

TEST(Mu, ThreeQuarters) { EXPECT_NEAR(mu(1.0, 1.0, 0.75), 0.75 * std::sqrt(M_PI) / 2.0, 1e-14); }

TEST(Mu, DecreasingInTheta) {
    for (double h : {0.55, 0.7})
        for (double sigma : {0.5, 2.0}) EXPECT_LT(mu(2.0, sigma, h), mu(1.0, sigma, h));
}

TEST(QExponent, Branches) {
    EXPECT_DOUBLE_EQ(q_exponent(0.55), 0.5);
    EXPECT_DOUBLE_EQ(q_exponent(0.625), 0.5);
    EXPECT_NEAR(q_exponent(0.7), 0.2, 1e-15);
    EXPECT_THROW(q_exponent(0.75), DomainError);
    EXPECT_THROW(q_exponent(0.5), DomainError);
}

TEST(MomentEstimate, InvertsMu) {
    for (double theta : {0.5, 1.0, 2.0, 4.0})
        for (double h : {0.55, 0.625, 0.7})
            for (double sigma : {0.5, 1.0}) {
                const double T = 50.0;
                EXPECT_NEAR(moment_estimate(mu(theta, sigma, h) * T, T, sigma, h), theta, 1e-12 * theta);
            }
}

TEST(MomentEstimate, UnitArgument) {
    const double h = 0.6, T = 7.0, sigma = 1.3;
    const double q = sigma * sigma * h * std::tgamma(2 * h) * T;
    EXPECT_NEAR(moment_estimate(q, T, sigma, h), 1.0, 1e-14);
}

TEST(MomentEstimate, PowerLawInQ) {
    const double h = 0.65, T = 10.0;
    const double base = moment_estimate(3.0, T, 1.0, h);
    EXPECT_NEAR(moment_estimate(5.0 * 3.0, T, 1.0, h), base * std::pow(5.0, -1.0 / (2 * h)), 1e-13);
}

TEST(MomentEstimate, RejectsDegenerateInput) {
    EXPECT_THROW(moment_estimate(0.0, 1.0, 1.0, 0.6), EstimationError);
    EXPECT_THROW(moment_estimate(-1.0, 1.0, 1.0, 0.6), DomainError);
    EXPECT_THROW(moment_estimate(1.0, 0.0, 1.0, 0.6), DomainError);
}

TEST(BiasCorrectedEstimate, ZeroBetaInsideSpace) {
    const ParamSpace space;
    const auto r = bias_corrected_estimate(2.3, 50.0, 0.6, space, [](double) { return 0.0; });
    EXPECT_EQ(r.theta_hat, 2.3);
    EXPECT_FALSE(r.clipped);
}

TEST(BiasCorrectedEstimate, OutsideSpaceFallsBack) {
    ParamSpace space;
    space.theta_lo = 1.0;
    space.theta_hi = 3.0;
    space.theta_star = 2.0;
    const auto r = bias_corrected_estimate(5.0, 50.0, 0.6, space, [](double) { return 0.0; });
    EXPECT_EQ(r.theta_hat, 2.0);
    EXPECT_TRUE(r.clipped);
}

TEST(BiasCorrectedEstimate, ConstantBeta) {
    const ParamSpace space;
    const double T = 100.0, b = 0.8;
    for (double h : {0.6, 0.7}) {
        const auto r = bias_corrected_estimate(2.0, T, h, space, [b](double) { return b; });
        EXPECT_NEAR(r.theta_hat, 2.0 - std::pow(T, -0.5 - q_exponent(h)) * b, 1e-15);
        EXPECT_FALSE(r.clipped);
    }
}

TEST(BiasCorrectedEstimate, CorrectionLeavingSpaceIsClipped) {
    ParamSpace space;
    space.theta_lo = 1.0;
    space.theta_hi = 3.0;
    space.theta_star = 2.0;
    const auto r = bias_corrected_estimate(1.01, 1.0, 0.6, space, [](double) { return 1.0; });
    EXPECT_TRUE(r.clipped);
    EXPECT_EQ(r.theta_hat, 2.0);
}

TEST(ParamSpace, Validation) {
    ParamSpace s;
    s.theta_star = 20.0;
    EXPECT_THROW(s.validate(), DomainError);
    ParamSpace t;
    t.theta_lo = 0.0;
    EXPECT_THROW(t.validate(), DomainError);
}

TEST(MakeBeta, BiasCorrectMatchesConstants) {
    ModelParams p;
    p.hurst = 0.55;
    p.x0 = 0.4;
    const auto beta = make_beta(BetaSpec::bias_correct(), p);
    EXPECT_NEAR(beta(2.0), bias_correcting_beta(2.0, 1.0, 0.55, 0.4), 1e-15);
    p.hurst = 0.7;
    EXPECT_EQ(make_beta(BetaSpec::bias_correct(), p)(2.0), 0.0);
    EXPECT_EQ(make_beta(BetaSpec::constant(0.3), p)(9.0), 0.3);
}

TEST(Estimate, PathRoundTrip) {
    ModelParams p;
    p.theta = 2.0;
    p.hurst = 0.6;
    const auto path = simulate_fou(p, SampleGrid::with_default_steps(50.0), 3);
    const auto r = estimate(path, ParamSpace{}, [](double) { return 0.0; });
    EXPECT_NEAR(r.q_T, integrate_q(path), 0.0);
    EXPECT_NEAR(r.theta_tilde, moment_estimate(r.q_T, 50.0, 1.0, 0.6), 1e-15);
    EXPECT_EQ(r.q_exponent, 0.5);
    EXPECT_GT(r.theta_tilde, 0.5);
    EXPECT_LT(r.theta_tilde, 8.0);
}
