#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "fouexp/errors.hpp"
#include "fouexp/estimator.hpp"
#include "fouexp/fou.hpp"

using namespace fouexp;

namespace {

ModelParams model(double theta, double sigma, double h, double x0) {
    ModelParams p;
    p.theta = theta;
    p.sigma = sigma;
    p.hurst = h;
    p.x0 = x0;
    return p;
}

}  // namespace

TEST(SimulateFou, NoiselessRelaxation) {
    const SampleGrid grid(1.0, 256);
    const auto path = simulate_fou(model(2.0, 0.0, 0.6, 1.0), grid, 3);
    for (std::size_t k = 0; k <= grid.steps(); ++k)
        EXPECT_NEAR(path.values[k], std::exp(-2.0 * grid.time(k)), 1e-12 * std::exp(-2.0 * grid.time(k)));
}

TEST(SimulateFou, BrownianCaseMatchesExactOuTransition) {
    // H = 1/2: X_{k+1} | X_k ~ N(e^{-theta dt} X_k, sigma^2 (1 - e^{-2 theta dt}) / (2 theta))
    const double theta = 1.0, dt = 0.1;
    const SampleGrid grid(1.0, 10);
    const double a = std::exp(-theta * dt);
    const double v = (1.0 - std::exp(-2.0 * theta * dt)) / (2.0 * theta);
    // X_10 starting from 0 is N(0, v (1 - a^20) / (1 - a^2)); lag-1 covariance is a Var(X_9)
    const double var10 = v * (1.0 - std::pow(a, 20)) / (1.0 - a * a);
    const double var9 = v * (1.0 - std::pow(a, 18)) / (1.0 - a * a);
    double s0 = 0, s0q = 0, s1 = 0, s1q = 0;
    constexpr int reps = 20000;
    for (int i = 0; i < reps; ++i) {
        const auto path = simulate_fou(model(theta, 1.0, 0.5, 0.0), grid, 17, i);
        const double m0 = path.values[10] * path.values[10];
        const double m1 = path.values[10] * path.values[9];
        s0 += m0;
        s0q += m0 * m0;
        s1 += m1;
        s1q += m1 * m1;
    }
    const double mean0 = s0 / reps, mean1 = s1 / reps;
    const double se0 = std::sqrt((s0q / reps - mean0 * mean0) / reps);
    const double se1 = std::sqrt((s1q / reps - mean1 * mean1) / reps);
    EXPECT_LE(std::abs(mean0 - var10), 3 * se0);
    EXPECT_LE(std::abs(mean1 - a * var9), 3 * se1);
}

TEST(SimulateFou, StationarySecondMoment) {
    const auto p = model(2.0, 1.0, 0.7, 0.0);
    const SampleGrid grid(10.0, 400);
    double s = 0, sq = 0;
    constexpr int reps = 4000;
    for (int i = 0; i < reps; ++i) {
        const double x = simulate_fou(p, grid, 29, i).values.back();
        s += x * x;
        sq += x * x * x * x;
    }
    const double m = s / reps;
    const double se = std::sqrt((sq / reps - m * m) / reps);
    EXPECT_LE(std::abs(m - mu(2.0, 1.0, 0.7)), 3 * se);
}

TEST(SimulateFou, SignFlipIsOdd) {
    const auto p = model(1.5, 0.8, 0.65, 0.7);
    auto q = p;
    q.x0 = -p.x0;
    const SampleGrid grid(5.0, 200);
    const auto fbm = cumulate_to_fbm(simulate_fgn(HurstParam(0.65), grid, 4)).values;
    std::vector<double> flipped(fbm.size());
    for (std::size_t i = 0; i < fbm.size(); ++i) flipped[i] = -fbm[i];
    const auto a = simulate_fou_from_driver(p, grid, fbm);
    const auto b = simulate_fou_from_driver(q, grid, flipped);
    for (std::size_t k = 0; k < a.values.size(); ++k) EXPECT_EQ(a.values[k], -b.values[k]);
    EXPECT_EQ(integrate_q(a), integrate_q(b));
}

TEST(SimulateFou, LinearInSigmaForZeroStart) {
    const SampleGrid grid(3.0, 120);
    const auto fbm = cumulate_to_fbm(simulate_fgn(HurstParam(0.6), grid, 9)).values;
    const auto a = simulate_fou_from_driver(model(2.0, 1.0, 0.6, 0.0), grid, fbm);
    const auto b = simulate_fou_from_driver(model(2.0, 3.0, 0.6, 0.0), grid, fbm);
    for (std::size_t k = 0; k < a.values.size(); ++k) EXPECT_NEAR(b.values[k], 3.0 * a.values[k], 1e-13);
}

TEST(SimulateFou, DeterministicPerSeed) {
    const SampleGrid grid(20.0, 800);
    const auto p = model(2.0, 1.0, 0.55, 0.0);
    EXPECT_EQ(simulate_fou(p, grid, 7, 2).values, simulate_fou(p, grid, 7, 2).values);
}

TEST(SimulateFou, ValidatesInputs) {
    const SampleGrid grid(1.0, 4);
    EXPECT_THROW(simulate_fou(model(0.0, 1.0, 0.6, 0.0), grid, 1), DomainError);
    EXPECT_THROW(simulate_fou(model(1.0, -1.0, 0.6, 0.0), grid, 1), DomainError);
    EXPECT_THROW(simulate_fou(model(1.0, 1.0, 1.0, 0.0), grid, 1), DomainError);
    EXPECT_THROW(simulate_fou(model(1.0, 1.0, 0.6, std::nan("")), grid, 1), DomainError);
    // theta dt above the overflow guard
    EXPECT_THROW(simulate_fou(model(800.0, 1.0, 0.6, 0.0), SampleGrid(1.0, 1), 1), DomainError);
    // long horizons are fine
    EXPECT_NO_THROW(simulate_fou(model(2.0, 1.0, 0.7, 0.0), SampleGrid(400.0, 1024), 1));
    EXPECT_THROW(model(1.0, 1.0, 0.8, 0.0).validate_for_estimation(), DomainError);
    EXPECT_THROW(model(1.0, 0.0, 0.6, 0.0).validate_for_estimation(), DomainError);
}

TEST(IntegrateQ, ConstantPath) {
    const std::vector<double> x(11, 1.5);
    EXPECT_DOUBLE_EQ(integrate_q(x, 0.3), 1.5 * 1.5 * 3.0);
}

TEST(IntegrateQ, SingleStepTrapezoid) {
    const std::vector<double> x{0.0, 1.0};
    EXPECT_DOUBLE_EQ(integrate_q(x, 1.0), 0.5);
}

TEST(IntegrateQ, MeshRefinementConverges) {
    // Same fBm driver sampled on dt, dt/2, dt/4; successive changes shrink.
    const auto p = model(2.0, 1.0, 0.7, 0.0);
    const SampleGrid fine(10.0, 4096);
    const auto fbm = cumulate_to_fbm(simulate_fgn(HurstParam(0.7), fine, 12)).values;
    std::vector<double> q;
    for (std::size_t stride : {4u, 2u, 1u}) {
        std::vector<double> sub;
        for (std::size_t i = 0; i < fbm.size(); i += stride) sub.push_back(fbm[i]);
        const SampleGrid g(10.0, fine.steps() / stride);
        q.push_back(integrate_q(simulate_fou_from_driver(p, g, sub)));
    }
    const double d1 = std::abs(q[1] - q[0]);
    const double d2 = std::abs(q[2] - q[1]);
    EXPECT_LT(d2, d1);
    EXPECT_LT(d2, 0.02 * q[2]);
}
