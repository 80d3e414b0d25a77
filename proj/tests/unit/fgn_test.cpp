#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "fouexp/errors.hpp"
#include "fouexp/fgn.hpp"

using namespace fouexp;

namespace {

// R_H(s, t) = (s^{2H} + t^{2H} - |t - s|^{2H}) / 2
double fbm_covariance(double h, double s, double t) {
    return 0.5 * (std::pow(s, 2 * h) + std::pow(t, 2 * h) - std::pow(std::abs(t - s), 2 * h));
}

struct MomentAccumulator {
    double sum = 0.0, sum_sq = 0.0;
    std::size_t n = 0;
    void add(double v) {
        sum += v;
        sum_sq += v * v;
        ++n;
    }
    double mean() const { return sum / n; }
    double std_error() const {
        const double m = mean();
        return std::sqrt((sum_sq / n - m * m) / (n - 1));
    }
};

}  // namespace

TEST(FgnAutocovariance, LagZeroIsOne) {
    for (double h : {0.1, 0.5, 0.55, 0.7, 0.95}) EXPECT_DOUBLE_EQ(fgn_autocovariance(h, 0, 1.0), 1.0);
}

TEST(FgnAutocovariance, BrownianIncrementsUncorrelated) { EXPECT_NEAR(fgn_autocovariance(0.5, 1, 1.0), 0.0, 1e-15); }

TEST(FgnAutocovariance, ThreeQuartersLagOne) {
    EXPECT_NEAR(fgn_autocovariance(0.75, 1, 1.0), 0.5 * (std::pow(2.0, 1.5) - 2.0), 1e-15);
}

TEST(FgnAutocovariance, MatchesSecondDifferenceOfFbmCovariance) {
    for (double h : {0.2, 0.5, 0.55, 0.7, 0.9})
        for (std::size_t k = 0; k < 40; ++k) {
            const double kk = static_cast<double>(k);
            // Cov(B_{k+1} - B_k, B_1 - B_0)
            const double ref = fbm_covariance(h, kk + 1, 1) - fbm_covariance(h, kk, 1);
            // rounding is relative to the largest term, (k+1)^{2H}
            const double ulp = std::numeric_limits<double>::epsilon() * std::pow(kk + 1, 2 * h);
            EXPECT_NEAR(fgn_autocovariance(h, k, 1.0), ref, 4 * ulp) << h << " " << k;
        }
}

TEST(FgnAutocovariance, ScalesWithDt) {
    EXPECT_NEAR(fgn_autocovariance(0.7, 3, 0.1), std::pow(0.1, 1.4) * fgn_autocovariance(0.7, 3, 1.0), 1e-15);
}

TEST(HurstParam, RejectsOutsideUnitInterval) {
    EXPECT_THROW(HurstParam(0.0), DomainError);
    EXPECT_THROW(HurstParam(1.0), DomainError);
    EXPECT_THROW(HurstParam(std::nan("")), DomainError);
    EXPECT_NO_THROW(HurstParam(0.5));
}

TEST(SampleGrid, DefaultStepsArePowersOfTwoWithSmallMesh) {
    const auto g = SampleGrid::with_default_steps(50.0);
    EXPECT_LE(g.dt(), 0.025);
    EXPECT_EQ(g.steps() & (g.steps() - 1), 0u);
    EXPECT_GT(50.0 / static_cast<double>(g.steps() / 2), 0.025);
    EXPECT_THROW(SampleGrid(0.0, 4), DomainError);
    EXPECT_THROW(SampleGrid(1.0, 0), DomainError);
}

TEST(SimulateFgn, WhiteNoiseLagOneNearZero) {
    MomentAccumulator lag1;
    for (std::uint64_t s = 0; s < 400; ++s) {
        const auto x = simulate_fgn(HurstParam(0.5), SampleGrid(1024.0, 1024), 11, s).increments;
        double acc = 0.0;
        for (std::size_t i = 0; i + 1 < x.size(); ++i) acc += x[i] * x[i + 1];
        lag1.add(acc / static_cast<double>(x.size() - 1));
    }
    EXPECT_LE(std::abs(lag1.mean()), 3 * lag1.std_error());
}

TEST(SimulateFgn, AutocovariancesMatchAtSmallLags) {
    // dt = 0.1, n = 4096, batch means over independent paths
    constexpr double h = 0.7, dt = 0.1;
    constexpr std::size_t n = 4096;
    const FgnGenerator gen(HurstParam(h), n, dt);
    std::vector<MomentAccumulator> acc(6);
    std::vector<double> x(n);
    for (std::size_t path = 0; path < 1000; ++path) {
        Engine e = make_engine(5, path);
        gen.sample(e, x);
        for (std::size_t k = 0; k < acc.size(); ++k) {
            double s = 0.0;
            for (std::size_t i = 0; i + k < n; ++i) s += x[i] * x[i + k];
            acc[k].add(s / static_cast<double>(n - k));
        }
    }
    for (std::size_t k = 0; k < acc.size(); ++k)
        EXPECT_LE(std::abs(acc[k].mean() - fgn_autocovariance(h, k, dt)), 3 * acc[k].std_error()) << "lag " << k;
}

TEST(SimulateFgn, BitIdenticalForSameSeed) {
    const SampleGrid grid(10.0, 1000);
    const auto a = simulate_fgn(HurstParam(0.7), grid, 123, 4);
    const auto b = simulate_fgn(HurstParam(0.7), grid, 123, 4);
    ASSERT_EQ(a.increments.size(), 1000u);
    EXPECT_EQ(a.increments, b.increments);
    const auto c = simulate_fgn(HurstParam(0.7), grid, 123, 5);
    EXPECT_NE(a.increments, c.increments);
}

TEST(FgnGenerator, CirculantEmbeddingIsNonNegative) {
    for (double h : {0.05, 0.3, 0.5, 0.55, 0.7, 0.9, 0.99}) {
        const FgnGenerator gen(HurstParam(h), 512, 0.01);
        EXPECT_EQ(gen.method(), FgnGenerator::Method::circulant) << h;
        ASSERT_EQ(gen.circulant_eigenvalues().size(), 1024u);
        double max_ev = 0.0;
        for (double ev : gen.circulant_eigenvalues()) max_ev = std::max(max_ev, ev);
        for (double ev : gen.circulant_eigenvalues()) EXPECT_GE(ev, -1e-12 * max_ev) << h;
    }
}

TEST(FgnGenerator, DenseFallbackHasSameCovariance) {
    constexpr double h = 0.6;
    const FgnGenerator gen(HurstParam(h), 16, 1.0, true);
    EXPECT_EQ(gen.method(), FgnGenerator::Method::dense);
    MomentAccumulator lag0, lag3;
    std::vector<double> x(16);
    for (std::size_t i = 0; i < 20000; ++i) {
        Engine e = make_engine(8, i);
        gen.sample(e, x);
        lag0.add(x[5] * x[5]);
        lag3.add(x[2] * x[5]);
    }
    EXPECT_LE(std::abs(lag0.mean() - 1.0), 3 * lag0.std_error());
    EXPECT_LE(std::abs(lag3.mean() - fgn_autocovariance(h, 3, 1.0)), 3 * lag3.std_error());
}

TEST(FgnGenerator, RejectsWrongOutputLength) {
    const FgnGenerator gen(HurstParam(0.6), 8, 1.0);
    Engine e = make_engine(1);
    std::vector<double> x(7);
    EXPECT_THROW(gen.sample(e, x), DomainError);
}

TEST(CumulateToFbm, ZeroIncrementsGiveZeroPath) {
    FgnSample s{std::vector<double>(5, 0.0), HurstParam(0.6), 0.2, {}};
    const auto path = cumulate_to_fbm(s);
    EXPECT_EQ(path.values, std::vector<double>(6, 0.0));
}

TEST(CumulateToFbm, SingleIncrement) {
    FgnSample s{{1.75}, HurstParam(0.6), 1.0, {}};
    const auto path = cumulate_to_fbm(s);
    EXPECT_EQ(path.values, (std::vector<double>{0.0, 1.75}));
}

TEST(CumulateToFbm, TerminalVarianceIsTToTwoH) {
    const SampleGrid grid(1.0, 4096);
    const FgnGenerator gen(HurstParam(0.6), grid.steps(), grid.dt());
    MomentAccumulator var;
    std::vector<double> x(grid.steps());
    for (std::size_t i = 0; i < 3000; ++i) {
        Engine e = make_engine(21, i);
        gen.sample(e, x);
        double b = 0.0;
        for (double v : x) b += v;
        var.add(b * b);
    }
    EXPECT_LE(std::abs(var.mean() - 1.0), 3 * var.std_error());
}
