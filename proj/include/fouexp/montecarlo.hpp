#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "fouexp/constants.hpp"
#include "fouexp/density.hpp"
#include "fouexp/estimator.hpp"
#include "fouexp/fou.hpp"

namespace fouexp {

/// Which estimate enters the scaled errors: theta_hat (bias-corrected, clipped) or theta_tilde.
enum class EstimatorChoice { corrected, moment };

struct McConfig {
    ModelParams params;
    ParamSpace space;
    BetaSpec beta;
    double horizon = 50.0;
    std::size_t steps = 0;  // 0: smallest power of two with dt <= 0.025
    std::size_t replications = 10000;
    std::uint64_t seed = 1;
    std::size_t bins = 60;
    EstimatorChoice estimator = EstimatorChoice::corrected;

    void validate() const;
    SampleGrid grid() const;
};

struct Histogram {
    std::vector<double> edges;  // bins + 1 edges
    std::vector<std::size_t> counts;

    /// count / (N * width) for bin i.
    double density(std::size_t i) const;
    std::size_t total() const;
};

struct McSummary {
    std::vector<double> scaled_errors;         // sqrt(T)(estimate - theta), replication order
    std::vector<double> moment_scaled_errors;  // sqrt(T)(theta_tilde - theta)
    double mean = 0.0;
    double variance = 0.0;
    double skewness = 0.0;
    double ks_normal = 0.0;
    double ks_expansion = 0.0;
    double ks_expansion_plus = 0.0;
    std::size_t clipped_count = 0;
    std::size_t failed_count = 0;
    std::size_t replications = 0;
    Histogram histogram;
};

/// Worker count from FOUEXP_THREADS, else the hardware concurrency (at least 1).
unsigned default_thread_count();

/// Runs fn(i) for i in [0, count) on up to `threads` workers (0: default_thread_count()).
/// Indices are claimed dynamically; callers write results into slot i, so the outcome
/// does not depend on scheduling. The first exception thrown by fn is rethrown.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& fn);

/// Replication i simulates fOU from stream (seed, i), estimates theta and records
/// sqrt(T)(theta_hat - theta), or sqrt(T)(theta_tilde - theta) for EstimatorChoice::moment.
/// Failed replications (numerical errors) are excluded and counted; more than 1% failures
/// aborts with NumericalError. KS distances compare the
/// scaled errors with N(0, c0) and with both expansion CDFs built from `constants`.
McSummary run_experiment(const McConfig& cfg, const ExpansionConstants& constants, unsigned threads = 0);

/// Two-sided one-sample statistic max_i max(i/N - F(x_i), F(x_i) - (i-1)/N) over the
/// sorted sample.
double ks_statistic(std::span<const double> sorted, const std::function<double(double)>& cdf);

double sample_mean(std::span<const double> x);
double sample_variance(std::span<const double> x);  // divisor N - 1
double sample_skewness(std::span<const double> x);  // m3 / m2^{3/2}

/// Equal-width histogram over [min, max] of the data.
Histogram make_histogram(std::span<const double> x, std::size_t bins);

/// Gaussian kernel density estimate with Silverman's bandwidth, evaluated at `at`.
std::vector<double> gaussian_kde(std::span<const double> x, std::span<const double> at);

struct VarianceReport {
    double empirical = 0.0;    // Var(sqrt(T)(theta_tilde - theta))
    double theoretical = 0.0;  // c0 + 1{H >= 5/8} c2 T^{4H-3}
    double ratio = 0.0;
    double ratio_lo = 0.0;     // 95% delete-one jackknife interval
    double ratio_hi = 0.0;
    std::size_t samples = 0;
};

VarianceReport empirical_variance_check(const McConfig& cfg, const ExpansionConstants& constants,
                                        unsigned threads = 0);
VarianceReport empirical_variance_check(const McSummary& summary, const ExpansionConstants& constants,
                                        double horizon);

struct PortmanteauResult {
    double statistic = 0.0;
    double p_value = 0.0;
    std::size_t lags = 0;
};

/// Ljung-Box test of no autocorrelation up to `lags`, chi-square with `lags` degrees of freedom.
PortmanteauResult ljung_box(std::span<const double> series, std::size_t lags);

/// Biased (divisor N) sample autocovariance about the sample mean at the given lag.
double sample_autocovariance(std::span<const double> x, std::size_t lag);

}  // namespace fouexp
