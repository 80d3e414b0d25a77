#include "fouexp/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <numbers>
#include <sstream>
#include <string>
#include <thread>

#include "fouexp/errors.hpp"

namespace fouexp {

void McConfig::validate() const {
    params.validate_for_estimation();
    space.validate();
    detail::require(std::isfinite(horizon) && horizon > 0.0, "T must be positive");
    detail::require(replications >= 100, "at least 100 replications are required");
    detail::require(bins >= 1, "histogram needs at least one bin");
    if (steps != 0) detail::require(steps >= 2, "grid needs at least two steps");
}

SampleGrid McConfig::grid() const {
    return steps == 0 ? SampleGrid::with_default_steps(horizon) : SampleGrid(horizon, steps);
}

double Histogram::density(std::size_t i) const {
    const double width = edges[i + 1] - edges[i];
    const auto n = static_cast<double>(total());
    return n > 0.0 && width > 0.0 ? static_cast<double>(counts[i]) / (n * width) : 0.0;
}

std::size_t Histogram::total() const {
    std::size_t n = 0;
    for (auto c : counts) n += c;
    return n;
}

unsigned default_thread_count() {
    if (const char* env = std::getenv("FOUEXP_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v >= 1) return static_cast<unsigned>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& fn) {
    if (threads == 0) threads = default_thread_count();
    const auto workers = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(count, 1)));
    std::atomic<std::size_t> next{0};
    std::atomic<bool> stop{false};
    std::exception_ptr error;
    std::mutex error_mutex;

    auto work = [&] {
        while (!stop.load(std::memory_order_relaxed)) {
            const std::size_t i = next.fetch_add(1);
            if (i >= count) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
                stop = true;
            }
        }
    };
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    if (error) std::rethrow_exception(error);
}

double sample_mean(std::span<const double> x) {
    detail::require(!x.empty(), "empty sample");
    double s = 0.0;
    for (double v : x) s += v;
    return s / static_cast<double>(x.size());
}

double sample_variance(std::span<const double> x) {
    detail::require(x.size() >= 2, "variance needs at least two samples");
    const double m = sample_mean(x);
    double s = 0.0;
    for (double v : x) s += (v - m) * (v - m);
    return s / static_cast<double>(x.size() - 1);
}

double sample_skewness(std::span<const double> x) {
    detail::require(x.size() >= 3, "skewness needs at least three samples");
    const double m = sample_mean(x);
    double m2 = 0.0, m3 = 0.0;
    for (double v : x) {
        const double d = v - m;
        m2 += d * d;
        m3 += d * d * d;
    }
    const auto n = static_cast<double>(x.size());
    m2 /= n;
    m3 /= n;
    return m2 > 0.0 ? m3 / std::pow(m2, 1.5) : 0.0;
}

double ks_statistic(std::span<const double> sorted, const std::function<double(double)>& cdf) {
    detail::require(!sorted.empty(), "KS statistic needs at least one sample");
    const auto n = static_cast<double>(sorted.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        const double f = cdf(sorted[i]);
        const double above = static_cast<double>(i + 1) / n - f;
        const double below = f - static_cast<double>(i) / n;
        d = std::max({d, above, below});
    }
    return d;
}

Histogram make_histogram(std::span<const double> x, std::size_t bins) {
    detail::require(!x.empty(), "histogram of an empty sample");
    detail::require(bins >= 1, "histogram needs at least one bin");
    auto [lo_it, hi_it] = std::minmax_element(x.begin(), x.end());
    double lo = *lo_it, hi = *hi_it;
    if (hi <= lo) {
        lo -= 0.5;
        hi += 0.5;
    }
    Histogram h;
    h.edges.resize(bins + 1);
    for (std::size_t i = 0; i <= bins; ++i)
        h.edges[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(bins);
    h.counts.assign(bins, 0);
    const double width = (hi - lo) / static_cast<double>(bins);
    for (double v : x) {
        auto k = static_cast<std::size_t>((v - lo) / width);
        if (k >= bins) k = bins - 1;
        ++h.counts[k];
    }
    return h;
}

std::vector<double> gaussian_kde(std::span<const double> x, std::span<const double> at) {
    detail::require(x.size() >= 2, "KDE needs at least two samples");
    const auto n = static_cast<double>(x.size());
    std::vector<double> sorted(x.begin(), x.end());
    std::sort(sorted.begin(), sorted.end());
    auto quantile = [&](double p) {
        const double pos = p * (n - 1.0);
        const auto i = static_cast<std::size_t>(pos);
        const double frac = pos - static_cast<double>(i);
        return i + 1 < sorted.size() ? sorted[i] * (1.0 - frac) + sorted[i + 1] * frac : sorted[i];
    };
    const double sd = std::sqrt(sample_variance(x));
    const double iqr = quantile(0.75) - quantile(0.25);
    double spread = std::min(sd, iqr / 1.34);
    if (!(spread > 0.0)) spread = sd > 0.0 ? sd : 1.0;
    const double bw = 0.9 * spread * std::pow(n, -0.2);

    const double norm = 1.0 / (n * bw * std::sqrt(2.0 * std::numbers::pi));
    std::vector<double> out(at.size());
    for (std::size_t j = 0; j < at.size(); ++j) {
        double s = 0.0;
        for (double v : sorted) {
            const double u = (at[j] - v) / bw;
            s += std::exp(-0.5 * u * u);
        }
        out[j] = s * norm;
    }
    return out;
}

namespace {

struct Replication {
    double theta_tilde = 0.0;
    double theta_hat = 0.0;
    bool clipped = false;
    bool failed = false;
};

}  // namespace

McSummary run_experiment(const McConfig& cfg, const ExpansionConstants& constants, unsigned threads) {
    cfg.validate();
    const SampleGrid grid = cfg.grid();
    const FgnGenerator generator(HurstParam(cfg.params.hurst), grid.steps(), grid.dt());
    const BetaFunction beta = make_beta(cfg.beta, cfg.params);

    std::vector<Replication> results(cfg.replications);
    parallel_for(cfg.replications, threads, [&](std::size_t i) {
        thread_local std::vector<double> scratch;
        thread_local std::vector<double> values;
        values.resize(grid.steps() + 1);
        Engine engine = make_engine(cfg.seed, i);
        simulate_fou_into(cfg.params, grid, generator, engine, scratch, values);
        Replication r;
        try {
            const double q = integrate_q(values, grid.dt());
            r.theta_tilde = moment_estimate(q, grid.horizon(), cfg.params.sigma, cfg.params.hurst);
            const auto est = bias_corrected_estimate(r.theta_tilde, grid.horizon(), cfg.params.hurst, cfg.space, beta);
            r.theta_hat = est.theta_hat;
            r.clipped = est.clipped;
            if (!std::isfinite(r.theta_tilde) || !std::isfinite(r.theta_hat)) r.failed = true;
        } catch (const NumericalError&) {
            r.failed = true;
        }
        results[i] = r;
    });

    McSummary s;
    s.replications = cfg.replications;
    const double root_t = std::sqrt(grid.horizon());
    const double theta = cfg.params.theta;
    s.scaled_errors.reserve(cfg.replications);
    s.moment_scaled_errors.reserve(cfg.replications);
    for (const auto& r : results) {
        if (r.failed) {
            ++s.failed_count;
            continue;
        }
        if (r.clipped) ++s.clipped_count;
        const double chosen = cfg.estimator == EstimatorChoice::moment ? r.theta_tilde : r.theta_hat;
        s.scaled_errors.push_back(root_t * (chosen - theta));
        s.moment_scaled_errors.push_back(root_t * (r.theta_tilde - theta));
    }
    if (s.failed_count * 100 > cfg.replications) {
        std::ostringstream msg;
        msg << s.failed_count << " of " << cfg.replications << " replications failed (more than 1%)";
        throw NumericalError(msg.str());
    }

    s.mean = sample_mean(s.scaled_errors);
    s.variance = sample_variance(s.scaled_errors);
    s.skewness = sample_skewness(s.scaled_errors);
    s.histogram = make_histogram(s.scaled_errors, cfg.bins);

    std::vector<double> sorted = s.scaled_errors;
    std::sort(sorted.begin(), sorted.end());
    const double c0 = constants.c0;
    const DensityModel expansion{constants, grid.horizon(), DensityVariant::expansion};
    const DensityModel plus{constants, grid.horizon(), DensityVariant::expansion_plus};
    s.ks_normal = ks_statistic(sorted, [c0](double x) { return normal_cdf(x, c0); });
    s.ks_expansion = ks_statistic(sorted, [&](double x) { return expansion_cdf(expansion, x); });
    s.ks_expansion_plus = ks_statistic(sorted, [&](double x) { return expansion_cdf(plus, x); });
    return s;
}

VarianceReport empirical_variance_check(const McSummary& summary, const ExpansionConstants& constants,
                                        double horizon) {
    const auto& x = summary.moment_scaled_errors;
    detail::require(x.size() >= 3, "variance check needs at least three replications");
    const auto n = static_cast<double>(x.size());

    VarianceReport r;
    r.samples = x.size();
    r.empirical = sample_variance(x);
    r.theoretical = constants.c0;
    if (constants.high_regime()) r.theoretical += constants.c2 * std::pow(horizon, 4.0 * constants.hurst - 3.0);
    r.ratio = r.empirical / r.theoretical;

    // delete-one jackknife of the sample variance, via running sums
    const double mean = sample_mean(x);
    double s2 = 0.0;
    for (double v : x) s2 += (v - mean) * (v - mean);
    std::vector<double> loo(x.size());
    double loo_mean = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - mean;
        // removing x_i: sum of squares about the new mean drops by d^2 n / (n - 1)
        loo[i] = (s2 - d * d * n / (n - 1.0)) / (n - 2.0);
        loo_mean += loo[i];
    }
    loo_mean /= n;
    double acc = 0.0;
    for (double v : loo) acc += (v - loo_mean) * (v - loo_mean);
    const double se = std::sqrt((n - 1.0) / n * acc);
    r.ratio_lo = (r.empirical - 1.96 * se) / r.theoretical;
    r.ratio_hi = (r.empirical + 1.96 * se) / r.theoretical;
    return r;
}

VarianceReport empirical_variance_check(const McConfig& cfg, const ExpansionConstants& constants, unsigned threads) {
    const McSummary s = run_experiment(cfg, constants, threads);
    return empirical_variance_check(s, constants, cfg.horizon);
}

double sample_autocovariance(std::span<const double> x, std::size_t lag) {
    detail::require(lag < x.size(), "lag must be smaller than the sample size");
    const double m = sample_mean(x);
    double s = 0.0;
    for (std::size_t i = 0; i + lag < x.size(); ++i) s += (x[i] - m) * (x[i + lag] - m);
    return s / static_cast<double>(x.size());
}

PortmanteauResult ljung_box(std::span<const double> series, std::size_t lags) {
    detail::require(lags >= 1 && lags + 1 < series.size(), "Ljung-Box needs 1 <= lags < n - 1");
    const auto n = static_cast<double>(series.size());
    const double g0 = sample_autocovariance(series, 0);
    detail::require(g0 > 0.0, "constant series");
    double q = 0.0;
    for (std::size_t k = 1; k <= lags; ++k) {
        const double rho = sample_autocovariance(series, k) / g0;
        q += rho * rho / (n - static_cast<double>(k));
    }
    q *= n * (n + 2.0);
    const boost::math::chi_squared dist(static_cast<double>(lags));
    return {q, boost::math::cdf(boost::math::complement(dist, q)), lags};
}

}  // namespace fouexp
