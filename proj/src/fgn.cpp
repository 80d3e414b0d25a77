#include "fouexp/fgn.hpp"

#include <fftw3.h>

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <mutex>
#include <sstream>

#include "fouexp/errors.hpp"

namespace fouexp {

namespace {

// FFTW planning is not thread-safe; execution on fresh arrays is.
std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

constexpr double kNegativeEigenvalueTolerance = 1e-12;

}  // namespace

HurstParam::HurstParam(double value) : value_(value) {
    detail::require(std::isfinite(value) && value > 0.0 && value < 1.0,
                    "Hurst index must lie in (0, 1)");
}

SampleGrid::SampleGrid(double horizon, std::size_t steps) : horizon_(horizon), steps_(steps) {
    detail::require(std::isfinite(horizon) && horizon > 0.0, "horizon T must be positive");
    detail::require(steps >= 1, "grid needs at least one step");
}

std::size_t default_steps(double horizon, double max_dt) {
    detail::require(std::isfinite(horizon) && horizon > 0.0, "horizon T must be positive");
    detail::require(max_dt > 0.0, "max_dt must be positive");
    std::size_t n = 2;
    while (horizon / static_cast<double>(n) > max_dt) n *= 2;
    return n;
}

SampleGrid SampleGrid::with_default_steps(double horizon, double max_dt) {
    return SampleGrid(horizon, default_steps(horizon, max_dt));
}

double fgn_autocovariance(double hurst, std::size_t lag, double dt) {
    detail::require(std::isfinite(hurst) && hurst > 0.0 && hurst < 1.0,
                    "Hurst index must lie in (0, 1)");
    detail::require(std::isfinite(dt) && dt > 0.0, "dt must be positive");
    const double two_h = 2.0 * hurst;
    const double k = static_cast<double>(lag);
    const double scale = 0.5 * std::pow(dt, two_h);
    if (lag == 0) return 2.0 * scale;
    return scale * (std::pow(k + 1.0, two_h) - 2.0 * std::pow(k, two_h) + std::pow(k - 1.0, two_h));
}

struct FgnGenerator::Fft {
    fftw_plan plan = nullptr;
    std::size_t m = 0;

    explicit Fft(std::size_t size) : m(size) {
        std::vector<std::complex<double>> in(m), out(m);
        std::lock_guard lock(fftw_planner_mutex());
        plan = fftw_plan_dft_1d(static_cast<int>(m), reinterpret_cast<fftw_complex*>(in.data()),
                                reinterpret_cast<fftw_complex*>(out.data()), FFTW_FORWARD,
                                FFTW_ESTIMATE | FFTW_UNALIGNED);
        if (plan == nullptr) throw NumericalError("FFTW failed to create a plan");
    }
    ~Fft() {
        std::lock_guard lock(fftw_planner_mutex());
        fftw_destroy_plan(plan);
    }
    Fft(const Fft&) = delete;
    Fft& operator=(const Fft&) = delete;

    void forward(std::vector<std::complex<double>>& in, std::vector<std::complex<double>>& out) const {
        fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(in.data()),
                         reinterpret_cast<fftw_complex*>(out.data()));
    }
};

FgnGenerator::FgnGenerator(HurstParam hurst, std::size_t n, double dt, bool force_dense)
    : hurst_(hurst.value()), n_(n), dt_(dt), method_(Method::circulant) {
    detail::require(n >= 1, "fGn sample needs at least one increment");
    detail::require(std::isfinite(dt) && dt > 0.0, "dt must be positive");

    std::vector<double> gamma(n + 1);
    for (std::size_t k = 0; k <= n; ++k) gamma[k] = fgn_autocovariance(hurst_, k, dt_);

    if (!force_dense) {
        const std::size_t m = 2 * n;
        fft_ = std::make_unique<Fft>(m);
        std::vector<std::complex<double>> ring(m), spectrum(m);
        for (std::size_t k = 0; k <= n; ++k) ring[k] = gamma[k];
        for (std::size_t k = n + 1; k < m; ++k) ring[k] = gamma[m - k];
        fft_->forward(ring, spectrum);

        eigenvalues_.resize(m);
        for (std::size_t k = 0; k < m; ++k) eigenvalues_[k] = spectrum[k].real();
        const double max_eig = *std::max_element(eigenvalues_.begin(), eigenvalues_.end());
        const double min_eig = *std::min_element(eigenvalues_.begin(), eigenvalues_.end());
        if (min_eig >= -kNegativeEigenvalueTolerance * max_eig) {
            sqrt_scaled_.resize(m);
            for (std::size_t k = 0; k < m; ++k)
                sqrt_scaled_[k] = std::sqrt(std::max(eigenvalues_[k], 0.0) / static_cast<double>(m));
            return;
        }
        fft_.reset();
    }

    // Dense fallback: lower Cholesky factor of the Toeplitz covariance.
    method_ = Method::dense;
    const auto dim = static_cast<Eigen::Index>(n);
    Eigen::MatrixXd cov(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i)
        for (Eigen::Index j = 0; j < dim; ++j)
            cov(i, j) = gamma[static_cast<std::size_t>(std::abs(i - j))];
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success) {
        const double min_eig = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(cov).eigenvalues().minCoeff();
        std::ostringstream msg;
        msg << "fGn covariance factorization failed (minimal eigenvalue " << min_eig << ")";
        throw FactorizationError(msg.str(), min_eig);
    }
    const Eigen::MatrixXd lower = llt.matrixL();
    cholesky_.resize(n * n);
    for (Eigen::Index i = 0; i < dim; ++i)
        for (Eigen::Index j = 0; j < dim; ++j)
            cholesky_[static_cast<std::size_t>(i) * n + static_cast<std::size_t>(j)] = lower(i, j);
}

FgnGenerator::~FgnGenerator() = default;
FgnGenerator::FgnGenerator(FgnGenerator&&) noexcept = default;
FgnGenerator& FgnGenerator::operator=(FgnGenerator&&) noexcept = default;

void FgnGenerator::sample(Engine& engine, std::span<double> out) const {
    detail::require(out.size() == n_, "output span has the wrong length");
    std::normal_distribution<double> normal;

    if (method_ == Method::circulant) {
        const std::size_t m = 2 * n_;
        std::vector<std::complex<double>> weights(m), transformed(m);
        for (std::size_t k = 0; k < m; ++k) {
            const double re = normal(engine);
            const double im = normal(engine);
            weights[k] = {sqrt_scaled_[k] * re, sqrt_scaled_[k] * im};
        }
        fft_->forward(weights, transformed);
        for (std::size_t j = 0; j < n_; ++j) out[j] = transformed[j].real();
        return;
    }

    std::vector<double> z(n_);
    for (auto& v : z) v = normal(engine);
    for (std::size_t i = 0; i < n_; ++i) {
        const double* row = cholesky_.data() + i * n_;
        double acc = 0.0;
        for (std::size_t j = 0; j <= i; ++j) acc += row[j] * z[j];
        out[i] = acc;
    }
}

std::vector<double> FgnGenerator::sample(Engine& engine) const {
    std::vector<double> out(n_);
    sample(engine, out);
    return out;
}

FgnSample simulate_fgn(HurstParam hurst, const SampleGrid& grid, std::uint64_t seed,
                       std::uint64_t stream) {
    FgnGenerator generator(hurst, grid.steps(), grid.dt());
    Engine engine = make_engine(seed, stream);
    return FgnSample{generator.sample(engine), hurst, grid.dt(), SeedRecord{seed, stream}};
}

void cumulate(std::span<const double> increments, std::span<double> path) {
    detail::require(path.size() == increments.size() + 1, "path must have one more point than increments");
    path[0] = 0.0;
    double acc = 0.0;
    for (std::size_t k = 0; k < increments.size(); ++k) {
        acc += increments[k];
        path[k + 1] = acc;
    }
}

SamplePath cumulate_to_fbm(const FgnSample& sample) {
    detail::require(!sample.increments.empty(), "fGn sample is empty");
    detail::require(sample.dt > 0.0, "fGn sample has non-positive dt");
    const std::size_t n = sample.increments.size();
    SamplePath path{SampleGrid(sample.dt * static_cast<double>(n), n), std::vector<double>(n + 1)};
    cumulate(sample.increments, path.values);
    return path;
}

}  // namespace fouexp
