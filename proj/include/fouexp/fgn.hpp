#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "fouexp/rng.hpp"

namespace fouexp {

/// Hurst index, validated to lie in (0, 1).
class HurstParam {
public:
    explicit HurstParam(double value);

    double value() const noexcept { return value_; }
    operator double() const noexcept { return value_; }

private:
    double value_;
};

/// Uniform grid on [0, T] with n steps.
class SampleGrid {
public:
    SampleGrid(double horizon, std::size_t steps);

    /// Smallest power-of-two step count with T/n <= max_dt.
    static SampleGrid with_default_steps(double horizon, double max_dt = 0.025);

    double horizon() const noexcept { return horizon_; }
    std::size_t steps() const noexcept { return steps_; }
    double dt() const noexcept { return horizon_ / static_cast<double>(steps_); }
    double time(std::size_t k) const noexcept {
        return horizon_ * static_cast<double>(k) / static_cast<double>(steps_);
    }

private:
    double horizon_;
    std::size_t steps_;
};

std::size_t default_steps(double horizon, double max_dt = 0.025);

struct SeedRecord {
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
};

struct FgnSample {
    std::vector<double> increments;
    HurstParam hurst;
    double dt;
    SeedRecord seed;
};

/// Values on the grid points t_0 = 0, ..., t_n = T.
struct SamplePath {
    SampleGrid grid;
    std::vector<double> values;
};

/// Autocovariance of fGn increments at integer lag k on a grid with spacing dt:
/// (dt^{2H}/2)(|k+1|^{2H} - 2|k|^{2H} + |k-1|^{2H}).
double fgn_autocovariance(double hurst, std::size_t lag, double dt);

/// Exact sampler for stationary fGn of fixed (H, n, dt).
///
/// Circulant embedding of the autocovariance into a ring of length 2n; the
/// spectral square root is applied with an FFT. If any circulant eigenvalue is
/// below -1e-12 * max eigenvalue the sampler switches to a dense Cholesky factor
/// of the n x n Toeplitz covariance. Instances are immutable after construction
/// and may be shared across threads.
class FgnGenerator {
public:
    enum class Method { circulant, dense };

    FgnGenerator(HurstParam hurst, std::size_t n, double dt, bool force_dense = false);
    ~FgnGenerator();
    FgnGenerator(FgnGenerator&&) noexcept;
    FgnGenerator& operator=(FgnGenerator&&) noexcept;

    /// Writes n increments drawn from `engine` into `out`.
    void sample(Engine& engine, std::span<double> out) const;

    std::vector<double> sample(Engine& engine) const;

    Method method() const noexcept { return method_; }
    std::size_t size() const noexcept { return n_; }
    double hurst() const noexcept { return hurst_; }
    double dt() const noexcept { return dt_; }

    /// Circulant eigenvalues (length 2n) before clamping; empty for the dense path.
    const std::vector<double>& circulant_eigenvalues() const noexcept { return eigenvalues_; }

private:
    struct Fft;

    double hurst_;
    std::size_t n_;
    double dt_;
    Method method_;
    std::vector<double> eigenvalues_;
    std::vector<double> sqrt_scaled_;  // sqrt(lambda_k / 2n), circulant path
    std::vector<double> cholesky_;     // row-major lower factor, dense path
    std::unique_ptr<Fft> fft_;
};

/// Draws one fGn sample from the stream (seed, stream).
FgnSample simulate_fgn(HurstParam hurst, const SampleGrid& grid, std::uint64_t seed,
                       std::uint64_t stream = 0);

/// fBm path by cumulative summation: path[0] = 0, path[k] = sum_{j<k} increments[j].
SamplePath cumulate_to_fbm(const FgnSample& sample);

void cumulate(std::span<const double> increments, std::span<double> path);

}  // namespace fouexp
