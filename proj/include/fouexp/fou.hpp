#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "fouexp/fgn.hpp"

namespace fouexp {

/// Langevin model dX = -theta X dt + sigma dB^H, X_0 = x0.
struct ModelParams {
    double theta = 2.0;
    double sigma = 1.0;
    double hurst = 0.55;
    double x0 = 0.0;

    /// theta > 0, sigma >= 0 (sigma = 0 is the noiseless relaxation), H in (0, 1).
    void validate_for_simulation() const;
    /// Additionally sigma > 0 and H in (1/2, 3/4).
    void validate_for_estimation() const;
};

struct FouPath {
    SampleGrid grid;
    std::vector<double> values;
    ModelParams params;
    SeedRecord driver_seed;
};

/// Largest admissible exponent in the per-step factor e^{theta dt}. The recursion below
/// folds e^{-theta t_{k+1}} e^{theta s} into decaying factors, so only theta * dt is
/// bounded; theta * T itself may be arbitrarily large.
inline constexpr double kMaxThetaT = 700.0;

/// Exact-solution recursion driven by a given fBm path on the grid:
///   X_{k+1} = e^{-theta dt} X_k + sigma e^{-theta t_{k+1}} I_k,
/// where I_k is the pathwise integration-by-parts form of the Wiener integral
/// over [t_k, t_{k+1}] with the ds-integral taken by the trapezoid rule.
FouPath simulate_fou_from_driver(const ModelParams& params, const SampleGrid& grid,
                                 std::span<const double> fbm, SeedRecord driver_seed = {});

/// Simulates the fBm driver from the stream (seed, stream) and runs the recursion.
FouPath simulate_fou(const ModelParams& params, const SampleGrid& grid, std::uint64_t seed,
                     std::uint64_t stream = 0);

/// Same as simulate_fou with a pre-built generator; `scratch` is reused between calls.
void simulate_fou_into(const ModelParams& params, const SampleGrid& grid, const FgnGenerator& generator,
                       Engine& engine, std::vector<double>& scratch, std::span<double> values);

/// Trapezoid approximation of the integral of X_t^2 over [0, T].
double integrate_q(const FouPath& path);
double integrate_q(std::span<const double> values, double dt);

}  // namespace fouexp
