#include "fouexp/fou.hpp"

#include <cmath>

#include "fouexp/errors.hpp"

namespace fouexp {

void ModelParams::validate_for_simulation() const {
    detail::require(std::isfinite(theta) && theta > 0.0, "theta must be positive");
    detail::require(std::isfinite(sigma) && sigma >= 0.0, "sigma must be non-negative");
    detail::require(std::isfinite(hurst) && hurst > 0.0 && hurst < 1.0, "H must lie in (0, 1)");
    detail::require(std::isfinite(x0), "x0 must be finite");
}

void ModelParams::validate_for_estimation() const {
    validate_for_simulation();
    detail::require(sigma > 0.0, "sigma must be positive for estimation");
    detail::require(hurst > 0.5 && hurst < 0.75, "H must lie in (1/2, 3/4) for estimation");
}

namespace {

void check_horizon(const ModelParams& params, const SampleGrid& grid) {
    params.validate_for_simulation();
    detail::require(params.theta * grid.dt() <= kMaxThetaT,
                    "theta * dt exceeds 700; the per-step growth factor would leave double range");
}

// values[k] = x0 e^{-theta t_k} + Y_k with Y the noise recursion started at 0.
void run_recursion(const ModelParams& params, const SampleGrid& grid, std::span<const double> fbm,
                   std::span<double> values) {
    const std::size_t n = grid.steps();
    const double dt = grid.dt();
    const double decay = std::exp(-params.theta * dt);
    const double half = 0.5 * params.theta * dt;
    const double a_next = 1.0 - half;
    const double a_prev = decay * (1.0 + half);

    double noise = 0.0;
    values[0] = params.x0;
    for (std::size_t k = 0; k < n; ++k) {
        noise = decay * noise + params.sigma * (a_next * fbm[k + 1] - a_prev * fbm[k]);
        values[k + 1] = params.x0 * std::exp(-params.theta * grid.time(k + 1)) + noise;
    }
}

}  // namespace

FouPath simulate_fou_from_driver(const ModelParams& params, const SampleGrid& grid,
                                 std::span<const double> fbm, SeedRecord driver_seed) {
    check_horizon(params, grid);
    detail::require(fbm.size() == grid.steps() + 1, "driver path length must be n + 1");
    FouPath path{grid, std::vector<double>(grid.steps() + 1), params, driver_seed};
    run_recursion(params, grid, fbm, path.values);
    return path;
}

void simulate_fou_into(const ModelParams& params, const SampleGrid& grid, const FgnGenerator& generator,
                       Engine& engine, std::vector<double>& scratch, std::span<double> values) {
    check_horizon(params, grid);
    const std::size_t n = grid.steps();
    detail::require(generator.size() == n, "generator size does not match the grid");
    detail::require(values.size() == n + 1, "output span must have n + 1 points");
    scratch.resize(2 * n + 1);
    std::span<double> increments(scratch.data(), n);
    std::span<double> fbm(scratch.data() + n, n + 1);
    generator.sample(engine, increments);
    cumulate(increments, fbm);
    run_recursion(params, grid, fbm, values);
}

FouPath simulate_fou(const ModelParams& params, const SampleGrid& grid, std::uint64_t seed,
                     std::uint64_t stream) {
    check_horizon(params, grid);
    FgnGenerator generator(HurstParam(params.hurst), grid.steps(), grid.dt());
    Engine engine = make_engine(seed, stream);
    FouPath path{grid, std::vector<double>(grid.steps() + 1), params, SeedRecord{seed, stream}};
    std::vector<double> scratch;
    simulate_fou_into(params, grid, generator, engine, scratch, path.values);
    return path;
}

double integrate_q(std::span<const double> values, double dt) {
    detail::require(values.size() >= 2, "path needs at least two points");
    detail::require(dt > 0.0, "dt must be positive");
    double acc = 0.0;
    for (double v : values) acc += v * v;
    acc -= 0.5 * (values.front() * values.front() + values.back() * values.back());
    return acc * dt;
}

double integrate_q(const FouPath& path) { return integrate_q(path.values, path.grid.dt()); }

}  // namespace fouexp
