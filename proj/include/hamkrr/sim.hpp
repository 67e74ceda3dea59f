#ifndef HAMKRR_SIM_HPP
#define HAMKRR_SIM_HPP

#include "hamkrr/core.hpp"
#include "hamkrr/dataset.hpp"
#include "hamkrr/systems.hpp"

#include <cstdint>
#include <vector>

namespace hamkrr {

struct TrajectorySpec {
    Vec x0;
    double t_end = 1.0;
    int n_steps = 2;  // output samples, equally spaced over [0, t_end] inclusive
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;

    void validate() const;
};

struct Trajectory {
    std::vector<double> t;
    std::vector<Vec> x;

    std::size_t size() const { return t.size(); }
};

/// Adaptive Dormand-Prince 8(5,3) integration stepping onto n_steps
/// equally spaced times. Throws IntegrationError on step-size underflow or a
/// non-finite state.
Trajectory integrate(const VectorField& f, const TrajectorySpec& spec);

/// `count` uniform samples from the box [lower, upper], deterministic in `seed`.
std::vector<Vec> sample_ics(const Vec& lower, const Vec& upper, std::size_t count, std::uint64_t seed);

struct NoiseOptions {
    double sigma_n = 0.0;
    /// true: y = f(x_clean) + noise (default). false: y = f(x_noisy) + noise.
    bool derivative_at_clean_state = true;
};

/// Integrates the true system from every initial condition, samples (x, f(x)) at the
/// output times, then perturbs both with independent N(0, sigma_n^2) noise. Each
/// trajectory draws from its own stream derived from (seed, trajectory index).
Dataset generate_dataset(const System& system, const std::vector<Vec>& ics, double t_end,
                         int n_steps, const NoiseOptions& noise, std::uint64_t seed);

/// Scattered samples (no trajectories): x_i + noise, f(x_i) + noise.
Dataset sample_point_dataset(const System& system, const std::vector<Vec>& points,
                             const NoiseOptions& noise, std::uint64_t seed);

}  // namespace hamkrr

#endif
