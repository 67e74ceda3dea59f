#ifndef HAMKRR_METRICS_HPP
#define HAMKRR_METRICS_HPP

#include "hamkrr/core.hpp"
#include "hamkrr/sim.hpp"
#include "hamkrr/systems.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace hamkrr {

struct MeanVar {
    double mean = 0.0;
    double variance = 0.0;  // population variance
};

MeanVar mean_variance(const std::vector<double>& values);

/// Mean over trajectories of the per-trajectory mean squared state error.
/// Trajectories must match in count, length and sample times.
double trajectory_mse(const std::vector<Trajectory>& truth, const std::vector<Trajectory>& learned);

/// Per-trajectory mean squared state error.
double trajectory_mse(const Trajectory& truth, const Trajectory& learned);

/// ||x_true(t_k) - x_learned(t_k)|| at every sample.
std::vector<double> pointwise_error(const Trajectory& truth, const Trajectory& learned);

/// e_odd = ||f(x) + f(-x)|| over `count` uniform samples from the box with x_1 >= 0.
MeanVar odd_error(const VectorField& f, const StateBox& box, std::size_t count, std::uint64_t seed);

MeanVar hamiltonian_stats(const ScalarField& h, const Trajectory& trajectory);

/// Central-difference Jacobian with absolute step `step`.
Mat fd_jacobian(const VectorField& f, const Vec& x, double step);

/// ||A - A^T||_F with A = J^T Df(x). The finite-difference step is
/// fd_step * (1 + ||x||).
double symplecticity_residual(const VectorField& f, const Vec& x, double fd_step = 1e-5);

/// Hamiltonian comparison along one test trajectory.
struct HamiltonianRow {
    MeanVar truth;
    MeanVar learned;
    double offset = 0.0;              // learned mean - true mean
    double centered_variance = 0.0;   // variance of (H_learned - H_true)
};

struct EvalReport {
    std::string system;
    std::string model;
    std::vector<double> trajectory_mse;  // per test trajectory
    double mse = 0.0;                    // mean of trajectory_mse
    MeanVar odd_error_model;
    MeanVar odd_error_true;
    std::vector<HamiltonianRow> hamiltonian;  // empty for non-symplectic models
    double symplecticity_mean = 0.0;
    double symplecticity_max = 0.0;
    double symplecticity_true_max = 0.0;
    std::string config_digest;
    std::uint64_t seed = 0;

    /// Throws InputError if `mse` does not equal the mean of `trajectory_mse`.
    void check_consistency() const;
};

/// Plain-text table with the odd-error and Hamiltonian columns.
std::string render_table(const std::vector<EvalReport>& reports);

}  // namespace hamkrr

#endif
