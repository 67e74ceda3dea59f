#ifndef HAMKRR_TUNING_HPP
#define HAMKRR_TUNING_HPP

#include "hamkrr/dataset.hpp"
#include "hamkrr/model.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace hamkrr {

struct HyperBounds {
    double sigma_lo = 1.0;
    double sigma_hi = 30.0;
    double lambda_lo = 1e-8;
    double lambda_hi = 1e-1;

    /// Equal bounds pin a coordinate.
    void validate() const;
};

struct GaConfig {
    int population = 24;
    int generations = 40;
    int tournament = 3;
    double crossover_rate = 0.9;
    double blend_alpha = 0.5;   // BLX-alpha crossover
    double mutation_std = 0.1;  // fraction of each coordinate's range, shrinks linearly to 0
    int elitism = 1;
    std::uint64_t seed = 0;

    void validate() const;
};

/// Objective over (sigma, lambda).
using HyperObjective = std::function<double(double sigma, double lambda)>;

struct Candidate {
    double sigma = 0.0;
    double lambda = 0.0;
    double value = 0.0;
};

struct SearchResult {
    double sigma = 0.0;
    double lambda = 0.0;
    double best_value = 0.0;
    /// Best value after initialization and after each generation (GA only).
    std::vector<double> history;
    /// Every evaluated candidate, in evaluation order.
    std::vector<Candidate> evaluated;
};

/// Fold membership: k mutually exclusive, jointly exhaustive index sets after a
/// seeded shuffle. Fold sizes differ by at most one.
std::vector<std::vector<Eigen::Index>> make_folds(Eigen::Index n_samples, int k, std::uint64_t seed);

/// k-fold cross-validated mean squared derivative error
///   (1/k) sum_i (1/|Z_i|) sum_{(x,y) in Z_i} ||f_{Z \ Z_i}(x) - y||^2.
/// Frequencies for RFF recipes come from recipe.feature_seed, so they are shared by all folds.
double cv_objective(double sigma, double lambda, const Dataset& data, int k, const ModelRecipe& recipe,
                    std::uint64_t seed);

/// Real-coded genetic algorithm over (sigma, log10 lambda): tournament selection,
/// BLX-alpha crossover, Gaussian mutation, elitism. Failed or non-finite objective
/// values count as +infinity.
SearchResult ga_search(const HyperObjective& objective, const HyperBounds& bounds, const GaConfig& config);

/// Best of n_trials draws, uniform in sigma and log-uniform in lambda.
SearchResult random_search(const HyperObjective& objective, const HyperBounds& bounds, int n_trials,
                           std::uint64_t seed);

}  // namespace hamkrr

#endif
