#ifndef HAMKRR_PIPELINE_HPP
#define HAMKRR_PIPELINE_HPP

#include "hamkrr/config.hpp"

#include <optional>
#include <vector>

namespace hamkrr {

/// Training initial conditions: the explicit list, or draws from the IC box.
std::vector<Vec> training_ics(const ExperimentConfig& cfg);
/// Test initial conditions: the explicit list, or draws from the test box.
std::vector<Vec> test_ics(const ExperimentConfig& cfg);

Dataset build_dataset(const ExperimentConfig& cfg);

/// Hyperparameter objective selected by tuning.score: "derivative" is k-fold CV of
/// the derivative error; "rollout" holds out whole trajectories and scores the
/// trajectory MSE of the model fit on the rest.
HyperObjective make_objective(const ExperimentConfig& cfg, const Dataset& data);
double rollout_cv_objective(double sigma, double lambda, const Dataset& data, int k, const ModelRecipe& recipe,
                            std::uint64_t seed);

SearchResult tune(const ExperimentConfig& cfg, const Dataset& data);

struct TrainResult {
    LearnedModel model;
    std::optional<SearchResult> search;
    double training_mse = 0.0;  // mean squared derivative residual on the training data
};

/// Fits with the configured sigma/lambda, tuning any that are unset.
TrainResult train(const ExperimentConfig& cfg, const Dataset& data);

double training_mse(const LearnedModel& model, const Dataset& data);

std::vector<Trajectory> true_trajectories(const System& system, const std::vector<Vec>& ics, double t_end,
                                          int n_steps);
std::vector<Trajectory> model_trajectories(const LearnedModel& model, const std::vector<Vec>& ics, double t_end,
                                           int n_steps);

/// Trajectory MSE over the test set, odd error of model and truth, Hamiltonian
/// comparison (the learned Hamiltonian along the learned rollout against the true
/// one along the true trajectory) and symplecticity residuals.
EvalReport evaluate(const ExperimentConfig& cfg, const LearnedModel& model);

struct SweepRow {
    Eigen::Index d = 0;
    double mean_mse = 0.0;
    double std_mse = 0.0;  // population standard deviation over seeds
    int n_seeds = 0;
};

struct SweepResult {
    std::vector<SweepRow> rows;
    std::optional<double> exact_mse;
    double sigma = 0.0;
    double lambda = 0.0;
};

/// For every d and seed: draw frequencies, fit on `data`, score the trajectory MSE
/// of rollouts from `ics` against the true system. The exact kernel with the
/// matching structure gives the reference line.
SweepResult sweep_features(const ExperimentConfig& cfg, const Dataset& data, const std::vector<Vec>& ics,
                           double sigma, double lambda);

struct GridSpec {
    Vec lower;
    Vec upper;
    std::vector<int> counts;  // points per axis, each >= 1

    void validate() const;
};

/// Regular grid in lexicographic order (last axis fastest).
std::vector<Vec> grid_points(const GridSpec& grid);

/// Rows (x_1..x_n, f_1..f_n) with a header line.
std::string field_to_csv(const VectorField& f, const std::vector<Vec>& points);

}  // namespace hamkrr

#endif
