#ifndef HAMKRR_CONFIG_HPP
#define HAMKRR_CONFIG_HPP

#include "hamkrr/io.hpp"
#include "hamkrr/systems.hpp"
#include "hamkrr/tuning.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace hamkrr {

struct BoxSample {
    Vec lower;
    Vec upper;
    std::size_t count = 0;
};

struct DatasetRecipe {
    std::vector<Vec> ics;               // explicit initial conditions, or
    std::optional<BoxSample> ic_box;    // uniformly sampled ones, or
    std::optional<BoxSample> scattered; // scattered points (no trajectories)
    double t_end = 0.7;
    int n_steps = 8;
    double sigma_n = 0.01;
    bool derivative_at_clean_state = true;
};

struct ModelConfig {
    std::string variant = "rff";  // "rff" or "exact"
    std::string family = "odd_symplectic";
    std::string parity = "none";  // exact variant only
    Eigen::Index d = 400;
    std::optional<double> sigma;   // nullopt: tune
    std::optional<double> lambda;  // nullopt: tune
};

struct TuningConfig {
    int k = 5;
    std::string method = "ga";  // "ga" or "random"
    int trials = 200;           // random search budget
    std::string score = "derivative";  // or "rollout"
    GaConfig ga;
    HyperBounds bounds;
};

struct EvalConfig {
    std::vector<Vec> test_ics;
    std::optional<BoxSample> test_box;
    double t_end = 2.0;
    int n_steps = 101;
    std::size_t odd_samples = 10000;
    std::optional<StateBox> odd_box;  // defaults to the system's IC box
    std::size_t symplecticity_points = 20;
    double fd_step = 1e-5;
};

struct SweepConfig {
    std::vector<Eigen::Index> d_list{10, 20, 40, 80, 160, 320, 640, 1280, 2560};
    int n_seeds = 50;
    bool exact_reference = true;
};

struct ExperimentConfig {
    std::string system_id = "pendulum";
    Json system_params = Json::object();  // overrides of the published parameter values
    DatasetRecipe dataset;
    ModelConfig model;
    TuningConfig tuning;
    EvalConfig evaluation;
    SweepConfig sweep;
    std::uint64_t seed = 0;

    System system() const;
    ModelRecipe recipe() const;
    bool needs_tuning() const { return !model.sigma || !model.lambda; }
};

/// Missing keys take the defaults above. Throws ConfigError on bad values.
ExperimentConfig config_from_json(const Json& j);
Json config_to_json(const ExperimentConfig& cfg);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Hex digest of the canonical JSON form.
std::string config_digest(const ExperimentConfig& cfg);

/// The three pendulum training trajectories and test trajectory from the experiments.
ExperimentConfig pendulum_preset();
ExperimentConfig cartpole_preset(std::size_t n_ics);
ExperimentConfig twolink_preset(std::size_t n_ics);

}  // namespace hamkrr

#endif
