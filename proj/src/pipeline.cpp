#include "hamkrr/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace hamkrr {

std::vector<Vec> training_ics(const ExperimentConfig& cfg)
{
    const DatasetRecipe& d = cfg.dataset;
    if (!d.ics.empty()) return d.ics;
    if (d.ic_box) return sample_ics(d.ic_box->lower, d.ic_box->upper, d.ic_box->count, derive_seed(cfg.seed, "train-ics"));
    throw ConfigError("dataset needs explicit ics or an ic_box");
}

std::vector<Vec> test_ics(const ExperimentConfig& cfg)
{
    const EvalConfig& e = cfg.evaluation;
    if (!e.test_ics.empty()) return e.test_ics;
    if (e.test_box) return sample_ics(e.test_box->lower, e.test_box->upper, e.test_box->count, derive_seed(cfg.seed, "test-ics"));
    throw ConfigError("evaluation needs explicit test_ics or a test_box");
}

Dataset build_dataset(const ExperimentConfig& cfg)
{
    const System system = cfg.system();
    const NoiseOptions noise{cfg.dataset.sigma_n, cfg.dataset.derivative_at_clean_state};
    if (cfg.dataset.scattered) {
        const BoxSample& b = *cfg.dataset.scattered;
        const auto points = sample_ics(b.lower, b.upper, b.count, derive_seed(cfg.seed, "scattered"));
        return sample_point_dataset(system, points, noise, derive_seed(cfg.seed, "dataset"));
    }
    return generate_dataset(system, training_ics(cfg), cfg.dataset.t_end, cfg.dataset.n_steps, noise,
                            derive_seed(cfg.seed, "dataset"));
}

double rollout_cv_objective(double sigma, double lambda, const Dataset& data, int k, const ModelRecipe& recipe,
                            std::uint64_t seed)
{
    std::map<int, std::vector<Eigen::Index>> rows_by_traj;
    for (Eigen::Index r = 0; r < data.size(); ++r) {
        const int id = data.traj_id[static_cast<std::size_t>(r)];
        if (id < 0) throw InputError("rollout cross-validation needs trajectory data");
        rows_by_traj[id].push_back(r);
    }
    const auto n_traj = static_cast<Eigen::Index>(rows_by_traj.size());
    if (n_traj < 2) throw InputError("rollout cross-validation needs at least two trajectories");
    std::vector<int> ids;
    for (const auto& [id, rows] : rows_by_traj) ids.push_back(id);

    const auto folds = make_folds(n_traj, std::min<Eigen::Index>(k, n_traj), seed);
    double total = 0.0;
    for (const auto& fold : folds) {
        std::vector<char> held(ids.size(), 0);
        for (Eigen::Index f : fold) held[static_cast<std::size_t>(f)] = 1;
        std::vector<Eigen::Index> train;
        for (std::size_t i = 0; i < ids.size(); ++i)
            if (!held[i]) train.insert(train.end(), rows_by_traj[ids[i]].begin(), rows_by_traj[ids[i]].end());
        const LearnedModel model = recipe.fit(data.subset(train), sigma, lambda);

        double fold_mse = 0.0;
        for (Eigen::Index f : fold) {
            const auto& rows = rows_by_traj[ids[static_cast<std::size_t>(f)]];
            const double t0 = data.t[static_cast<std::size_t>(rows.front())];
            const double t1 = data.t[static_cast<std::size_t>(rows.back())];
            const Trajectory pred =
                rollout(model, data.x.row(rows.front()).transpose(), t1 - t0, static_cast<int>(rows.size()));
            double sq = 0.0;
            for (std::size_t s = 0; s < rows.size(); ++s)
                sq += (pred.x[s] - data.x.row(rows[s]).transpose()).squaredNorm();
            fold_mse += sq / static_cast<double>(rows.size());
        }
        total += fold_mse / static_cast<double>(fold.size());
    }
    return total / static_cast<double>(folds.size());
}

HyperObjective make_objective(const ExperimentConfig& cfg, const Dataset& data)
{
    const ModelRecipe recipe = cfg.recipe();
    const int k = cfg.tuning.k;
    const std::uint64_t seed = derive_seed(cfg.seed, "cv");
    if (cfg.tuning.score == "rollout")
        return [&data, recipe, k, seed](double s, double l) { return rollout_cv_objective(s, l, data, k, recipe, seed); };
    return [&data, recipe, k, seed](double s, double l) { return cv_objective(s, l, data, k, recipe, seed); };
}

SearchResult tune(const ExperimentConfig& cfg, const Dataset& data)
{
    HyperBounds bounds = cfg.tuning.bounds;
    // A fixed value pins its coordinate.
    if (cfg.model.sigma) bounds.sigma_lo = bounds.sigma_hi = *cfg.model.sigma;
    if (cfg.model.lambda) bounds.lambda_lo = bounds.lambda_hi = *cfg.model.lambda;
    const HyperObjective objective = make_objective(cfg, data);
    SearchResult r;
    if (cfg.tuning.method == "random") {
        r = random_search(objective, bounds, cfg.tuning.trials, derive_seed(cfg.seed, "ga"));
    } else {
        GaConfig ga = cfg.tuning.ga;
        ga.seed = derive_seed(cfg.seed, "ga");
        r = ga_search(objective, bounds, ga);
    }
    if (!std::isfinite(r.best_value)) throw NumericalError("tuning: every candidate failed");
    return r;
}

double training_mse(const LearnedModel& model, const Dataset& data)
{
    if (data.empty()) return 0.0;
    double sq = 0.0;
    for (Eigen::Index r = 0; r < data.size(); ++r)
        sq += (model.predict(data.x.row(r).transpose()) - data.y.row(r).transpose()).squaredNorm();
    return sq / static_cast<double>(data.size());
}

TrainResult train(const ExperimentConfig& cfg, const Dataset& data)
{
    data.validate();
    if (data.empty()) throw InputError("train: empty dataset");
    TrainResult out;
    double sigma = cfg.model.sigma.value_or(0.0);
    double lambda = cfg.model.lambda.value_or(0.0);
    if (cfg.needs_tuning()) {
        out.search = tune(cfg, data);
        sigma = cfg.model.sigma.value_or(out.search->sigma);
        lambda = cfg.model.lambda.value_or(out.search->lambda);
    }
    const LearnedModel fitted = cfg.recipe().fit(data, sigma, lambda);
    out.model = LearnedModel(fitted.variant(), Provenance{dataset_digest(data), "", cfg.seed});
    out.training_mse = training_mse(out.model, data);
    return out;
}

std::vector<Trajectory> true_trajectories(const System& system, const std::vector<Vec>& ics, double t_end,
                                          int n_steps)
{
    std::vector<Trajectory> out;
    out.reserve(ics.size());
    for (const Vec& x0 : ics) out.push_back(integrate(system.field(), TrajectorySpec{x0, t_end, n_steps}));
    return out;
}

std::vector<Trajectory> model_trajectories(const LearnedModel& model, const std::vector<Vec>& ics, double t_end,
                                           int n_steps)
{
    std::vector<Trajectory> out;
    out.reserve(ics.size());
    for (const Vec& x0 : ics) out.push_back(rollout(model, x0, t_end, n_steps));
    return out;
}

EvalReport evaluate(const ExperimentConfig& cfg, const LearnedModel& model)
{
    const System system = cfg.system();
    if (model.dim() != system.dim()) throw InputError("evaluate: model and system dimensions differ");
    const EvalConfig& e = cfg.evaluation;
    const auto ics = test_ics(cfg);
    const auto truth = true_trajectories(system, ics, e.t_end, e.n_steps);
    const auto learned = model_trajectories(model, ics, e.t_end, e.n_steps);

    EvalReport r;
    r.system = system.id();
    r.model = model.family_name();
    r.seed = cfg.seed;
    r.config_digest = config_digest(cfg);
    for (std::size_t i = 0; i < ics.size(); ++i) r.trajectory_mse.push_back(trajectory_mse(truth[i], learned[i]));
    r.mse = trajectory_mse(truth, learned);

    const StateBox box = e.odd_box.value_or(system.ic_box());
    const std::uint64_t odd_seed = derive_seed(cfg.seed, "odd-error");
    r.odd_error_model = odd_error(model.field(), box, e.odd_samples, odd_seed);
    r.odd_error_true = odd_error(system.field(), box, e.odd_samples, odd_seed);

    if (model.is_symplectic()) {
        const ScalarField h_true = [&system](const Vec& x) { return system.hamiltonian(x); };
        const ScalarField h_learned = [&model](const Vec& x) { return model.hamiltonian(x); };
        for (std::size_t i = 0; i < ics.size(); ++i) {
            HamiltonianRow row;
            row.truth = hamiltonian_stats(h_true, truth[i]);
            row.learned = hamiltonian_stats(h_learned, learned[i]);
            row.offset = row.learned.mean - row.truth.mean;
            std::vector<double> diff;
            for (std::size_t s = 0; s < truth[i].size(); ++s)
                diff.push_back(model.hamiltonian(learned[i].x[s]) - system.hamiltonian(truth[i].x[s]));
            row.centered_variance = mean_variance(diff).variance;
            r.hamiltonian.push_back(row);
        }
    }

    if (e.symplecticity_points > 0) {
        const auto pts = sample_ics(box.lower, box.upper, e.symplecticity_points, derive_seed(cfg.seed, "symplecticity"));
        const VectorField f = model.field();
        const VectorField g = system.field();
        double sum = 0.0;
        for (const Vec& x : pts) {
            const double res = symplecticity_residual(f, x, e.fd_step);
            sum += res;
            r.symplecticity_max = std::max(r.symplecticity_max, res);
            r.symplecticity_true_max = std::max(r.symplecticity_true_max, symplecticity_residual(g, x, e.fd_step));
        }
        r.symplecticity_mean = sum / static_cast<double>(pts.size());
    }
    r.check_consistency();
    return r;
}

SweepResult sweep_features(const ExperimentConfig& cfg, const Dataset& data, const std::vector<Vec>& ics,
                           double sigma, double lambda)
{
    if (cfg.model.variant != "rff") throw ConfigError("sweep-features needs an rff model family");
    if (cfg.sweep.d_list.empty() || cfg.sweep.n_seeds < 1) throw ConfigError("sweep: empty d list or seed count");
    const System system = cfg.system();
    const FeatureFamily family = feature_family_from_string(cfg.model.family);
    const double t_end = cfg.dataset.t_end;
    const int n_steps = cfg.dataset.n_steps;
    const auto truth = true_trajectories(system, ics, t_end, n_steps);

    SweepResult out;
    out.sigma = sigma;
    out.lambda = lambda;
    for (Eigen::Index d : cfg.sweep.d_list) {
        if (d < 1) throw ConfigError("sweep: d must be positive");
        std::vector<double> mses;
        for (int s = 0; s < cfg.sweep.n_seeds; ++s) {
            const ModelRecipe recipe = ModelRecipe::features(
                family, d, derive_seed(cfg.seed, "sweep-features", static_cast<std::uint64_t>(d), static_cast<std::uint64_t>(s)));
            const LearnedModel model = recipe.fit(data, sigma, lambda);
            mses.push_back(trajectory_mse(truth, model_trajectories(model, ics, t_end, n_steps)));
        }
        const MeanVar mv = mean_variance(mses);
        out.rows.push_back(SweepRow{d, mv.mean, std::sqrt(mv.variance), cfg.sweep.n_seeds});
    }
    if (cfg.sweep.exact_reference) {
        const KernelSpec spec = equivalent_kernel(family, sigma);
        const LearnedModel model = fit(data, spec, lambda);
        out.exact_mse = trajectory_mse(truth, model_trajectories(model, ics, t_end, n_steps));
    }
    return out;
}

void GridSpec::validate() const
{
    if (lower.size() == 0 || lower.size() != upper.size() || static_cast<Eigen::Index>(counts.size()) != lower.size())
        throw ConfigError("grid: bounds and counts must share one dimension");
    for (Eigen::Index i = 0; i < lower.size(); ++i) {
        if (counts[static_cast<std::size_t>(i)] < 1) throw ConfigError("grid: counts must be >= 1");
        if (!(lower[i] <= upper[i])) throw ConfigError("grid: lower bound above upper bound");
    }
}

std::vector<Vec> grid_points(const GridSpec& grid)
{
    grid.validate();
    const Eigen::Index n = grid.lower.size();
    std::size_t total = 1;
    for (int c : grid.counts) total *= static_cast<std::size_t>(c);
    std::vector<Vec> pts;
    pts.reserve(total);
    std::vector<int> idx(static_cast<std::size_t>(n), 0);
    for (std::size_t k = 0; k < total; ++k) {
        Vec x(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            const int c = grid.counts[static_cast<std::size_t>(i)];
            const double u = c == 1 ? 0.0 : static_cast<double>(idx[static_cast<std::size_t>(i)]) / (c - 1);
            x[i] = c == 1 ? 0.5 * (grid.lower[i] + grid.upper[i]) : grid.lower[i] + u * (grid.upper[i] - grid.lower[i]);
        }
        pts.push_back(std::move(x));
        for (Eigen::Index i = n - 1; i >= 0; --i) {
            auto& v = idx[static_cast<std::size_t>(i)];
            if (++v < grid.counts[static_cast<std::size_t>(i)]) break;
            v = 0;
        }
    }
    return pts;
}

std::string field_to_csv(const VectorField& f, const std::vector<Vec>& points)
{
    if (points.empty()) throw InputError("field export: no points");
    const Eigen::Index n = points.front().size();
    std::ostringstream os;
    for (Eigen::Index i = 0; i < n; ++i) os << "x_" << i + 1 << ',';
    for (Eigen::Index i = 0; i < n; ++i) os << "f_" << i + 1 << (i + 1 < n ? "," : "\n");
    for (const Vec& x : points) {
        const Vec y = f(x);
        for (Eigen::Index i = 0; i < n; ++i) os << format_double(x[i]) << ',';
        for (Eigen::Index i = 0; i < n; ++i) os << format_double(y[i]) << (i + 1 < n ? "," : "\n");
    }
    return os.str();
}

}  // namespace hamkrr
