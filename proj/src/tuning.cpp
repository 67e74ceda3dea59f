#include "hamkrr/tuning.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

namespace hamkrr {

void HyperBounds::validate() const
{
    if (!(sigma_lo > 0.0) || !(sigma_hi >= sigma_lo)) throw ConfigError("invalid sigma bounds");
    if (!(lambda_lo > 0.0) || !(lambda_hi >= lambda_lo)) throw ConfigError("invalid lambda bounds");
}

void GaConfig::validate() const
{
    if (population < 4) throw ConfigError("GA population must be at least 4");
    if (generations < 0) throw ConfigError("GA generations must be non-negative");
    if (tournament < 1 || tournament > population) throw ConfigError("GA tournament size out of range");
    if (crossover_rate < 0.0 || crossover_rate > 1.0) throw ConfigError("GA crossover rate must lie in [0, 1]");
    if (mutation_std < 0.0 || mutation_std > 1.0) throw ConfigError("GA mutation std must lie in [0, 1]");
    if (elitism < 0 || elitism >= population) throw ConfigError("GA elitism out of range");
    if (blend_alpha < 0.0) throw ConfigError("GA blend alpha must be non-negative");
}

std::vector<std::vector<Eigen::Index>> make_folds(Eigen::Index n_samples, int k, std::uint64_t seed)
{
    if (k < 2) throw InputError("cross-validation needs k >= 2");
    if (n_samples < k) throw InputError("cross-validation: fewer samples than folds");
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n_samples));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    Rng rng(derive_seed(seed, "cv-folds"));
    std::shuffle(order.begin(), order.end(), rng);

    std::vector<std::vector<Eigen::Index>> folds(static_cast<std::size_t>(k));
    for (std::size_t i = 0; i < order.size(); ++i) folds[i % folds.size()].push_back(order[i]);
    for (auto& f : folds) std::sort(f.begin(), f.end());
    std::sort(folds.begin(), folds.end(),
              [](const auto& a, const auto& b) { return a.front() < b.front(); });
    return folds;
}

double cv_objective(double sigma, double lambda, const Dataset& data, int k, const ModelRecipe& recipe,
                    std::uint64_t seed)
{
    const auto folds = make_folds(data.size(), k, seed);
    double total = 0.0;
    std::vector<char> held_out(static_cast<std::size_t>(data.size()));
    for (const auto& fold : folds) {
        if (fold.empty()) throw InputError("cross-validation: empty fold");
        std::fill(held_out.begin(), held_out.end(), 0);
        for (Eigen::Index r : fold) held_out[static_cast<std::size_t>(r)] = 1;
        std::vector<Eigen::Index> train;
        train.reserve(held_out.size() - fold.size());
        for (Eigen::Index r = 0; r < data.size(); ++r)
            if (!held_out[static_cast<std::size_t>(r)]) train.push_back(r);

        const LearnedModel model = recipe.fit(data.subset(train), sigma, lambda);
        double sq = 0.0;
        for (Eigen::Index r : fold)
            sq += (model.predict(data.x.row(r).transpose()) - data.y.row(r).transpose()).squaredNorm();
        total += sq / static_cast<double>(fold.size());
    }
    return total / static_cast<double>(folds.size());
}

namespace {

struct Genome {
    double sigma;
    double log_lambda;
    double value;
};

double safe_eval(const HyperObjective& objective, double sigma, double lambda)
{
    try {
        const double v = objective(sigma, lambda);
        return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
    } catch (const Error&) {
        return std::numeric_limits<double>::infinity();
    }
}

}  // namespace

SearchResult ga_search(const HyperObjective& objective, const HyperBounds& bounds, const GaConfig& config)
{
    bounds.validate();
    config.validate();
    const double llo = std::log10(bounds.lambda_lo);
    const double lhi = std::log10(bounds.lambda_hi);
    const double srange = bounds.sigma_hi - bounds.sigma_lo;
    const double lrange = lhi - llo;

    SearchResult result;
    auto evaluate = [&](Genome& g) {
        g.sigma = std::clamp(g.sigma, bounds.sigma_lo, bounds.sigma_hi);
        g.log_lambda = std::clamp(g.log_lambda, llo, lhi);
        const double lambda = std::pow(10.0, g.log_lambda);
        g.value = safe_eval(objective, g.sigma, lambda);
        result.evaluated.push_back({g.sigma, lambda, g.value});
    };
    auto by_value = [](const Genome& a, const Genome& b) { return a.value < b.value; };

    std::vector<Genome> pop(static_cast<std::size_t>(config.population));
    for (std::size_t i = 0; i < pop.size(); ++i) {
        Rng rng(derive_seed(config.seed, "ga-init", i));
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        pop[i].sigma = bounds.sigma_lo + srange * unit(rng);
        pop[i].log_lambda = llo + lrange * unit(rng);
        evaluate(pop[i]);
    }
    std::stable_sort(pop.begin(), pop.end(), by_value);
    result.history.push_back(pop.front().value);

    for (int gen = 1; gen <= config.generations; ++gen) {
        const double shrink = 1.0 - static_cast<double>(gen - 1) / static_cast<double>(config.generations);
        std::vector<Genome> next(pop.begin(), pop.begin() + config.elitism);
        for (int i = config.elitism; i < config.population; ++i) {
            Rng rng(derive_seed(config.seed, "ga-child", static_cast<std::uint64_t>(gen),
                                static_cast<std::uint64_t>(i)));
            std::uniform_int_distribution<std::size_t> pick(0, pop.size() - 1);
            std::uniform_real_distribution<double> unit(0.0, 1.0);
            auto tournament = [&]() {
                std::size_t best = pick(rng);
                for (int t = 1; t < config.tournament; ++t) best = std::min(best, pick(rng));
                return pop[best];  // pop is sorted, lower index is fitter
            };
            const Genome a = tournament();
            const Genome b = tournament();
            Genome child = a;
            if (unit(rng) < config.crossover_rate) {
                auto blend = [&](double u, double v) {
                    const double lo = std::min(u, v), hi = std::max(u, v);
                    const double ext = config.blend_alpha * (hi - lo);
                    return lo - ext + (hi - lo + 2.0 * ext) * unit(rng);
                };
                child.sigma = blend(a.sigma, b.sigma);
                child.log_lambda = blend(a.log_lambda, b.log_lambda);
            }
            std::normal_distribution<double> noise(0.0, 1.0);
            child.sigma += config.mutation_std * shrink * srange * noise(rng);
            child.log_lambda += config.mutation_std * shrink * lrange * noise(rng);
            evaluate(child);
            next.push_back(child);
        }
        std::stable_sort(next.begin(), next.end(), by_value);
        pop = std::move(next);
        result.history.push_back(pop.front().value);
    }

    result.sigma = pop.front().sigma;
    result.lambda = std::pow(10.0, pop.front().log_lambda);
    result.best_value = pop.front().value;
    return result;
}

SearchResult random_search(const HyperObjective& objective, const HyperBounds& bounds, int n_trials,
                           std::uint64_t seed)
{
    bounds.validate();
    if (n_trials < 1) throw ConfigError("random search needs at least one trial");
    const double llo = std::log10(bounds.lambda_lo);
    const double lhi = std::log10(bounds.lambda_hi);
    Rng rng(derive_seed(seed, "random-search"));
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    SearchResult result;
    result.best_value = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n_trials; ++i) {
        const double sigma = bounds.sigma_lo + (bounds.sigma_hi - bounds.sigma_lo) * unit(rng);
        const double lambda = std::pow(10.0, llo + (lhi - llo) * unit(rng));
        const double v = safe_eval(objective, sigma, lambda);
        result.evaluated.push_back({sigma, lambda, v});
        if (i == 0 || v < result.best_value) {
            result.sigma = sigma;
            result.lambda = lambda;
            result.best_value = v;
        }
    }
    return result;
}

}  // namespace hamkrr
