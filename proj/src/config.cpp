#include "hamkrr/config.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>

namespace hamkrr {

namespace {

Json box_to_json(const BoxSample& b)
{
    return {{"lower", vec_to_json(b.lower)}, {"upper", vec_to_json(b.upper)}, {"count", b.count}};
}

BoxSample box_from_json(const Json& j)
{
    BoxSample b;
    b.lower = vec_from_json(j.at("lower"));
    b.upper = vec_from_json(j.at("upper"));
    b.count = j.value("count", std::size_t{0});
    if (b.lower.size() != b.upper.size()) throw ConfigError("box bounds differ in dimension");
    return b;
}

Json points_to_json(const std::vector<Vec>& pts)
{
    Json a = Json::array();
    for (const Vec& p : pts) a.push_back(vec_to_json(p));
    return a;
}

std::vector<Vec> points_from_json(const Json& j)
{
    std::vector<Vec> pts;
    for (const auto& p : j) pts.push_back(vec_from_json(p));
    return pts;
}

// Numbers or the string "tune".
std::optional<double> tunable_from_json(const Json& j, const char* key, std::optional<double> fallback)
{
    if (!j.contains(key)) return fallback;
    const Json& v = j[key];
    if (v.is_string()) {
        if (v.get<std::string>() == "tune") return std::nullopt;
        throw ConfigError(std::string("model.") + key + " must be a number or \"tune\"");
    }
    if (v.is_null()) return std::nullopt;
    return v.get<double>();
}

Json tunable_to_json(const std::optional<double>& v) { return v ? Json(*v) : Json("tune"); }

template <class T>
T get_or(const Json& j, const char* key, T fallback)
{
    return j.contains(key) && !j[key].is_null() ? j[key].get<T>() : fallback;
}

}  // namespace

System ExperimentConfig::system() const
{
    const Json& p = system_params;
    if (system_id == "pendulum") {
        PendulumParams d;
        return System(PendulumParams{get_or(p, "m", d.m), get_or(p, "l", d.l), get_or(p, "g", d.g)});
    }
    if (system_id == "cartpole") {
        CartPoleParams d;
        return System(CartPoleParams{get_or(p, "m_c", d.m_c), get_or(p, "m_p", d.m_p), get_or(p, "l", d.l),
                                     get_or(p, "g", d.g)});
    }
    if (system_id == "twolink") {
        TwoLinkParams d;
        return System(TwoLinkParams{get_or(p, "m1", d.m1), get_or(p, "m2", d.m2), get_or(p, "L1", d.L1),
                                    get_or(p, "L2", d.L2), get_or(p, "l1", d.l1), get_or(p, "l2", d.l2),
                                    get_or(p, "g", d.g)});
    }
    throw ConfigError("unknown system id '" + system_id + "'");
}

ModelRecipe ExperimentConfig::recipe() const
{
    if (model.variant == "exact")
        return ModelRecipe::exact_kernel(kernel_family_from_string(model.family), parity_from_string(model.parity));
    if (model.variant == "rff")
        return ModelRecipe::features(feature_family_from_string(model.family), model.d,
                                     derive_seed(seed, "features"));
    throw ConfigError("model.variant must be \"rff\" or \"exact\"");
}

ExperimentConfig config_from_json(const Json& j)
{
    try {
        ExperimentConfig c;
        c.seed = get_or(j, "seed", c.seed);
        if (j.contains("system")) {
            const Json& s = j["system"];
            if (s.is_string()) {
                c.system_id = s.get<std::string>();
            } else {
                c.system_id = get_or(s, "id", c.system_id);
                if (s.contains("params")) c.system_params = s["params"];
            }
        }
        if (j.contains("dataset")) {
            const Json& d = j["dataset"];
            if (d.contains("ics")) c.dataset.ics = points_from_json(d["ics"]);
            if (d.contains("ic_box") && !d["ic_box"].is_null()) c.dataset.ic_box = box_from_json(d["ic_box"]);
            if (d.contains("scattered") && !d["scattered"].is_null())
                c.dataset.scattered = box_from_json(d["scattered"]);
            c.dataset.t_end = get_or(d, "t_end", c.dataset.t_end);
            c.dataset.n_steps = get_or(d, "n_steps", c.dataset.n_steps);
            c.dataset.sigma_n = get_or(d, "sigma_n", c.dataset.sigma_n);
            c.dataset.derivative_at_clean_state =
                get_or(d, "derivative_at_clean_state", c.dataset.derivative_at_clean_state);
        }
        if (j.contains("model")) {
            const Json& m = j["model"];
            c.model.variant = get_or(m, "variant", c.model.variant);
            c.model.family = get_or(m, "family", c.model.family);
            c.model.parity = get_or(m, "parity", c.model.parity);
            c.model.d = get_or(m, "d", c.model.d);
            c.model.sigma = tunable_from_json(m, "sigma", c.model.sigma);
            c.model.lambda = tunable_from_json(m, "lambda", c.model.lambda);
        }
        if (j.contains("tuning")) {
            const Json& t = j["tuning"];
            c.tuning.k = get_or(t, "k", c.tuning.k);
            c.tuning.method = get_or(t, "method", c.tuning.method);
            c.tuning.trials = get_or(t, "trials", c.tuning.trials);
            c.tuning.score = get_or(t, "score", c.tuning.score);
            if (t.contains("ga")) {
                const Json& g = t["ga"];
                GaConfig& ga = c.tuning.ga;
                ga.population = get_or(g, "population", ga.population);
                ga.generations = get_or(g, "generations", ga.generations);
                ga.tournament = get_or(g, "tournament", ga.tournament);
                ga.crossover_rate = get_or(g, "crossover_rate", ga.crossover_rate);
                ga.blend_alpha = get_or(g, "blend_alpha", ga.blend_alpha);
                ga.mutation_std = get_or(g, "mutation_std", ga.mutation_std);
                ga.elitism = get_or(g, "elitism", ga.elitism);
            }
            if (t.contains("bounds")) {
                const Json& b = t["bounds"];
                HyperBounds& hb = c.tuning.bounds;
                hb.sigma_lo = get_or(b, "sigma_lo", hb.sigma_lo);
                hb.sigma_hi = get_or(b, "sigma_hi", hb.sigma_hi);
                hb.lambda_lo = get_or(b, "lambda_lo", hb.lambda_lo);
                hb.lambda_hi = get_or(b, "lambda_hi", hb.lambda_hi);
            }
        }
        if (j.contains("evaluation")) {
            const Json& e = j["evaluation"];
            if (e.contains("test_ics")) c.evaluation.test_ics = points_from_json(e["test_ics"]);
            if (e.contains("test_box") && !e["test_box"].is_null())
                c.evaluation.test_box = box_from_json(e["test_box"]);
            c.evaluation.t_end = get_or(e, "t_end", c.evaluation.t_end);
            c.evaluation.n_steps = get_or(e, "n_steps", c.evaluation.n_steps);
            c.evaluation.odd_samples = get_or(e, "odd_samples", c.evaluation.odd_samples);
            if (e.contains("odd_box") && !e["odd_box"].is_null()) {
                const BoxSample b = box_from_json(e["odd_box"]);
                c.evaluation.odd_box = StateBox{b.lower, b.upper};
            }
            c.evaluation.symplecticity_points =
                get_or(e, "symplecticity_points", c.evaluation.symplecticity_points);
            c.evaluation.fd_step = get_or(e, "fd_step", c.evaluation.fd_step);
        }
        if (j.contains("sweep")) {
            const Json& s = j["sweep"];
            c.sweep.d_list = get_or(s, "d_list", c.sweep.d_list);
            c.sweep.n_seeds = get_or(s, "n_seeds", c.sweep.n_seeds);
            c.sweep.exact_reference = get_or(s, "exact_reference", c.sweep.exact_reference);
        }

        c.system();  // validates id and parameters
        if (c.tuning.method != "ga" && c.tuning.method != "random")
            throw ConfigError("tuning.method must be \"ga\" or \"random\"");
        if (c.tuning.score != "derivative" && c.tuning.score != "rollout")
            throw ConfigError("tuning.score must be \"derivative\" or \"rollout\"");
        c.tuning.bounds.validate();
        c.tuning.ga.validate();
        c.recipe();
        if (c.dataset.n_steps < 2 || !(c.dataset.t_end > 0.0)) throw ConfigError("invalid dataset horizon");
        if (c.evaluation.n_steps < 2 || !(c.evaluation.t_end > 0.0))
            throw ConfigError("invalid evaluation horizon");
        if (c.model.d < 1) throw ConfigError("model.d must be positive");
        return c;
    } catch (const Json::exception& e) {
        throw ConfigError(std::string("malformed config: ") + e.what());
    }
}

Json config_to_json(const ExperimentConfig& c)
{
    Json j;
    j["seed"] = c.seed;
    j["system"] = {{"id", c.system_id}, {"params", c.system_params}};

    Json d;
    d["ics"] = points_to_json(c.dataset.ics);
    d["ic_box"] = c.dataset.ic_box ? box_to_json(*c.dataset.ic_box) : Json(nullptr);
    d["scattered"] = c.dataset.scattered ? box_to_json(*c.dataset.scattered) : Json(nullptr);
    d["t_end"] = c.dataset.t_end;
    d["n_steps"] = c.dataset.n_steps;
    d["sigma_n"] = c.dataset.sigma_n;
    d["derivative_at_clean_state"] = c.dataset.derivative_at_clean_state;
    j["dataset"] = d;

    j["model"] = {{"variant", c.model.variant},
                  {"family", c.model.family},
                  {"parity", c.model.parity},
                  {"d", c.model.d},
                  {"sigma", tunable_to_json(c.model.sigma)},
                  {"lambda", tunable_to_json(c.model.lambda)}};

    const GaConfig& ga = c.tuning.ga;
    const HyperBounds& hb = c.tuning.bounds;
    j["tuning"] = {{"k", c.tuning.k},
                   {"method", c.tuning.method},
                   {"trials", c.tuning.trials},
                   {"score", c.tuning.score},
                   {"ga",
                    {{"population", ga.population},
                     {"generations", ga.generations},
                     {"tournament", ga.tournament},
                     {"crossover_rate", ga.crossover_rate},
                     {"blend_alpha", ga.blend_alpha},
                     {"mutation_std", ga.mutation_std},
                     {"elitism", ga.elitism}}},
                   {"bounds",
                    {{"sigma_lo", hb.sigma_lo},
                     {"sigma_hi", hb.sigma_hi},
                     {"lambda_lo", hb.lambda_lo},
                     {"lambda_hi", hb.lambda_hi}}}};

    Json e;
    e["test_ics"] = points_to_json(c.evaluation.test_ics);
    e["test_box"] = c.evaluation.test_box ? box_to_json(*c.evaluation.test_box) : Json(nullptr);
    e["t_end"] = c.evaluation.t_end;
    e["n_steps"] = c.evaluation.n_steps;
    e["odd_samples"] = c.evaluation.odd_samples;
    e["odd_box"] = c.evaluation.odd_box ? box_to_json(BoxSample{c.evaluation.odd_box->lower,
                                                                c.evaluation.odd_box->upper, 0})
                                        : Json(nullptr);
    e["symplecticity_points"] = c.evaluation.symplecticity_points;
    e["fd_step"] = c.evaluation.fd_step;
    j["evaluation"] = e;

    j["sweep"] = {{"d_list", c.sweep.d_list},
                  {"n_seeds", c.sweep.n_seeds},
                  {"exact_reference", c.sweep.exact_reference}};
    return j;
}

ExperimentConfig load_config(const std::filesystem::path& path)
{
    Json j;
    try {
        j = Json::parse(read_file(path));
    } catch (const Json::exception& e) {
        throw ConfigError("cannot parse config " + path.string() + ": " + e.what());
    }
    return config_from_json(j);
}

std::string config_digest(const ExperimentConfig& cfg)
{
    const std::string text = config_to_json(cfg).dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

ExperimentConfig pendulum_preset()
{
    constexpr double pi = std::numbers::pi;
    ExperimentConfig c;
    c.system_id = "pendulum";
    c.dataset.ics = {Eigen::Vector2d(2.0 * pi / 5.0, 0.0), Eigen::Vector2d(4.0 * pi / 5.0, 0.0),
                     Eigen::Vector2d(19.0 * pi / 20.0, -4.0)};
    c.dataset.t_end = 0.7;
    c.dataset.n_steps = 8;
    c.dataset.sigma_n = 0.01;
    c.model.variant = "rff";
    c.model.family = "odd_symplectic";
    c.model.d = 400;
    c.evaluation.test_ics = {Eigen::Vector2d(pi / 2.0, 0.0)};
    c.evaluation.t_end = 2.0;
    c.evaluation.n_steps = 101;
    return c;
}

namespace {

ExperimentConfig mechanical_preset(const std::string& id, std::size_t n_ics, Eigen::Index d)
{
    ExperimentConfig c;
    c.system_id = id;
    const StateBox box = c.system().ic_box();
    c.dataset.ic_box = BoxSample{box.lower, box.upper, n_ics};
    c.dataset.t_end = 2.0;
    c.dataset.n_steps = 30;
    c.dataset.sigma_n = 0.01;
    c.model.variant = "rff";
    c.model.family = "odd_symplectic";
    c.model.d = d;
    c.evaluation.test_box = BoxSample{box.lower, box.upper, 10};
    c.evaluation.t_end = 2.0;
    c.evaluation.n_steps = 30;
    return c;
}

}  // namespace

ExperimentConfig cartpole_preset(std::size_t n_ics) { return mechanical_preset("cartpole", n_ics, 400); }

ExperimentConfig twolink_preset(std::size_t n_ics) { return mechanical_preset("twolink", n_ics, 800); }

}  // namespace hamkrr
