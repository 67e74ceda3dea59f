// hamkrr: learn Hamiltonian vector fields from noisy samples and evaluate them.
//
//   hamkrr [--config cfg.json] [--seed N] [--out DIR] <command> [options]
//
// Commands: simulate, train, rollout, evaluate, tune, sweep-features, export-field.
// Exit codes: 0 success, 2 configuration/input error, 3 numerical failure, 4 I/O error.

#include "hamkrr/pipeline.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace hamkrr;

namespace {

struct Globals {
    std::string config_path;
    std::string preset = "pendulum";
    std::size_t preset_ics = 15;
    std::optional<std::uint64_t> seed;
    std::string out_dir = ".";
    int threads = 1;
};

struct ModelOverrides {
    std::optional<std::string> variant, family, parity;
    std::optional<Eigen::Index> d;
    std::optional<std::string> sigma, lambda;  // number or "tune"
};

std::optional<double> parse_tunable(const std::string& s)
{
    if (s == "tune") return std::nullopt;
    try {
        return std::stod(s);
    } catch (const std::exception&) {
        throw ConfigError("expected a number or \"tune\", got '" + s + "'");
    }
}

ExperimentConfig resolve_config(const Globals& g, const ModelOverrides& m)
{
    ExperimentConfig cfg;
    if (!g.config_path.empty()) {
        cfg = load_config(g.config_path);
    } else if (g.preset == "pendulum") {
        cfg = pendulum_preset();
    } else if (g.preset == "cartpole") {
        cfg = cartpole_preset(g.preset_ics);
    } else if (g.preset == "twolink") {
        cfg = twolink_preset(g.preset_ics);
    } else {
        throw ConfigError("unknown preset '" + g.preset + "'");
    }
    if (g.seed) cfg.seed = *g.seed;
    if (m.variant) cfg.model.variant = *m.variant;
    if (m.family) cfg.model.family = *m.family;
    if (m.parity) cfg.model.parity = *m.parity;
    if (m.d) cfg.model.d = *m.d;
    if (m.sigma) cfg.model.sigma = parse_tunable(*m.sigma);
    if (m.lambda) cfg.model.lambda = parse_tunable(*m.lambda);
    // Re-validate after overrides.
    return config_from_json(config_to_json(cfg));
}

Vec parse_vector(const std::string& text)
{
    std::vector<double> vals;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            vals.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw ConfigError("bad number '" + item + "' in '" + text + "'");
        }
    }
    if (vals.empty()) throw ConfigError("empty vector");
    return Eigen::Map<Vec>(vals.data(), static_cast<Eigen::Index>(vals.size()));
}

// "lo:hi:count" per axis, comma separated.
GridSpec parse_grid(const std::string& text)
{
    GridSpec g;
    std::vector<double> lo, hi;
    std::stringstream ss(text);
    std::string axis;
    while (std::getline(ss, axis, ',')) {
        double a = 0, b = 0;
        int c = 0;
        if (std::sscanf(axis.c_str(), "%lf:%lf:%d", &a, &b, &c) != 3)
            throw ConfigError("grid axis must be lo:hi:count, got '" + axis + "'");
        lo.push_back(a);
        hi.push_back(b);
        g.counts.push_back(c);
    }
    g.lower = Eigen::Map<Vec>(lo.data(), static_cast<Eigen::Index>(lo.size()));
    g.upper = Eigen::Map<Vec>(hi.data(), static_cast<Eigen::Index>(hi.size()));
    g.validate();
    return g;
}

Json echo(const ExperimentConfig& cfg)
{
    return {{"config_digest", config_digest(cfg)}, {"config", config_to_json(cfg)}};
}

void write_with_sidecar(const fs::path& path, const std::string& body, Json sidecar)
{
    write_file_atomic(path, body);
    fs::path side = path;
    side += ".json";
    write_file_atomic(side, sidecar.dump(2) + "\n");
}

Dataset dataset_for(const ExperimentConfig& cfg, const std::string& data_path)
{
    if (!data_path.empty()) return load_dataset(data_path);
    return build_dataset(cfg);
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Learn Hamiltonian vector fields with structure-preserving kernels"};
    app.require_subcommand(1);
    Globals g;
    app.add_option("--config", g.config_path, "JSON experiment config");
    app.add_option("--preset", g.preset, "Built-in experiment when no config is given")
        ->check(CLI::IsMember({"pendulum", "cartpole", "twolink"}));
    app.add_option("--preset-ics", g.preset_ics, "Training IC count for the cartpole/twolink presets");
    app.add_option("--seed", g.seed, "Master seed");
    app.add_option("--out", g.out_dir, "Output directory");
    app.add_option("--threads", g.threads, "Worker threads (computation is single-threaded)")->check(CLI::PositiveNumber);

    ModelOverrides mo;
    auto add_model_flags = [&mo](CLI::App* c) {
        c->add_option("--variant", mo.variant, "rff or exact");
        c->add_option("--family", mo.family, "Kernel or feature family");
        c->add_option("--parity", mo.parity, "none, odd or even (exact variant)");
        c->add_option("--d", mo.d, "Number of random frequencies");
        c->add_option("--sigma", mo.sigma, "Kernel width or \"tune\"");
        c->add_option("--lambda", mo.lambda, "Regularization or \"tune\"");
    };

    auto* simulate = app.add_subcommand("simulate", "Generate a noisy training dataset");
    std::optional<double> noise;
    simulate->add_option("--noise", noise, "Override the noise standard deviation");

    auto* train_cmd = app.add_subcommand("train", "Fit a model, tuning sigma/lambda if requested");
    std::string data_path;
    train_cmd->add_option("--data", data_path, "Dataset CSV (default: simulate from the config)");
    add_model_flags(train_cmd);

    auto* tune_cmd = app.add_subcommand("tune", "Search sigma and lambda by cross-validation");
    tune_cmd->add_option("--data", data_path, "Dataset CSV (default: simulate from the config)");
    add_model_flags(tune_cmd);

    auto* rollout_cmd = app.add_subcommand("rollout", "Integrate a learned model");
    std::string model_path;
    std::string x0_text;
    double t_end = 2.0;
    int n_steps = 101;
    rollout_cmd->add_option("--model", model_path, "Model JSON")->required();
    rollout_cmd->add_option("--x0", x0_text, "Initial state, comma separated")->required();
    rollout_cmd->add_option("--t-end", t_end, "Final time");
    rollout_cmd->add_option("--n-steps", n_steps, "Output samples including t = 0");

    auto* evaluate_cmd = app.add_subcommand("evaluate", "Score models on the test trajectories");
    std::vector<std::string> model_paths;
    evaluate_cmd->add_option("--model", model_paths, "Model JSON (repeatable)")->required();

    auto* sweep_cmd = app.add_subcommand("sweep-features", "Trajectory MSE against the number of frequencies");
    std::vector<Eigen::Index> d_list;
    std::optional<int> n_seeds;
    std::optional<std::size_t> n_points;
    sweep_cmd->add_option("--d-list", d_list, "Frequency counts")->delimiter(',');
    sweep_cmd->add_option("--n-seeds", n_seeds, "Frequency draws per d");
    sweep_cmd->add_option("--points", n_points, "Scattered training points when the config has none");
    add_model_flags(sweep_cmd);

    auto* field_cmd = app.add_subcommand("export-field", "Evaluate a vector field on a regular grid");
    std::string grid_text;
    bool use_system = false;
    field_cmd->add_option("--model", model_path, "Model JSON");
    field_cmd->add_flag("--system", use_system, "Export the true field of the configured system");
    field_cmd->add_option("--grid", grid_text, "lo:hi:count per axis, comma separated")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        const fs::path out(g.out_dir);
        fs::create_directories(out);

        if (*simulate) {
            ExperimentConfig cfg = resolve_config(g, mo);
            if (noise) cfg.dataset.sigma_n = *noise;
            cfg = config_from_json(config_to_json(cfg));
            const Dataset data = build_dataset(cfg);
            save_dataset(data, out / "dataset.csv", echo(cfg));
            std::cout << "wrote " << data.size() << " samples to " << (out / "dataset.csv").string() << '\n';
        } else if (*train_cmd) {
            const ExperimentConfig cfg = resolve_config(g, mo);
            const Dataset data = dataset_for(cfg, data_path);
            const TrainResult r = train(cfg, data);
            Json extra = echo(cfg);
            if (r.search) extra["tuning"] = search_result_to_json(*r.search);
            extra["training_mse"] = r.training_mse;
            save_model(r.model, out / "model.json", extra);
            std::cout << "sigma " << r.model.sigma() << "  lambda " << r.model.lambda() << '\n'
                      << "training MSE " << r.training_mse << '\n';
        } else if (*tune_cmd) {
            ExperimentConfig cfg = resolve_config(g, mo);
            const Dataset data = dataset_for(cfg, data_path);
            const SearchResult r = tune(cfg, data);
            Json doc = echo(cfg);
            doc["tuning"] = search_result_to_json(r);
            write_file_atomic(out / "tuning.json", doc.dump(2) + "\n");
            std::cout << "sigma " << r.sigma << "  lambda " << r.lambda << "  cv " << r.best_value << '\n';
        } else if (*rollout_cmd) {
            const ExperimentConfig cfg = resolve_config(g, mo);
            const LearnedModel model = load_model(model_path);
            const Trajectory traj = rollout(model, parse_vector(x0_text), t_end, n_steps);
            Json side = echo(cfg);
            side["model"] = model_path;
            side["x0"] = vec_to_json(traj.x.front());
            write_with_sidecar(out / "trajectory.csv", trajectory_to_csv(traj), side);
            std::cout << "wrote " << traj.size() << " samples to " << (out / "trajectory.csv").string() << '\n';
        } else if (*evaluate_cmd) {
            const ExperimentConfig cfg = resolve_config(g, mo);
            std::vector<EvalReport> reports;
            Json docs = Json::array();
            for (const auto& p : model_paths) {
                reports.push_back(evaluate(cfg, load_model(p)));
                Json j = report_to_json(reports.back());
                j["model_file"] = p;
                docs.push_back(j);
            }
            const std::string table = render_table(reports);
            Json doc = echo(cfg);
            doc["reports"] = docs;
            write_file_atomic(out / "report.json", doc.dump(2) + "\n");
            write_file_atomic(out / "report.txt", "# config " + config_digest(cfg) + "\n" + table);
            std::cout << table;
        } else if (*sweep_cmd) {
            ExperimentConfig cfg = resolve_config(g, mo);
            if (!d_list.empty()) cfg.sweep.d_list = d_list;
            if (n_seeds) cfg.sweep.n_seeds = *n_seeds;
            const std::vector<Vec> ics = training_ics(cfg);
            if (!cfg.dataset.scattered) {
                const StateBox box = cfg.system().ic_box();
                cfg.dataset.scattered = BoxSample{box.lower, box.upper, n_points.value_or(1000)};
            }
            cfg = config_from_json(config_to_json(cfg));
            const Dataset data = build_dataset(cfg);
            double sigma = cfg.model.sigma.value_or(0.0);
            double lambda = cfg.model.lambda.value_or(0.0);
            if (cfg.needs_tuning()) {
                const SearchResult r = tune(cfg, data);
                sigma = r.sigma;
                lambda = r.lambda;
            }
            const SweepResult s = sweep_features(cfg, data, ics, sigma, lambda);
            std::ostringstream csv;
            csv << "d,mean_mse,std_mse,n_seeds\n";
            for (const auto& row : s.rows)
                csv << row.d << ',' << format_double(row.mean_mse) << ',' << format_double(row.std_mse) << ','
                    << row.n_seeds << '\n';
            Json side = echo(cfg);
            side["sigma"] = sigma;
            side["lambda"] = lambda;
            side["exact_mse"] = s.exact_mse ? Json(*s.exact_mse) : Json(nullptr);
            write_with_sidecar(out / "sweep.csv", csv.str(), side);
            std::cout << csv.str();
            if (s.exact_mse) std::cout << "exact kernel MSE " << format_double(*s.exact_mse) << '\n';
        } else if (*field_cmd) {
            const ExperimentConfig cfg = resolve_config(g, mo);
            if (use_system == !model_path.empty()) throw ConfigError("export-field needs exactly one of --model or --system");
            const GridSpec grid = parse_grid(grid_text);
            VectorField f;
            LearnedModel model;
            if (use_system) {
                f = cfg.system().field();
            } else {
                model = load_model(model_path);
                f = model.field();
            }
            const auto pts = grid_points(grid);
            require_dim(pts.front(), use_system ? cfg.system().dim() : model.dim(), "export-field grid");
            Json side = echo(cfg);
            side["source"] = use_system ? cfg.system_id : model_path;
            write_with_sidecar(out / "field.csv", field_to_csv(f, pts), side);
            std::cout << "wrote " << pts.size() << " grid rows to " << (out / "field.csv").string() << '\n';
        }
    } catch (const IoError& e) {
        std::cerr << "I/O error: " << e.what() << '\n';
        return 4;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "I/O error: " << e.what() << '\n';
        return 4;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return 3;
    } catch (const IntegrationError& e) {
        std::cerr << "integration failure: " << e.what() << '\n';
        return 3;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
