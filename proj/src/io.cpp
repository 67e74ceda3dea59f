#include "hamkrr/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <vector>

namespace hamkrr {

namespace fs = std::filesystem;

void write_file_atomic(const fs::path& path, const std::string& contents)
{
    if (path.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(path.parent_path(), ec);
        if (ec) throw IoError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
    }
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
        out << contents;
        if (!out) throw IoError("write failed for " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) throw IoError("cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
}

std::string read_file(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string format_double(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

std::vector<std::string> split(const std::string& line, char sep)
{
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

double parse_double(const std::string& s)
{
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0') throw IoError("malformed number '" + s + "'");
    return v;
}

std::vector<std::string> lines_of(const std::string& text)
{
    std::vector<std::string> lines;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line))
        if (!line.empty() && line != "\r") lines.push_back(line);
    return lines;
}

}  // namespace

std::string dataset_to_csv(const Dataset& data)
{
    data.validate();
    const Eigen::Index n = data.dim();
    std::string out = "traj_id,t";
    for (Eigen::Index k = 1; k <= n; ++k) out += ",x_" + std::to_string(k);
    for (Eigen::Index k = 1; k <= n; ++k) out += ",y_" + std::to_string(k);
    out += '\n';
    for (Eigen::Index i = 0; i < data.size(); ++i) {
        out += std::to_string(data.traj_id.empty() ? -1 : data.traj_id[static_cast<std::size_t>(i)]);
        out += ',' + format_double(data.t.empty() ? 0.0 : data.t[static_cast<std::size_t>(i)]);
        for (Eigen::Index k = 0; k < n; ++k) out += ',' + format_double(data.x(i, k));
        for (Eigen::Index k = 0; k < n; ++k) out += ',' + format_double(data.y(i, k));
        out += '\n';
    }
    return out;
}

Dataset dataset_from_csv(const std::string& text)
{
    const auto lines = lines_of(text);
    if (lines.empty()) throw IoError("dataset CSV: missing header");
    const auto header = split(lines.front(), ',');
    if (header.size() < 4 || header[0] != "traj_id" || header[1] != "t" || (header.size() - 2) % 2 != 0)
        throw IoError("dataset CSV: header must be traj_id,t,x_1..x_n,y_1..y_n");
    const auto n = static_cast<Eigen::Index>((header.size() - 2) / 2);
    const auto rows = static_cast<Eigen::Index>(lines.size() - 1);

    Dataset data;
    data.x.resize(rows, n);
    data.y.resize(rows, n);
    int last_traj = -2;
    for (Eigen::Index i = 0; i < rows; ++i) {
        const auto cells = split(lines[static_cast<std::size_t>(i + 1)], ',');
        if (cells.size() != header.size())
            throw IoError("dataset CSV: row " + std::to_string(i + 1) + " has the wrong number of columns");
        const int traj = static_cast<int>(parse_double(cells[0]));
        data.traj_id.push_back(traj);
        data.t.push_back(parse_double(cells[1]));
        for (Eigen::Index k = 0; k < n; ++k) {
            data.x(i, k) = parse_double(cells[static_cast<std::size_t>(2 + k)]);
            data.y(i, k) = parse_double(cells[static_cast<std::size_t>(2 + n + k)]);
        }
        if (traj >= 0 && traj != last_traj) data.meta.trajectory_starts.push_back(static_cast<std::size_t>(i));
        last_traj = traj;
    }
    return data;
}

Json dataset_meta_to_json(const Dataset& data)
{
    Json j;
    j["system"] = data.meta.system;
    j["params_digest"] = data.meta.params_digest;
    j["noise_std"] = data.meta.noise_std;
    j["seed"] = data.meta.seed;
    j["trajectory_starts"] = data.meta.trajectory_starts;
    j["n_samples"] = data.size();
    j["dim"] = data.dim();
    return j;
}

void apply_dataset_meta(const Json& j, Dataset& data)
{
    data.meta.system = j.value("system", std::string{});
    data.meta.params_digest = j.value("params_digest", std::string{});
    data.meta.noise_std = j.value("noise_std", 0.0);
    data.meta.seed = j.value("seed", std::uint64_t{0});
    if (j.contains("trajectory_starts"))
        data.meta.trajectory_starts = j["trajectory_starts"].get<std::vector<std::size_t>>();
}

namespace {

fs::path sidecar_path(const fs::path& csv_path)
{
    fs::path p = csv_path;
    p += ".json";
    return p;
}

}  // namespace

void save_dataset(const Dataset& data, const fs::path& csv_path, const Json& extra)
{
    write_file_atomic(csv_path, dataset_to_csv(data));
    Json meta = dataset_meta_to_json(data);
    for (auto it = extra.begin(); it != extra.end(); ++it) meta[it.key()] = it.value();
    write_file_atomic(sidecar_path(csv_path), meta.dump(2) + "\n");
}

Dataset load_dataset(const fs::path& csv_path)
{
    Dataset data = dataset_from_csv(read_file(csv_path));
    const fs::path side = sidecar_path(csv_path);
    if (fs::exists(side)) {
        try {
            apply_dataset_meta(Json::parse(read_file(side)), data);
        } catch (const Json::exception& e) {
            throw IoError("malformed dataset sidecar " + side.string() + ": " + e.what());
        }
    }
    data.validate();
    return data;
}

std::string trajectory_to_csv(const Trajectory& traj)
{
    std::string out = "t";
    const Eigen::Index n = traj.x.empty() ? 0 : traj.x.front().size();
    for (Eigen::Index k = 1; k <= n; ++k) out += ",x_" + std::to_string(k);
    out += '\n';
    for (std::size_t i = 0; i < traj.size(); ++i) {
        out += format_double(traj.t[i]);
        for (Eigen::Index k = 0; k < n; ++k) out += ',' + format_double(traj.x[i](k));
        out += '\n';
    }
    return out;
}

Trajectory trajectory_from_csv(const std::string& text)
{
    const auto lines = lines_of(text);
    if (lines.empty()) throw IoError("trajectory CSV: missing header");
    const auto header = split(lines.front(), ',');
    if (header.size() < 2 || header[0] != "t") throw IoError("trajectory CSV: header must be t,x_1..x_n");
    Trajectory traj;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto cells = split(lines[i], ',');
        if (cells.size() != header.size()) throw IoError("trajectory CSV: ragged row");
        traj.t.push_back(parse_double(cells[0]));
        Vec x(static_cast<Eigen::Index>(cells.size() - 1));
        for (Eigen::Index k = 0; k < x.size(); ++k) x(k) = parse_double(cells[static_cast<std::size_t>(k + 1)]);
        traj.x.push_back(std::move(x));
    }
    return traj;
}

Json vec_to_json(const Vec& v) { return Json(std::vector<double>(v.data(), v.data() + v.size())); }

Vec vec_from_json(const Json& j)
{
    const auto values = j.get<std::vector<double>>();
    return Eigen::Map<const Vec>(values.data(), static_cast<Eigen::Index>(values.size()));
}

namespace {

Json matrix_row_major(const Mat& m)
{
    std::vector<double> flat;
    flat.reserve(static_cast<std::size_t>(m.size()));
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index k = 0; k < m.cols(); ++k) flat.push_back(m(i, k));
    return flat;
}

Mat matrix_from_row_major(const Json& j, Eigen::Index rows, Eigen::Index cols)
{
    const auto flat = j.get<std::vector<double>>();
    if (static_cast<Eigen::Index>(flat.size()) != rows * cols)
        throw IoError("model file: matrix has " + std::to_string(flat.size()) + " entries, expected " +
                      std::to_string(rows * cols));
    Mat m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index k = 0; k < cols; ++k) m(i, k) = flat[static_cast<std::size_t>(i * cols + k)];
    return m;
}

std::string feature_parity(FeatureFamily f)
{
    switch (f) {
    case FeatureFamily::OddSymplectic:
    case FeatureFamily::OddSeparable: return "odd";
    case FeatureFamily::EvenSymplectic:
    case FeatureFamily::EvenSeparable: return "even";
    default: return "none";
    }
}

}  // namespace

Json model_to_json(const LearnedModel& model)
{
    Json j;
    j["schema_version"] = kModelSchemaVersion;
    j["n"] = model.dim();
    j["sigma"] = model.sigma();
    j["lambda"] = model.lambda();
    if (model.is_exact()) {
        const ExactModel& m = model.exact();
        j["variant"] = "exact";
        j["family"] = to_string(m.spec().family);
        j["parity"] = to_string(m.spec().parity);
        j["d"] = nullptr;
        j["seed"] = model.provenance().seed;
        j["frequencies"] = nullptr;
        j["training_points"] = matrix_row_major(m.inputs());
        j["coefficients"] = matrix_row_major(m.coefficients());
        j["n_training"] = m.inputs().rows();
    } else {
        const RffModel& m = model.rff();
        j["variant"] = "rff";
        j["family"] = to_string(m.map().family());
        j["parity"] = feature_parity(m.map().family());
        j["d"] = m.map().d();
        j["seed"] = m.map().seed();
        j["frequencies"] = matrix_row_major(m.map().frequencies());
        j["alpha"] = vec_to_json(m.alpha());
        j["n_training"] = m.info().n_samples;
        j["training_noise_std"] = m.info().noise_std;
        j["system"] = m.info().system;
    }
    j["provenance"] = {{"dataset_digest", model.provenance().dataset_digest},
                       {"created", model.provenance().created},
                       {"seed", model.provenance().seed}};
    return j;
}

LearnedModel model_from_json(const Json& j)
{
    try {
        if (j.at("schema_version").get<int>() != kModelSchemaVersion)
            throw IoError("model file: unsupported schema_version");
        const auto n = j.at("n").get<Eigen::Index>();
        const double sigma = j.at("sigma").get<double>();
        const double lambda = j.at("lambda").get<double>();
        Provenance prov;
        if (j.contains("provenance")) {
            const Json& p = j["provenance"];
            prov.dataset_digest = p.value("dataset_digest", std::string{});
            prov.created = p.value("created", std::string{});
            prov.seed = p.value("seed", std::uint64_t{0});
        }
        const std::string variant = j.at("variant").get<std::string>();
        if (variant == "exact") {
            KernelSpec spec{kernel_family_from_string(j.at("family").get<std::string>()), sigma,
                            parity_from_string(j.at("parity").get<std::string>())};
            const auto count = j.at("n_training").get<Eigen::Index>();
            Mat inputs = matrix_from_row_major(j.at("training_points"), count, n);
            Mat coeffs = matrix_from_row_major(j.at("coefficients"), count, n);
            return LearnedModel(ExactModel(spec, std::move(inputs), std::move(coeffs), lambda), prov);
        }
        if (variant == "rff") {
            const FeatureFamily family = feature_family_from_string(j.at("family").get<std::string>());
            const auto d = j.at("d").get<Eigen::Index>();
            FeatureMap map(family, sigma, matrix_from_row_major(j.at("frequencies"), d, n),
                           j.at("seed").get<std::uint64_t>());
            RffTrainingInfo info{j.value("n_training", Eigen::Index{0}), j.value("training_noise_std", 0.0),
                                 j.value("system", std::string{})};
            return LearnedModel(RffModel(std::move(map), vec_from_json(j.at("alpha")), lambda, info), prov);
        }
        throw IoError("model file: unknown variant '" + variant + "'");
    } catch (const Json::exception& e) {
        throw IoError(std::string("model file: ") + e.what());
    }
}

void save_model(const LearnedModel& model, const fs::path& path, const Json& extra)
{
    Json j = model_to_json(model);
    for (auto it = extra.begin(); it != extra.end(); ++it) j[it.key()] = it.value();
    write_file_atomic(path, j.dump(2) + "\n");
}

LearnedModel load_model(const fs::path& path)
{
    Json j;
    try {
        j = Json::parse(read_file(path));
    } catch (const Json::exception& e) {
        throw IoError("cannot parse model file " + path.string() + ": " + e.what());
    }
    return model_from_json(j);
}

Json search_result_to_json(const SearchResult& r)
{
    Json j;
    j["sigma"] = r.sigma;
    j["lambda"] = r.lambda;
    j["best_value"] = r.best_value;
    j["history"] = r.history;
    j["n_evaluations"] = r.evaluated.size();
    return j;
}

Json report_to_json(const EvalReport& r)
{
    Json j;
    j["system"] = r.system;
    j["model"] = r.model;
    j["trajectory_mse"] = r.trajectory_mse;
    j["mse"] = r.mse;
    j["odd_error"] = {{"model", {{"mean", r.odd_error_model.mean}, {"variance", r.odd_error_model.variance}}},
                      {"true", {{"mean", r.odd_error_true.mean}, {"variance", r.odd_error_true.variance}}}};
    Json rows = Json::array();
    for (const auto& h : r.hamiltonian) {
        rows.push_back({{"true_mean", h.truth.mean},
                        {"true_variance", h.truth.variance},
                        {"learned_mean", h.learned.mean},
                        {"learned_variance", h.learned.variance},
                        {"offset", h.offset},
                        {"centered_variance", h.centered_variance}});
    }
    j["hamiltonian"] = rows;
    j["symplecticity"] = {{"model_mean", r.symplecticity_mean},
                          {"model_max", r.symplecticity_max},
                          {"true_max", r.symplecticity_true_max}};
    j["config_digest"] = r.config_digest;
    j["seed"] = r.seed;
    return j;
}

}  // namespace hamkrr
