#ifndef HAMKRR_IO_HPP
#define HAMKRR_IO_HPP

#include "hamkrr/dataset.hpp"
#include "hamkrr/metrics.hpp"
#include "hamkrr/model.hpp"
#include "hamkrr/sim.hpp"
#include "hamkrr/tuning.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>

namespace hamkrr {

using Json = nlohmann::json;

inline constexpr int kModelSchemaVersion = 1;

/// Writes via a temporary sibling file and rename. Throws IoError.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);
std::string read_file(const std::filesystem::path& path);

/// %.17g formatting.
std::string format_double(double v);

/// CSV with header traj_id,t,x_1..x_n,y_1..y_n and 17 significant digits.
std::string dataset_to_csv(const Dataset& data);
Dataset dataset_from_csv(const std::string& text);
/// Metadata sidecar (system, params digest, noise, seed, trajectory starts, N, n).
Json dataset_meta_to_json(const Dataset& data);
void apply_dataset_meta(const Json& j, Dataset& data);

void save_dataset(const Dataset& data, const std::filesystem::path& csv_path, const Json& extra = Json::object());
Dataset load_dataset(const std::filesystem::path& csv_path);

/// CSV with header t,x_1..x_n.
std::string trajectory_to_csv(const Trajectory& traj);
Trajectory trajectory_from_csv(const std::string& text);

/// Model document:
/// {schema_version, variant, family, parity, n, sigma, lambda, d, seed,
///  frequencies (row-major, d x n), alpha | (training_points, coefficients), provenance}.
Json model_to_json(const LearnedModel& model);
LearnedModel model_from_json(const Json& j);
void save_model(const LearnedModel& model, const std::filesystem::path& path, const Json& extra = Json::object());
LearnedModel load_model(const std::filesystem::path& path);

Json search_result_to_json(const SearchResult& r);
Json report_to_json(const EvalReport& r);

Json vec_to_json(const Vec& v);
Vec vec_from_json(const Json& j);

}  // namespace hamkrr

#endif
