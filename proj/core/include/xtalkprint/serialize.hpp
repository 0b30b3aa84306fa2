#pragma once

#include <filesystem>
#include <json.hpp>
#include <string>
#include <vector>

#include "xtalkprint/classify.hpp"
#include "xtalkprint/estimate.hpp"
#include "xtalkprint/fingerprint.hpp"
#include "xtalkprint/noise.hpp"
#include "xtalkprint/sim.hpp"
#include "xtalkprint/topology.hpp"

namespace xtalkprint {

using Json = nlohmann::ordered_json;

/// Shortest round-trip decimal form; identical across runs.
std::string format_double(double v);

void write_text_file(const std::filesystem::path& path, const std::string& content);
std::string read_text_file(const std::filesystem::path& path);

Json fleet_to_json(const Fleet& fleet);
Fleet fleet_from_json(const Json& j);

Json noise_config_to_json(const NoiseConfig& config);
NoiseConfig noise_config_from_json(const Json& j);
Json drift_config_to_json(const DriftConfig& config);
DriftConfig drift_config_from_json(const Json& j);

Json error_model_to_json(const ErrorModel& model);
ErrorModel error_model_from_json(const Json& j);
Json batch_params_to_json(const BatchParams& params);
BatchParams batch_params_from_json(const Json& j);

/// One circuit per line: {"circuit_id", "shots", "counts": {bits: count}}.
std::string count_records_to_jsonl(const std::vector<CountRecord>& records);
std::vector<CountRecord> count_records_from_jsonl(const std::string& text);

/// CSV rows: device, batch, drive, target, source, value, std_err, clamped.
std::string estimates_to_csv(const EstimateSet& set, const std::string& device_id,
                             int batch_index);

Json fingerprint_to_json(const Fingerprint& fp);
Fingerprint fingerprint_from_json(const Json& j);
/// One row per feature: frame, batch, drive, target_a, target_b, source, value.
std::string fingerprint_to_csv(const Fingerprint& fp);

Json embedding_to_json(const Embedding& emb);
Embedding embedding_from_json(const Json& j);

/// Dataset directory: manifest.json plus one class_<k>.csv per class with
/// a batch column and the feature values of every sample of that class.
void save_dataset(const std::filesystem::path& dir, const FingerprintDataset& dataset);
FingerprintDataset load_dataset(const std::filesystem::path& dir);

/// Persisted classifier: preprocessing, weights, classes, layout hash.
struct ClassifierBundle {
    PatternName pattern = PatternName::P1;
    std::vector<int> train_batches;
    std::uint64_t layout_hash = 0;
    std::vector<Embedding> classes;
    Standardizer standardizer;
    PcaModel pca;
    MlpModel mlp;
};

Json classifier_to_json(const ClassifierBundle& bundle);
ClassifierBundle classifier_from_json(const Json& j);

std::string accuracy_reports_to_csv(const std::vector<AccuracyReport>& reports,
                                    const std::vector<std::string>& classifier_names);

}  // namespace xtalkprint
