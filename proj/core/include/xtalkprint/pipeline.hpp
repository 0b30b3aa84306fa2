#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "xtalkprint/classify.hpp"
#include "xtalkprint/serialize.hpp"

namespace xtalkprint {

/// One master seed fixes the fleet models, drift, sampling, weight
/// initialization and dropout streams; two runs with the same config
/// produce byte-identical output files.
struct RunConfig {
    std::uint64_t seed = 7;
    NoiseConfig noise;
    DriftConfig drift;
    IdtConfig idt;
    long shots = 2048;
    int batches = 9;
    std::vector<PatternName> patterns = all_patterns();
    std::vector<int> train_batches{0, 1, 2};
    std::vector<int> test_batches{3, 4, 5, 6, 7, 8};
    double variance_target = 0.95;
    MlpHyper classifier;
    std::string out_dir = "out";
    int jobs = 1;

    void validate() const;
};

Json run_config_to_json(const RunConfig& config);
RunConfig run_config_from_json(const Json& j);

struct OutputPaths {
    std::filesystem::path root;

    std::filesystem::path fleet_json() const { return root / "fleet.json"; }
    std::filesystem::path models_json() const { return root / "models.json"; }
    std::filesystem::path counts_jsonl(const std::string& device, int batch) const;
    std::filesystem::path estimates_csv(const std::string& device, int batch) const;
    std::filesystem::path fingerprint_json(const std::string& device, int batch) const;
    std::filesystem::path fingerprint_csv(const std::string& device, int batch) const;
    std::filesystem::path classifier_json(PatternName pattern) const;
    std::filesystem::path dataset_dir(PatternName pattern) const;
    std::filesystem::path report(const std::string& name) const;
};

OutputPaths output_paths(const RunConfig& config);

/// Thrown when a probe fingerprint does not match a model's layout.
struct LayoutMismatchError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Writes fleet.json and models.json; idempotent per seed.
Fleet cmd_fleet_init(const RunConfig& config);

struct EnrollResult {
    int simulated = 0;
    int skipped = 0;
};

/// Full enrollment pass: per (device, batch), drift -> suite -> sampling ->
/// estimation -> fingerprint, fanned out over a worker pool. Existing
/// complete artifacts are skipped, so interrupted runs resume.
EnrollResult cmd_enroll(const RunConfig& config);

/// All persisted full-device fingerprints; throws listing what is missing.
std::vector<Fingerprint> load_enrolled_fingerprints(const RunConfig& config);

struct TrainOutcome {
    PatternName pattern;
    double final_loss = 0.0;
    int epochs = 0;
    bool converged = false;
    long retained_components = 0;
};

/// Trains and persists one classifier per configured pattern on the
/// configured training batches.
std::vector<TrainOutcome> cmd_train(const RunConfig& config);

struct InferResult {
    Embedding embedding;
    double margin = 0.0;  // top-1 minus top-2 linear score
    Eigen::VectorXd scores;
};

InferResult cmd_infer(const RunConfig& config, const std::filesystem::path& probe_file,
                      PatternName pattern);

/// Slices a persisted full-device fingerprint down to an embedding and
/// writes the pattern-frame result.
Fingerprint cmd_slice(const RunConfig& config, const Embedding& emb, int batch,
                      const std::filesystem::path& out_file);

struct DistanceSummary {
    PatternName pattern;
    double median_inter = 0.0;
    double median_intra = 0.0;
    double ratio = 0.0;
    long num_inter = 0;
    long num_intra = 0;
};

struct AccuracyPoint {
    int key = 0;  // training batch count (b) or test batch (d)
    double device_accuracy = 0.0;
    double embedding_accuracy = 0.0;
};

struct EvalSummary {
    std::vector<DistanceSummary> distances;
    std::map<PatternName, std::vector<AccuracyPoint>> accuracy_vs_batches;
    std::vector<AccuracyReport> pattern_reports;     // MLP, train_batches split
    std::vector<AccuracyReport> centroid_reports;    // baseline, same split
    std::map<PatternName, std::vector<AccuracyPoint>> degradation;
};

/// Figure-analogue report suite from persisted artifacts only: distance
/// distributions, accuracy vs training batches (testing on the last three),
/// per-pattern accuracy for the configured split, and the degradation
/// series for batch-0 training.
EvalSummary cmd_eval(const RunConfig& config);

}  // namespace xtalkprint
