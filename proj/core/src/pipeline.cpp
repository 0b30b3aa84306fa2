#include "xtalkprint/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <functional>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include "xtalkprint/rng.hpp"

namespace xtalkprint {

void RunConfig::validate() const {
    noise.validate();
    if (shots < 0) throw std::invalid_argument("config: shots must be >= 0 (0 = analytic)");
    if (batches < 1) throw std::invalid_argument("config: batches must be >= 1");
    if (idt.idle_lengths.empty()) throw std::invalid_argument("config: empty idle length set");
    auto batch_ok = [&](int b) { return b >= 0 && b < batches; };
    if (!std::all_of(train_batches.begin(), train_batches.end(), batch_ok) ||
        !std::all_of(test_batches.begin(), test_batches.end(), batch_ok))
        throw std::invalid_argument("config: train/test splits reference missing batches");
    if (jobs < 1) throw std::invalid_argument("config: jobs must be >= 1");
}

Json run_config_to_json(const RunConfig& c) {
    Json j;
    j["version"] = 1;
    j["seed"] = c.seed;
    j["noise"] = noise_config_to_json(c.noise);
    j["drift"] = drift_config_to_json(c.drift);
    j["idle_lengths"] = c.idt.idle_lengths;
    j["shots"] = c.shots;
    j["batches"] = c.batches;
    Json patterns = Json::array();
    for (auto p : c.patterns) patterns.push_back(to_string(p));
    j["patterns"] = std::move(patterns);
    j["train_batches"] = c.train_batches;
    j["test_batches"] = c.test_batches;
    j["variance_target"] = c.variance_target;
    Json h;
    h["learning_rate"] = c.classifier.learning_rate;
    h["beta1"] = c.classifier.beta1;
    h["beta2"] = c.classifier.beta2;
    h["epsilon"] = c.classifier.epsilon;
    h["dropout"] = c.classifier.dropout;
    h["epochs_per_set"] = c.classifier.epochs_per_set;
    h["max_sets"] = c.classifier.max_sets;
    h["loss_threshold"] = c.classifier.loss_threshold;
    j["classifier"] = std::move(h);
    j["out_dir"] = c.out_dir;
    j["jobs"] = c.jobs;
    return j;
}

RunConfig run_config_from_json(const Json& j) {
    RunConfig c;
    c.seed = j.value("seed", c.seed);
    if (j.contains("noise")) c.noise = noise_config_from_json(j.at("noise"));
    if (j.contains("drift")) c.drift = drift_config_from_json(j.at("drift"));
    if (j.contains("idle_lengths"))
        c.idt.idle_lengths = j.at("idle_lengths").get<std::vector<int>>();
    c.shots = j.value("shots", c.shots);
    c.batches = j.value("batches", c.batches);
    if (j.contains("patterns")) {
        c.patterns.clear();
        for (const auto& p : j.at("patterns"))
            c.patterns.push_back(pattern_from_string(p.get<std::string>()));
    }
    if (j.contains("train_batches"))
        c.train_batches = j.at("train_batches").get<std::vector<int>>();
    if (j.contains("test_batches")) c.test_batches = j.at("test_batches").get<std::vector<int>>();
    c.variance_target = j.value("variance_target", c.variance_target);
    if (j.contains("classifier")) {
        const auto& h = j.at("classifier");
        c.classifier.learning_rate = h.value("learning_rate", c.classifier.learning_rate);
        c.classifier.beta1 = h.value("beta1", c.classifier.beta1);
        c.classifier.beta2 = h.value("beta2", c.classifier.beta2);
        c.classifier.epsilon = h.value("epsilon", c.classifier.epsilon);
        c.classifier.dropout = h.value("dropout", c.classifier.dropout);
        c.classifier.epochs_per_set = h.value("epochs_per_set", c.classifier.epochs_per_set);
        c.classifier.max_sets = h.value("max_sets", c.classifier.max_sets);
        c.classifier.loss_threshold = h.value("loss_threshold", c.classifier.loss_threshold);
    }
    c.out_dir = j.value("out_dir", c.out_dir);
    c.jobs = j.value("jobs", c.jobs);
    return c;
}

namespace {

std::string batch_tag(const std::string& device, int batch) {
    return device + "_b" + std::to_string(batch);
}

}  // namespace

std::filesystem::path OutputPaths::counts_jsonl(const std::string& device, int batch) const {
    return root / "counts" / (batch_tag(device, batch) + ".jsonl");
}
std::filesystem::path OutputPaths::estimates_csv(const std::string& device, int batch) const {
    return root / "estimates" / (batch_tag(device, batch) + ".csv");
}
std::filesystem::path OutputPaths::fingerprint_json(const std::string& device, int batch) const {
    return root / "fingerprints" / (batch_tag(device, batch) + ".json");
}
std::filesystem::path OutputPaths::fingerprint_csv(const std::string& device, int batch) const {
    return root / "fingerprints" / (batch_tag(device, batch) + ".csv");
}
std::filesystem::path OutputPaths::classifier_json(PatternName pattern) const {
    return root / "models" / (to_string(pattern) + ".json");
}
std::filesystem::path OutputPaths::dataset_dir(PatternName pattern) const {
    return root / "datasets" / to_string(pattern);
}
std::filesystem::path OutputPaths::report(const std::string& name) const {
    return root / "reports" / name;
}

OutputPaths output_paths(const RunConfig& config) {
    std::string dir = config.out_dir;
    if (const char* env = std::getenv("XTALKPRINT_OUT"); env && *env) dir = env;
    return OutputPaths{std::filesystem::path(dir)};
}

Fleet cmd_fleet_init(const RunConfig& config) {
    config.validate();
    const auto paths = output_paths(config);
    Fleet fleet = default_fleet(config.seed);
    auto models = generate_fleet_model(fleet, config.noise, config.seed);
    write_text_file(paths.fleet_json(), fleet_to_json(fleet).dump(2) + "\n");
    Json j;
    j["version"] = 1;
    j["seed"] = config.seed;
    j["noise"] = noise_config_to_json(config.noise);
    Json devices = Json::array();
    for (const auto& m : models) devices.push_back(error_model_to_json(m));
    j["devices"] = std::move(devices);
    write_text_file(paths.models_json(), j.dump(2) + "\n");
    return fleet;
}

namespace {

struct FleetState {
    Fleet fleet;
    std::vector<ErrorModel> models;
};

FleetState load_fleet_state(const RunConfig& config) {
    const auto paths = output_paths(config);
    if (!std::filesystem::exists(paths.fleet_json()) ||
        !std::filesystem::exists(paths.models_json()))
        throw std::runtime_error("fleet not initialized; run fleet-init first (missing " +
                                 paths.fleet_json().string() + " or " +
                                 paths.models_json().string() + ")");
    FleetState state;
    state.fleet = fleet_from_json(Json::parse(read_text_file(paths.fleet_json())));
    Json j = Json::parse(read_text_file(paths.models_json()));
    for (const auto& m : j.at("devices")) state.models.push_back(error_model_from_json(m));
    return state;
}

const ErrorModel& model_for(const FleetState& state, const std::string& device_id) {
    for (const auto& m : state.models)
        if (m.device_id == device_id) return m;
    throw std::runtime_error("models.json lacks device " + device_id);
}

void run_parallel(int jobs, int num_tasks, const std::function<void(int)>& task) {
    if (jobs <= 1) {
        for (int i = 0; i < num_tasks; ++i) task(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> workers;
    std::mutex error_mutex;
    std::exception_ptr error;
    const int workers_n = std::min(jobs, num_tasks);
    for (int w = 0; w < workers_n; ++w)
        workers.emplace_back([&] {
            for (int i = next.fetch_add(1); i < num_tasks; i = next.fetch_add(1)) {
                try {
                    task(i);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!error) error = std::current_exception();
                }
            }
        });
    for (auto& w : workers) w.join();
    if (error) std::rethrow_exception(error);
}

bool enrollment_complete(const OutputPaths& paths, const std::string& device, int batch,
                         std::size_t suite_size, bool analytic) {
    const auto estimates = paths.estimates_csv(device, batch);
    const auto fp_json = paths.fingerprint_json(device, batch);
    const auto fp_csv = paths.fingerprint_csv(device, batch);
    if (!std::filesystem::exists(estimates) || !std::filesystem::exists(fp_json) ||
        !std::filesystem::exists(fp_csv))
        return false;
    if (analytic) return true;
    const auto counts = paths.counts_jsonl(device, batch);
    if (!std::filesystem::exists(counts)) return false;
    // partial count files mark an incomplete pass; redo the whole cell
    const std::string text = read_text_file(counts);
    const std::size_t lines = static_cast<std::size_t>(
        std::count(text.begin(), text.end(), '\n'));
    return lines == suite_size;
}

}  // namespace

EnrollResult cmd_enroll(const RunConfig& config) {
    config.validate();
    const auto paths = output_paths(config);
    const FleetState state = load_fleet_state(config);

    struct Task {
        const DeviceTopology* device;
        int batch;
    };
    std::vector<Task> tasks;
    for (const auto& device : state.fleet.devices)
        for (int b = 0; b < config.batches; ++b) tasks.push_back({&device, b});

    std::atomic<int> simulated{0};
    std::atomic<int> skipped{0};
    run_parallel(config.jobs, static_cast<int>(tasks.size()), [&](int idx) {
        const auto& [device_ptr, batch] = tasks[idx];
        const DeviceTopology& device = *device_ptr;
        const auto specs = generate_experiments(device, config.idt);
        const bool analytic = config.shots == 0;
        if (enrollment_complete(paths, device.device_id, batch, specs.size(), analytic)) {
            ++skipped;
            return;
        }
        const ErrorModel& model = model_for(state, device.device_id);
        const BatchParams params = batch_params(model, batch, config.drift, config.seed);

        std::vector<CountRecord> records;
        std::vector<CircuitMoments> moments;
        records.reserve(analytic ? 0 : specs.size());
        moments.reserve(specs.size());
        for (const auto& spec : specs) {
            if (analytic) {
                moments.push_back(analytic_moments(params, spec));
                continue;
            }
            const std::uint64_t circuit_seed =
                derive_seed(config.seed, "counts", device.device_id, batch, spec.circuit_id);
            records.push_back(simulate_counts(params, spec, config.shots, circuit_seed));
            moments.push_back(moments_from_counts(device, spec, records.back()));
        }
        const EstimateSet estimates = estimate_device(device, specs, moments);
        const Fingerprint fp = assemble(estimates, device, batch);

        if (!analytic)
            write_text_file(paths.counts_jsonl(device.device_id, batch),
                            count_records_to_jsonl(records));
        write_text_file(paths.estimates_csv(device.device_id, batch),
                        estimates_to_csv(estimates, device.device_id, batch));
        write_text_file(paths.fingerprint_json(device.device_id, batch),
                        fingerprint_to_json(fp).dump() + "\n");
        write_text_file(paths.fingerprint_csv(device.device_id, batch), fingerprint_to_csv(fp));
        ++simulated;
    });
    return {simulated.load(), skipped.load()};
}

std::vector<Fingerprint> load_enrolled_fingerprints(const RunConfig& config) {
    const auto paths = output_paths(config);
    const FleetState state = load_fleet_state(config);
    std::vector<Fingerprint> prints;
    std::vector<std::string> missing;
    for (const auto& device : state.fleet.devices)
        for (int b = 0; b < config.batches; ++b) {
            const auto path = paths.fingerprint_json(device.device_id, b);
            if (!std::filesystem::exists(path)) {
                missing.push_back(batch_tag(device.device_id, b));
                continue;
            }
            prints.push_back(fingerprint_from_json(Json::parse(read_text_file(path))));
        }
    if (!missing.empty()) {
        std::ostringstream os;
        os << "enrollment incomplete; missing fingerprints:";
        for (const auto& m : missing) os << " " << m;
        throw std::runtime_error(os.str());
    }
    return prints;
}

namespace {

std::string batches_tag(const std::vector<int>& batches) {
    std::string tag;
    for (int b : batches) tag += std::to_string(b) + ",";
    return tag;
}

ClassifierBundle train_bundle(const RunConfig& config, const FingerprintDataset& full_dataset,
                              const std::vector<int>& train_batches) {
    const FingerprintDataset train = full_dataset.filter_batches(train_batches);
    if (train.num_samples() == 0)
        throw std::runtime_error("no training samples for pattern " +
                                 to_string(full_dataset.pattern));
    auto [standardizer, pca] = fit_preprocess(train, config.variance_target);
    const std::uint64_t seed = derive_seed(config.seed, "train", to_string(train.pattern),
                                           batches_tag(train_batches));
    MlpModel mlp = train_mlp(train, standardizer, pca, config.classifier, seed);
    ClassifierBundle bundle;
    bundle.pattern = train.pattern;
    bundle.train_batches = train_batches;
    bundle.layout_hash = layout_hash(train.layout);
    bundle.classes = train.classes;
    bundle.standardizer = std::move(standardizer);
    bundle.pca = std::move(pca);
    bundle.mlp = std::move(mlp);
    return bundle;
}

AccuracyReport evaluate_bundle(const ClassifierBundle& bundle, const FingerprintDataset& test) {
    AccuracyReport report = evaluate(bundle.mlp, bundle.standardizer, bundle.pca, test);
    report.train_batches = bundle.train_batches;
    return report;
}

}  // namespace

std::vector<TrainOutcome> cmd_train(const RunConfig& config) {
    config.validate();
    const auto paths = output_paths(config);
    const FleetState state = load_fleet_state(config);
    const auto prints = load_enrolled_fingerprints(config);

    std::vector<TrainOutcome> outcomes(config.patterns.size());
    run_parallel(config.jobs, static_cast<int>(config.patterns.size()), [&](int idx) {
        const PatternName pattern = config.patterns[idx];
        const auto dataset = build_dataset(prints, pattern, state.fleet);
        save_dataset(paths.dataset_dir(pattern), dataset);
        const ClassifierBundle bundle = train_bundle(config, dataset, config.train_batches);
        write_text_file(paths.classifier_json(pattern), classifier_to_json(bundle).dump() + "\n");
        TrainOutcome out;
        out.pattern = pattern;
        out.final_loss = bundle.mlp.set_losses.empty() ? 0.0 : bundle.mlp.set_losses.back();
        out.epochs = bundle.mlp.epochs_trained;
        out.converged = bundle.mlp.converged;
        out.retained_components = bundle.pca.retained();
        outcomes[idx] = out;
    });
    return outcomes;
}

InferResult cmd_infer(const RunConfig& config, const std::filesystem::path& probe_file,
                      PatternName pattern) {
    const auto paths = output_paths(config);
    const auto model_path = paths.classifier_json(pattern);
    if (!std::filesystem::exists(model_path))
        throw std::runtime_error("no trained model for pattern " + to_string(pattern) +
                                 "; run train first");
    const ClassifierBundle bundle =
        classifier_from_json(Json::parse(read_text_file(model_path)));
    const Fingerprint probe = fingerprint_from_json(Json::parse(read_text_file(probe_file)));
    if (probe.layout_hash() != bundle.layout_hash)
        throw LayoutMismatchError("probe layout does not match the " + to_string(pattern) +
                                  " model (wrong pattern or dimension)");
    const Prediction pred = predict(bundle.mlp, bundle.standardizer, bundle.pca, probe);
    InferResult result;
    result.embedding = bundle.classes.at(pred.class_index);
    result.scores = pred.scores;
    double second = -std::numeric_limits<double>::infinity();
    for (long i = 0; i < pred.scores.size(); ++i)
        if (i != pred.class_index) second = std::max(second, pred.scores(i));
    result.margin = pred.scores(pred.class_index) - second;
    return result;
}

Fingerprint cmd_slice(const RunConfig& config, const Embedding& emb, int batch,
                      const std::filesystem::path& out_file) {
    const auto paths = output_paths(config);
    const FleetState state = load_fleet_state(config);
    const auto fp_path = paths.fingerprint_json(emb.device_id, batch);
    if (!std::filesystem::exists(fp_path))
        throw std::runtime_error("no enrolled fingerprint at " + fp_path.string());
    const Fingerprint full = fingerprint_from_json(Json::parse(read_text_file(fp_path)));
    Fingerprint sliced = slice(full, emb, state.fleet);
    if (!out_file.empty())
        write_text_file(out_file, fingerprint_to_json(sliced).dump() + "\n");
    return sliced;
}

namespace {

double median(std::vector<double> values) {
    if (values.empty()) return 0.0;
    const std::size_t mid = values.size() / 2;
    std::nth_element(values.begin(), values.begin() + mid, values.end());
    double m = values[mid];
    if (values.size() % 2 == 0) {
        std::nth_element(values.begin(), values.begin() + mid - 1, values.end());
        m = 0.5 * (m + values[mid - 1]);
    }
    return m;
}

}  // namespace

EvalSummary cmd_eval(const RunConfig& config) {
    config.validate();
    const auto paths = output_paths(config);
    const FleetState state = load_fleet_state(config);
    const auto prints = load_enrolled_fingerprints(config);

    EvalSummary summary;
    std::mutex summary_mutex;
    std::map<PatternName, std::string> distance_rows;

    run_parallel(config.jobs, static_cast<int>(config.patterns.size()), [&](int idx) {
        const PatternName pattern = config.patterns[idx];
        const auto dataset = build_dataset(prints, pattern, state.fleet);
        const long dim = dataset.samples.cols();
        const int num_classes = dataset.num_classes();

        // row lookup by (class, batch)
        std::map<std::pair<int, int>, long> row_of;
        for (long i = 0; i < dataset.num_samples(); ++i)
            row_of[{dataset.labels[i], dataset.batch_of[i]}] = i;
        auto dist = [&](long r1, long r2) {
            return (dataset.samples.row(r1) - dataset.samples.row(r2)).norm() /
                   static_cast<double>(dim);
        };

        // (a) inter: distinct embeddings, one batch; intra: one embedding,
        // two batches
        std::vector<double> inter, intra;
        std::ostringstream rows;
        for (int b = 0; b < config.batches; ++b)
            for (int i = 0; i < num_classes; ++i) {
                auto ri = row_of.find({i, b});
                if (ri == row_of.end()) continue;
                for (int j = i + 1; j < num_classes; ++j) {
                    auto rj = row_of.find({j, b});
                    if (rj == row_of.end()) continue;
                    const double d = dist(ri->second, rj->second);
                    inter.push_back(d);
                    rows << to_string(pattern) << ",inter," << b << "," << b << "," << i << ","
                         << j << "," << format_double(d) << "\n";
                }
            }
        for (int i = 0; i < num_classes; ++i)
            for (int b1 = 0; b1 < config.batches; ++b1) {
                auto r1 = row_of.find({i, b1});
                if (r1 == row_of.end()) continue;
                for (int b2 = b1 + 1; b2 < config.batches; ++b2) {
                    auto r2 = row_of.find({i, b2});
                    if (r2 == row_of.end()) continue;
                    const double d = dist(r1->second, r2->second);
                    intra.push_back(d);
                    rows << to_string(pattern) << ",intra," << b1 << "," << b2 << "," << i << ","
                         << i << "," << format_double(d) << "\n";
                }
            }
        DistanceSummary dsum;
        dsum.pattern = pattern;
        dsum.median_inter = median(inter);
        dsum.median_intra = median(intra);
        dsum.ratio = dsum.median_intra > 0.0 ? dsum.median_inter / dsum.median_intra : 0.0;
        dsum.num_inter = static_cast<long>(inter.size());
        dsum.num_intra = static_cast<long>(intra.size());

        // (b) training growth: train on first n batches, test on last 3
        std::vector<int> last3;
        for (int b = std::max(0, config.batches - 3); b < config.batches; ++b)
            last3.push_back(b);
        const FingerprintDataset last3_set = dataset.filter_batches(last3);
        std::map<std::string, ClassifierBundle> cache;
        auto bundle_for = [&](const std::vector<int>& train_batches) -> const ClassifierBundle& {
            const std::string tag = batches_tag(train_batches);
            auto it = cache.find(tag);
            if (it == cache.end())
                it = cache.emplace(tag, train_bundle(config, dataset, train_batches)).first;
            return it->second;
        };
        std::vector<AccuracyPoint> growth;
        for (int n = 1; n <= config.batches - 3; ++n) {
            std::vector<int> train_batches;
            for (int b = 0; b < n; ++b) train_batches.push_back(b);
            const AccuracyReport r = evaluate_bundle(bundle_for(train_batches), last3_set);
            growth.push_back({n, r.device_accuracy, r.embedding_accuracy});
        }

        // (c) configured split, MLP and nearest-centroid baseline
        const FingerprintDataset test_set = dataset.filter_batches(config.test_batches);
        AccuracyReport mlp_report = evaluate_bundle(bundle_for(config.train_batches), test_set);
        AccuracyReport centroid_report =
            nearest_centroid(dataset.filter_batches(config.train_batches), test_set);
        centroid_report.train_batches = config.train_batches;

        // (d) degradation: batch-0 classifier tested per batch
        const ClassifierBundle& batch0 = bundle_for({0});
        std::vector<AccuracyPoint> degradation;
        for (int b = 1; b < config.batches; ++b) {
            const std::vector<int> one{b};
            const FingerprintDataset per_batch = dataset.filter_batches(one);
            if (per_batch.num_samples() == 0) continue;
            const AccuracyReport r = evaluate_bundle(batch0, per_batch);
            degradation.push_back({b, r.device_accuracy, r.embedding_accuracy});
        }

        std::lock_guard lock(summary_mutex);
        summary.distances.push_back(dsum);
        summary.accuracy_vs_batches[pattern] = std::move(growth);
        summary.pattern_reports.push_back(std::move(mlp_report));
        summary.centroid_reports.push_back(std::move(centroid_report));
        summary.degradation[pattern] = std::move(degradation);
        distance_rows[pattern] = rows.str();
    });

    // deterministic report order regardless of worker interleaving
    auto pattern_order = [&](PatternName p) {
        return std::find(config.patterns.begin(), config.patterns.end(), p) -
               config.patterns.begin();
    };
    std::sort(summary.distances.begin(), summary.distances.end(),
              [&](const auto& a, const auto& b) {
                  return pattern_order(a.pattern) < pattern_order(b.pattern);
              });
    std::sort(summary.pattern_reports.begin(), summary.pattern_reports.end(),
              [&](const auto& a, const auto& b) {
                  return pattern_order(a.pattern) < pattern_order(b.pattern);
              });
    std::sort(summary.centroid_reports.begin(), summary.centroid_reports.end(),
              [&](const auto& a, const auto& b) {
                  return pattern_order(a.pattern) < pattern_order(b.pattern);
              });

    std::ostringstream distances_csv;
    distances_csv << "pattern,type,batch_a,batch_b,class_a,class_b,distance\n";
    for (PatternName p : config.patterns) distances_csv << distance_rows[p];
    write_text_file(paths.report("distances.csv"), distances_csv.str());

    std::ostringstream dist_summary_csv;
    dist_summary_csv << "pattern,median_inter,median_intra,ratio,num_inter,num_intra\n";
    for (const auto& d : summary.distances)
        dist_summary_csv << to_string(d.pattern) << "," << format_double(d.median_inter) << ","
                         << format_double(d.median_intra) << "," << format_double(d.ratio) << ","
                         << d.num_inter << "," << d.num_intra << "\n";
    write_text_file(paths.report("distance_summary.csv"), dist_summary_csv.str());

    std::ostringstream growth_csv;
    growth_csv << "pattern,train_batch_count,device_accuracy,embedding_accuracy\n";
    for (PatternName p : config.patterns)
        for (const auto& point : summary.accuracy_vs_batches[p])
            growth_csv << to_string(p) << "," << point.key << ","
                       << format_double(point.device_accuracy) << ","
                       << format_double(point.embedding_accuracy) << "\n";
    write_text_file(paths.report("accuracy_vs_batches.csv"), growth_csv.str());

    std::vector<AccuracyReport> split_reports;
    std::vector<std::string> names;
    for (std::size_t i = 0; i < summary.pattern_reports.size(); ++i) {
        split_reports.push_back(summary.pattern_reports[i]);
        names.push_back("mlp");
        split_reports.push_back(summary.centroid_reports[i]);
        names.push_back("nearest_centroid");
    }
    write_text_file(paths.report("pattern_accuracy.csv"),
                    accuracy_reports_to_csv(split_reports, names));

    std::ostringstream degradation_csv;
    degradation_csv << "pattern,test_batch,device_accuracy,embedding_accuracy\n";
    for (PatternName p : config.patterns)
        for (const auto& point : summary.degradation[p])
            degradation_csv << to_string(p) << "," << point.key << ","
                            << format_double(point.device_accuracy) << ","
                            << format_double(point.embedding_accuracy) << "\n";
    write_text_file(paths.report("degradation.csv"), degradation_csv.str());

    return summary;
}

}  // namespace xtalkprint
