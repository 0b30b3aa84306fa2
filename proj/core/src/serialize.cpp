#include "xtalkprint/serialize.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace xtalkprint {

std::string format_double(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc{}) throw std::runtime_error("format_double failed");
    return std::string(buf, ptr);
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    out << content;
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open: " + path.string());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

namespace {

Json vec3_to_json(const Eigen::Vector3d& v) { return Json::array({v.x(), v.y(), v.z()}); }

Eigen::Vector3d vec3_from_json(const Json& j) {
    return {j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>()};
}

Json rates_to_json(const QubitRates& r) {
    Json j;
    j["h"] = vec3_to_json(r.h);
    j["s"] = vec3_to_json(r.s);
    j["a"] = vec3_to_json(r.a);
    return j;
}

QubitRates rates_from_json(const Json& j) {
    QubitRates r;
    r.h = vec3_from_json(j.at("h"));
    r.s = vec3_from_json(j.at("s"));
    r.a = vec3_from_json(j.at("a"));
    return r;
}

Json coupling_to_json(Coupling c) { return Json::array({c.first, c.second}); }

Coupling coupling_from_json(const Json& j) { return {j.at(0).get<int>(), j.at(1).get<int>()}; }

Json matrix_to_json(const Eigen::MatrixXd& m) {
    Json j;
    j["rows"] = m.rows();
    j["cols"] = m.cols();
    Json data = Json::array();
    for (long c = 0; c < m.cols(); ++c)
        for (long r = 0; r < m.rows(); ++r) data.push_back(m(r, c));
    j["data"] = std::move(data);
    return j;
}

Eigen::MatrixXd matrix_from_json(const Json& j) {
    Eigen::MatrixXd m(j.at("rows").get<long>(), j.at("cols").get<long>());
    const auto& data = j.at("data");
    long i = 0;
    for (long c = 0; c < m.cols(); ++c)
        for (long r = 0; r < m.rows(); ++r) m(r, c) = data.at(i++).get<double>();
    return m;
}

Json vector_to_json(const Eigen::VectorXd& v) {
    Json data = Json::array();
    for (long i = 0; i < v.size(); ++i) data.push_back(v(i));
    return data;
}

Eigen::VectorXd vector_from_json(const Json& j) {
    Eigen::VectorXd v(static_cast<long>(j.size()));
    for (long i = 0; i < v.size(); ++i) v(i) = j.at(i).get<double>();
    return v;
}

}  // namespace

Json fleet_to_json(const Fleet& fleet) {
    Json j;
    j["version"] = 1;
    j["fleet_seed"] = fleet.fleet_seed;
    Json devices = Json::array();
    for (const auto& d : fleet.devices) {
        Json dev;
        dev["device_id"] = d.device_id;
        dev["kind"] = to_string(d.kind);
        dev["num_qubits"] = d.num_qubits;
        Json couplings = Json::array();
        for (auto c : d.couplings) couplings.push_back(coupling_to_json(c));
        dev["couplings"] = std::move(couplings);
        devices.push_back(std::move(dev));
    }
    j["devices"] = std::move(devices);
    return j;
}

Fleet fleet_from_json(const Json& j) {
    Fleet fleet;
    fleet.fleet_seed = j.at("fleet_seed").get<std::uint64_t>();
    for (const auto& dev : j.at("devices")) {
        DeviceTopology d;
        d.device_id = dev.at("device_id").get<std::string>();
        d.kind = device_kind_from_string(dev.at("kind").get<std::string>());
        d.num_qubits = dev.at("num_qubits").get<int>();
        for (const auto& c : dev.at("couplings")) d.couplings.push_back(coupling_from_json(c));
        fleet.devices.push_back(std::move(d));
    }
    return fleet;
}

Json noise_config_to_json(const NoiseConfig& c) {
    Json j;
    j["h_min"] = c.h_min;
    j["h_max"] = c.h_max;
    j["s_min"] = c.s_min;
    j["s_max"] = c.s_max;
    j["a_frac_min"] = c.a_frac_min;
    j["a_frac_max"] = c.a_frac_max;
    j["lambda_min"] = c.lambda_min;
    j["lambda_max"] = c.lambda_max;
    j["crosstalk_scale"] = c.crosstalk_scale;
    j["gamma"] = c.gamma;
    j["duration_ratio"] = c.duration_ratio;
    return j;
}

NoiseConfig noise_config_from_json(const Json& j) {
    NoiseConfig c;
    c.h_min = j.value("h_min", c.h_min);
    c.h_max = j.value("h_max", c.h_max);
    c.s_min = j.value("s_min", c.s_min);
    c.s_max = j.value("s_max", c.s_max);
    c.a_frac_min = j.value("a_frac_min", c.a_frac_min);
    c.a_frac_max = j.value("a_frac_max", c.a_frac_max);
    c.lambda_min = j.value("lambda_min", c.lambda_min);
    c.lambda_max = j.value("lambda_max", c.lambda_max);
    c.crosstalk_scale = j.value("crosstalk_scale", c.crosstalk_scale);
    c.gamma = j.value("gamma", c.gamma);
    c.duration_ratio = j.value("duration_ratio", c.duration_ratio);
    return c;
}

Json drift_config_to_json(const DriftConfig& c) {
    Json j;
    j["sigma_drift"] = c.sigma_drift;
    j["p_cal"] = c.p_cal;
    j["sigma_cal"] = c.sigma_cal;
    return j;
}

DriftConfig drift_config_from_json(const Json& j) {
    DriftConfig c;
    c.sigma_drift = j.value("sigma_drift", c.sigma_drift);
    c.p_cal = j.value("p_cal", c.p_cal);
    c.sigma_cal = j.value("sigma_cal", c.sigma_cal);
    return c;
}

namespace {

Json crosstalk_block_to_json(const ErrorModel::CrosstalkBlock& block) {
    Json j;
    j["drive"] = block.drive.label();
    Json spect = Json::array();
    for (std::size_t q = 0; q < block.per_spectator.size(); ++q) {
        if (block.drive.drives(static_cast<int>(q))) continue;
        Json entry;
        entry["qubit"] = q;
        entry["rates"] = rates_to_json(block.per_spectator[q]);
        spect.push_back(std::move(entry));
    }
    j["per_spectator"] = std::move(spect);
    Json pairs = Json::array();
    for (const auto& p : block.per_pair) {
        Json entry;
        entry["pair"] = coupling_to_json(p.pair);
        entry["lambda"] = p.lambda;
        pairs.push_back(std::move(entry));
    }
    j["per_pair"] = std::move(pairs);
    return j;
}

ErrorModel::CrosstalkBlock crosstalk_block_from_json(const Json& j, int num_qubits) {
    ErrorModel::CrosstalkBlock block;
    block.drive = drive_from_label(j.at("drive").get<std::string>());
    block.per_spectator.assign(num_qubits, QubitRates{});
    for (const auto& entry : j.at("per_spectator"))
        block.per_spectator.at(entry.at("qubit").get<int>()) =
            rates_from_json(entry.at("rates"));
    for (const auto& entry : j.at("per_pair"))
        block.per_pair.push_back(
            {coupling_from_json(entry.at("pair")), entry.at("lambda").get<double>()});
    return block;
}

}  // namespace

Json error_model_to_json(const ErrorModel& model) {
    Json j;
    j["version"] = 1;
    j["device_id"] = model.device_id;
    j["duration_ratio"] = model.duration_ratio;
    Json ambient = Json::array();
    for (const auto& r : model.ambient) ambient.push_back(rates_to_json(r));
    j["ambient"] = std::move(ambient);
    Json pairs = Json::array();
    for (const auto& p : model.pair_ambient) {
        Json entry;
        entry["pair"] = coupling_to_json(p.pair);
        entry["lambda"] = p.lambda;
        pairs.push_back(std::move(entry));
    }
    j["pair_ambient"] = std::move(pairs);
    Json blocks = Json::array();
    for (const auto& b : model.crosstalk) blocks.push_back(crosstalk_block_to_json(b));
    j["crosstalk"] = std::move(blocks);
    return j;
}

ErrorModel error_model_from_json(const Json& j) {
    ErrorModel model;
    model.device_id = j.at("device_id").get<std::string>();
    model.duration_ratio = j.at("duration_ratio").get<double>();
    for (const auto& r : j.at("ambient")) model.ambient.push_back(rates_from_json(r));
    for (const auto& p : j.at("pair_ambient"))
        model.pair_ambient.push_back(
            {coupling_from_json(p.at("pair")), p.at("lambda").get<double>()});
    for (const auto& b : j.at("crosstalk"))
        model.crosstalk.push_back(
            crosstalk_block_from_json(b, static_cast<int>(model.ambient.size())));
    return model;
}

Json batch_params_to_json(const BatchParams& params) {
    Json j;
    j["version"] = 1;
    j["device_id"] = params.device_id;
    j["batch_index"] = params.batch_index;
    j["effective"] = error_model_to_json(params.effective);
    return j;
}

BatchParams batch_params_from_json(const Json& j) {
    BatchParams params;
    params.device_id = j.at("device_id").get<std::string>();
    params.batch_index = j.at("batch_index").get<int>();
    params.effective = error_model_from_json(j.at("effective"));
    return params;
}

std::string count_records_to_jsonl(const std::vector<CountRecord>& records) {
    std::ostringstream os;
    for (const auto& record : records) {
        Json j;
        j["circuit_id"] = record.circuit_id;
        j["shots"] = record.shots;
        Json counts;
        for (const auto& [bits, count] : record.counts) counts[bits] = count;
        j["counts"] = std::move(counts);
        os << j.dump() << "\n";
    }
    return os.str();
}

std::vector<CountRecord> count_records_from_jsonl(const std::string& text) {
    std::vector<CountRecord> records;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        Json j = Json::parse(line);
        CountRecord record;
        record.circuit_id = j.at("circuit_id").get<std::string>();
        record.shots = j.at("shots").get<long>();
        for (const auto& [bits, count] : j.at("counts").items())
            record.counts[bits] = count.get<long>();
        records.push_back(std::move(record));
    }
    return records;
}

namespace {

std::string target_string(const FeatureKey& key) {
    if (key.target_b < 0) return "q" + std::to_string(key.target_a);
    return "q" + std::to_string(key.target_a) + "q" + std::to_string(key.target_b);
}

std::string drive_string(const FeatureKey& key) {
    return DriveSpec{key.drive_kind, key.drive_a, key.drive_b}.label();
}

}  // namespace

std::string estimates_to_csv(const EstimateSet& set, const std::string& device_id,
                             int batch_index) {
    std::ostringstream os;
    os << "device,batch,drive,target,source,value,std_err,clamped\n";
    for (const auto& [key, est] : set.items) {
        os << device_id << "," << batch_index << "," << drive_string(key) << ","
           << target_string(key) << "," << to_string(est.source) << ","
           << format_double(est.value) << "," << format_double(est.std_err) << ","
           << (est.clamped ? 1 : 0) << "\n";
    }
    return os.str();
}

Json fingerprint_to_json(const Fingerprint& fp) {
    Json j;
    j["version"] = 1;
    if (fp.frame.is_device) {
        j["frame"] = "device";
        j["device_id"] = fp.frame.device_id;
    } else {
        j["frame"] = "pattern";
        j["pattern"] = to_string(fp.frame.pattern);
    }
    j["batch_index"] = fp.batch_index;
    j["layout_hash"] = fp.layout_hash();
    Json layout = Json::array();
    for (const auto& key : fp.layout) layout.push_back(to_string(key));
    j["layout"] = std::move(layout);
    j["features"] = vector_to_json(fp.features);
    return j;
}

namespace {

FeatureKey feature_key_from_string(const std::string& s) {
    const auto c1 = s.find(':');
    const auto c2 = s.rfind(':');
    if (c1 == std::string::npos || c2 == c1)
        throw std::invalid_argument("bad feature key: " + s);
    FeatureKey key;
    const DriveSpec drive = drive_from_label(s.substr(0, c1));
    key.drive_kind = drive.kind;
    key.drive_a = drive.a;
    key.drive_b = drive.b;
    const std::string target = s.substr(c1 + 1, c2 - c1 - 1);
    if (target.empty() || target[0] != 'q') throw std::invalid_argument("bad feature key: " + s);
    const auto second_q = target.find('q', 1);
    if (second_q == std::string::npos) {
        key.target_a = std::stoi(target.substr(1));
        key.target_b = -1;
    } else {
        key.target_a = std::stoi(target.substr(1, second_q - 1));
        key.target_b = std::stoi(target.substr(second_q + 1));
    }
    key.source = rate_source_from_string(s.substr(c2 + 1));
    return key;
}

}  // namespace

Fingerprint fingerprint_from_json(const Json& j) {
    Fingerprint fp;
    const std::string frame = j.at("frame").get<std::string>();
    if (frame == "device") {
        fp.frame = {true, j.at("device_id").get<std::string>(), PatternName::P1};
    } else if (frame == "pattern") {
        fp.frame = {false, "", pattern_from_string(j.at("pattern").get<std::string>())};
    } else {
        throw std::invalid_argument("bad fingerprint frame: " + frame);
    }
    fp.batch_index = j.at("batch_index").get<int>();
    for (const auto& key : j.at("layout"))
        fp.layout.push_back(feature_key_from_string(key.get<std::string>()));
    fp.features = vector_from_json(j.at("features"));
    if (fp.features.size() != static_cast<long>(fp.layout.size()))
        throw std::invalid_argument("fingerprint features/layout length mismatch");
    if (j.contains("layout_hash") &&
        j.at("layout_hash").get<std::uint64_t>() != fp.layout_hash())
        throw std::invalid_argument("fingerprint layout hash mismatch");
    return fp;
}

std::string fingerprint_to_csv(const Fingerprint& fp) {
    std::ostringstream os;
    os << "frame,batch,drive,target,source,value\n";
    for (std::size_t i = 0; i < fp.layout.size(); ++i) {
        const auto& key = fp.layout[i];
        os << fp.frame.label() << "," << fp.batch_index << "," << drive_string(key) << ","
           << target_string(key) << "," << to_string(key.source) << ","
           << format_double(fp.features(static_cast<long>(i))) << "\n";
    }
    return os.str();
}

Json embedding_to_json(const Embedding& emb) {
    Json j;
    j["pattern"] = to_string(emb.pattern);
    j["device_id"] = emb.device_id;
    j["vertex_map"] = emb.vertex_map;
    return j;
}

Embedding embedding_from_json(const Json& j) {
    Embedding emb;
    emb.pattern = pattern_from_string(j.at("pattern").get<std::string>());
    emb.device_id = j.at("device_id").get<std::string>();
    emb.vertex_map = j.at("vertex_map").get<std::vector<int>>();
    return emb;
}

void save_dataset(const std::filesystem::path& dir, const FingerprintDataset& dataset) {
    Json manifest;
    manifest["version"] = 1;
    manifest["pattern"] = to_string(dataset.pattern);
    manifest["dimension"] = dataset.layout.size();
    manifest["layout_hash"] = layout_hash(dataset.layout);
    Json layout = Json::array();
    for (const auto& key : dataset.layout) layout.push_back(to_string(key));
    manifest["layout"] = std::move(layout);
    Json classes = Json::array();
    std::vector<long> per_class(dataset.num_classes(), 0);
    for (int label : dataset.labels) ++per_class[label];
    for (int k = 0; k < dataset.num_classes(); ++k) {
        Json entry = embedding_to_json(dataset.classes[k]);
        entry["samples"] = per_class[k];
        entry["file"] = "class_" + std::to_string(k) + ".csv";
        classes.push_back(std::move(entry));
    }
    manifest["classes"] = std::move(classes);
    write_text_file(dir / "manifest.json", manifest.dump(2) + "\n");

    for (int k = 0; k < dataset.num_classes(); ++k) {
        std::ostringstream os;
        os << "batch";
        for (std::size_t i = 0; i < dataset.layout.size(); ++i) os << ",f" << i;
        os << "\n";
        for (long row = 0; row < dataset.num_samples(); ++row) {
            if (dataset.labels[row] != k) continue;
            os << dataset.batch_of[row];
            for (long c = 0; c < dataset.samples.cols(); ++c)
                os << "," << format_double(dataset.samples(row, c));
            os << "\n";
        }
        write_text_file(dir / ("class_" + std::to_string(k) + ".csv"), os.str());
    }
}

FingerprintDataset load_dataset(const std::filesystem::path& dir) {
    Json manifest = Json::parse(read_text_file(dir / "manifest.json"));
    FingerprintDataset dataset;
    dataset.pattern = pattern_from_string(manifest.at("pattern").get<std::string>());
    for (const auto& key : manifest.at("layout"))
        dataset.layout.push_back(feature_key_from_string(key.get<std::string>()));
    if (manifest.at("layout_hash").get<std::uint64_t>() != layout_hash(dataset.layout))
        throw std::invalid_argument("dataset manifest layout hash mismatch");

    std::vector<std::vector<double>> rows;
    std::vector<int> labels, batches;
    int k = 0;
    for (const auto& entry : manifest.at("classes")) {
        Embedding emb = embedding_from_json(entry);
        dataset.classes.push_back(emb);
        std::istringstream is(read_text_file(dir / entry.at("file").get<std::string>()));
        std::string line;
        std::getline(is, line);  // header
        while (std::getline(is, line)) {
            if (line.empty()) continue;
            std::vector<double> values;
            std::stringstream ls(line);
            std::string cell;
            while (std::getline(ls, cell, ',')) values.push_back(std::stod(cell));
            if (values.size() != dataset.layout.size() + 1)
                throw std::invalid_argument("dataset row width mismatch in " +
                                            entry.at("file").get<std::string>());
            batches.push_back(static_cast<int>(values[0]));
            labels.push_back(k);
            rows.push_back(std::vector<double>(values.begin() + 1, values.end()));
        }
        ++k;
    }
    dataset.samples.resize(static_cast<long>(rows.size()),
                           static_cast<long>(dataset.layout.size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows[i].size(); ++j)
            dataset.samples(static_cast<long>(i), static_cast<long>(j)) = rows[i][j];
    dataset.labels = std::move(labels);
    dataset.batch_of = std::move(batches);
    return dataset;
}

Json classifier_to_json(const ClassifierBundle& bundle) {
    Json j;
    j["version"] = 1;
    j["pattern"] = to_string(bundle.pattern);
    j["train_batches"] = bundle.train_batches;
    j["layout_hash"] = bundle.layout_hash;
    Json classes = Json::array();
    for (const auto& emb : bundle.classes) classes.push_back(embedding_to_json(emb));
    j["classes"] = std::move(classes);
    j["standardizer_mean"] = vector_to_json(bundle.standardizer.mean);
    j["standardizer_std"] = vector_to_json(bundle.standardizer.stddev);
    j["pca_components"] = matrix_to_json(bundle.pca.components);
    j["pca_explained_ratio"] = vector_to_json(bundle.pca.explained_variance_ratio);
    j["w1"] = matrix_to_json(bundle.mlp.w1);
    j["b1"] = vector_to_json(bundle.mlp.b1);
    j["w2"] = matrix_to_json(bundle.mlp.w2);
    j["b2"] = vector_to_json(bundle.mlp.b2);
    j["set_losses"] = bundle.mlp.set_losses;
    j["epochs_trained"] = bundle.mlp.epochs_trained;
    j["converged"] = bundle.mlp.converged;
    return j;
}

ClassifierBundle classifier_from_json(const Json& j) {
    ClassifierBundle bundle;
    bundle.pattern = pattern_from_string(j.at("pattern").get<std::string>());
    bundle.train_batches = j.at("train_batches").get<std::vector<int>>();
    bundle.layout_hash = j.at("layout_hash").get<std::uint64_t>();
    for (const auto& c : j.at("classes")) bundle.classes.push_back(embedding_from_json(c));
    bundle.standardizer.mean = vector_from_json(j.at("standardizer_mean"));
    bundle.standardizer.stddev = vector_from_json(j.at("standardizer_std"));
    bundle.pca.components = matrix_from_json(j.at("pca_components"));
    bundle.pca.explained_variance_ratio = vector_from_json(j.at("pca_explained_ratio"));
    bundle.mlp.w1 = matrix_from_json(j.at("w1"));
    bundle.mlp.b1 = vector_from_json(j.at("b1"));
    bundle.mlp.w2 = matrix_from_json(j.at("w2"));
    bundle.mlp.b2 = vector_from_json(j.at("b2"));
    bundle.mlp.set_losses = j.at("set_losses").get<std::vector<double>>();
    bundle.mlp.epochs_trained = j.at("epochs_trained").get<int>();
    bundle.mlp.converged = j.at("converged").get<bool>();
    return bundle;
}

std::string accuracy_reports_to_csv(const std::vector<AccuracyReport>& reports,
                                    const std::vector<std::string>& classifier_names) {
    if (reports.size() != classifier_names.size())
        throw std::invalid_argument("reports/names length mismatch");
    std::ostringstream os;
    os << "pattern,classifier,train_batches,test_batches,device_accuracy,embedding_accuracy,"
          "num_test\n";
    auto join = [](const std::vector<int>& v) {
        std::string s;
        for (std::size_t i = 0; i < v.size(); ++i)
            s += (i ? "+" : "") + std::to_string(v[i]);
        return s;
    };
    for (std::size_t i = 0; i < reports.size(); ++i) {
        const auto& r = reports[i];
        os << to_string(r.pattern) << "," << classifier_names[i] << "," << join(r.train_batches)
           << "," << join(r.test_batches) << "," << format_double(r.device_accuracy) << ","
           << format_double(r.embedding_accuracy) << "," << r.num_test << "\n";
    }
    return os.str();
}

}  // namespace xtalkprint
