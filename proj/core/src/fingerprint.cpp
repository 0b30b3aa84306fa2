#include "xtalkprint/fingerprint.hpp"

#include <algorithm>
#include <map>
#include <sstream>
#include <stdexcept>

#include "xtalkprint/rng.hpp"

namespace xtalkprint {

DeviceTopology pattern_as_device(const PatternTopology& pattern) {
    DeviceTopology topo;
    topo.device_id = to_string(pattern.name);
    topo.kind = DeviceKind::L5;  // unused for pattern graphs
    topo.num_qubits = pattern.num_vertices;
    topo.couplings = pattern.edges;
    return topo;
}

std::uint64_t layout_hash(std::span<const FeatureKey> layout) {
    std::uint64_t h = fnv1a64("layout.v1");
    for (const auto& key : layout) h = splitmix64(h ^ fnv1a64(to_string(key)));
    return h;
}

std::uint64_t Fingerprint::layout_hash() const { return xtalkprint::layout_hash(layout); }

std::vector<FeatureKey> canonical_layout(const DeviceTopology& topology) {
    std::vector<FeatureKey> layout;
    for (const DriveSpec& drive : enumerate_drives(topology)) {
        auto spect = spectators_of(topology, drive);
        if (spect.empty()) continue;
        FeatureKey base;
        base.drive_kind = drive.kind;
        base.drive_a = drive.a;
        base.drive_b = drive.b;
        for (int q : spect)
            for (int k = 0; k < 9; ++k) {
                FeatureKey key = base;
                key.target_a = q;
                key.target_b = -1;
                key.source = static_cast<RateSource>(k);
                layout.push_back(key);
            }
        for (auto pair : topology.couplings) {
            if (drive.drives(pair.first) || drive.drives(pair.second)) continue;
            FeatureKey key = base;
            key.target_a = pair.first;
            key.target_b = pair.second;
            key.source = RateSource::PairLambda;
            layout.push_back(key);
        }
    }
    return layout;
}

Fingerprint assemble(const EstimateSet& estimates, const DeviceTopology& topology,
                     int batch_index) {
    std::map<FeatureKey, double> by_key;
    for (const auto& [key, est] : estimates.items) by_key[key] = est.value;

    Fingerprint fp;
    fp.frame = {true, topology.device_id, PatternName::P1};
    fp.batch_index = batch_index;
    fp.layout = canonical_layout(topology);
    fp.features.resize(static_cast<long>(fp.layout.size()));

    std::vector<std::string> missing;
    for (std::size_t i = 0; i < fp.layout.size(); ++i) {
        auto it = by_key.find(fp.layout[i]);
        if (it == by_key.end()) {
            missing.push_back(to_string(fp.layout[i]));
            continue;
        }
        fp.features(static_cast<long>(i)) = it->second;
    }
    if (!missing.empty()) {
        std::ostringstream os;
        os << "estimates do not cover topology " << topology.device_id << "; missing:";
        for (const auto& m : missing) os << " " << m;
        throw std::invalid_argument(os.str());
    }
    return fp;
}

Fingerprint to_pattern_frame(Fingerprint fp, PatternName pattern) {
    fp.frame = {false, "", pattern};
    return fp;
}

Fingerprint slice(const Fingerprint& full, const Embedding& emb, const Fleet& fleet) {
    if (!full.frame.is_device)
        throw std::invalid_argument("slice input must be a device-frame fingerprint");
    if (full.frame.device_id != emb.device_id)
        throw std::invalid_argument("embedding is for device " + emb.device_id +
                                    ", fingerprint for " + full.frame.device_id);
    const auto& device = fleet.device(emb.device_id);
    const PatternTopology pattern = pattern_topology(emb.pattern);
    if (!is_embedding(emb, pattern, device)) throw std::invalid_argument("invalid embedding");

    std::map<FeatureKey, long> device_index;
    for (std::size_t i = 0; i < full.layout.size(); ++i)
        device_index[full.layout[i]] = static_cast<long>(i);

    const auto& map = emb.vertex_map;
    auto translate = [&](const FeatureKey& key) {
        FeatureKey out = key;
        if (key.drive_kind == DriveKind::Single) {
            out.drive_a = map[key.drive_a];
        } else if (key.drive_kind == DriveKind::Pair) {
            auto c = make_coupling(map[key.drive_a], map[key.drive_b]);
            out.drive_a = c.first;
            out.drive_b = c.second;
        }
        if (key.target_b < 0) {
            out.target_a = map[key.target_a];
        } else {
            auto t = make_coupling(map[key.target_a], map[key.target_b]);
            out.target_a = t.first;
            out.target_b = t.second;
        }
        return out;
    };

    Fingerprint out;
    out.frame = {false, "", emb.pattern};
    out.batch_index = full.batch_index;
    out.layout = canonical_layout(pattern_as_device(pattern));
    out.features.resize(static_cast<long>(out.layout.size()));
    for (std::size_t i = 0; i < out.layout.size(); ++i) {
        auto it = device_index.find(translate(out.layout[i]));
        if (it == device_index.end())
            throw std::logic_error("device layout lacks feature " +
                                   to_string(translate(out.layout[i])));
        out.features(static_cast<long>(i)) = full.features(it->second);
    }
    return out;
}

double normalized_distance(const Fingerprint& f1, const Fingerprint& f2) {
    if (f1.layout != f2.layout)
        throw std::invalid_argument("fingerprint layouts differ; distance undefined");
    if (f1.layout.empty()) throw std::invalid_argument("empty fingerprints");
    return (f1.features - f2.features).norm() / static_cast<double>(f1.layout.size());
}

FingerprintDataset FingerprintDataset::filter_batches(std::span<const int> batches) const {
    FingerprintDataset out;
    out.pattern = pattern;
    out.classes = classes;
    out.layout = layout;
    std::vector<long> keep;
    for (long i = 0; i < samples.rows(); ++i)
        if (std::find(batches.begin(), batches.end(), batch_of[i]) != batches.end())
            keep.push_back(i);
    out.samples.resize(static_cast<long>(keep.size()), samples.cols());
    for (std::size_t i = 0; i < keep.size(); ++i) {
        out.samples.row(static_cast<long>(i)) = samples.row(keep[i]);
        out.labels.push_back(labels[keep[i]]);
        out.batch_of.push_back(batch_of[keep[i]]);
    }
    return out;
}

FingerprintDataset build_dataset(std::span<const Fingerprint> full_fingerprints,
                                 PatternName pattern, const Fleet& fleet) {
    FingerprintDataset ds;
    ds.pattern = pattern;
    ds.classes = enumerate_embeddings(pattern_topology(pattern), fleet);
    ds.layout = canonical_layout(pattern_as_device(pattern_topology(pattern)));

    std::vector<std::pair<int, Eigen::VectorXd>> rows;  // (label, features)
    std::vector<int> batches;
    for (int k = 0; k < static_cast<int>(ds.classes.size()); ++k) {
        const auto& emb = ds.classes[k];
        for (const auto& fp : full_fingerprints) {
            if (!fp.frame.is_device || fp.frame.device_id != emb.device_id) continue;
            Fingerprint sliced = slice(fp, emb, fleet);
            rows.emplace_back(k, sliced.features);
            batches.push_back(fp.batch_index);
        }
    }
    ds.samples.resize(static_cast<long>(rows.size()), static_cast<long>(ds.layout.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        ds.samples.row(static_cast<long>(i)) = rows[i].second;
        ds.labels.push_back(rows[i].first);
    }
    ds.batch_of = batches;
    return ds;
}

}  // namespace xtalkprint
