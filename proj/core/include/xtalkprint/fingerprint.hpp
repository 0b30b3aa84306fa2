#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "xtalkprint/estimate.hpp"
#include "xtalkprint/topology.hpp"

namespace xtalkprint {

/// A pattern used as the topology of an attacker-side probe suite; the
/// kind tag carries no meaning for pattern graphs.
DeviceTopology pattern_as_device(const PatternTopology& pattern);

struct FingerprintFrame {
    bool is_device = true;
    std::string device_id;                    // device frame
    PatternName pattern = PatternName::P1;    // pattern frame

    std::string label() const { return is_device ? device_id : to_string(pattern); }
    bool operator==(const FingerprintFrame&) const = default;
};

/// Ordered error-rate feature vector for one topology and batch.
struct Fingerprint {
    FingerprintFrame frame;
    int batch_index = 0;
    std::vector<FeatureKey> layout;
    Eigen::VectorXd features;

    std::uint64_t layout_hash() const;
};

/// Canonical feature order for a topology: drives in enumeration order
/// (singles by qubit, pairs by coupling, control single, control pair);
/// within a drive, spectators ascending with the nine weight-1 sources,
/// then adjacent spectator pairs with the joint-flip rate.
std::vector<FeatureKey> canonical_layout(const DeviceTopology& topology);

std::uint64_t layout_hash(std::span<const FeatureKey> layout);

/// Builds the fingerprint for one device and batch from a complete estimate
/// set; throws listing missing cells on coverage gaps.
Fingerprint assemble(const EstimateSet& estimates, const DeviceTopology& topology,
                     int batch_index);

/// Re-tags a fingerprint assembled over a pattern-as-device topology as a
/// pattern-frame fingerprint (the attacker-side probe view).
Fingerprint to_pattern_frame(Fingerprint fp, PatternName pattern);

/// Restriction of a full-device fingerprint to an embedded locality,
/// relabeled into pattern coordinates. Keeps exactly the features whose
/// drive element and target lie inside the embedded vertex set.
Fingerprint slice(const Fingerprint& full, const Embedding& emb, const Fleet& fleet);

/// L2 distance divided by the feature-space dimensionality.
double normalized_distance(const Fingerprint& f1, const Fingerprint& f2);

/// Labeled locality fingerprints for one pattern: one sample per
/// (embedding, batch), classes in enumerate_embeddings order.
struct FingerprintDataset {
    PatternName pattern = PatternName::P1;
    std::vector<Embedding> classes;
    std::vector<FeatureKey> layout;
    Eigen::MatrixXd samples;  // one row per sample
    std::vector<int> labels;
    std::vector<int> batch_of;

    int num_classes() const { return static_cast<int>(classes.size()); }
    long num_samples() const { return samples.rows(); }
    const std::string& device_of_class(int k) const { return classes.at(k).device_id; }

    FingerprintDataset filter_batches(std::span<const int> batches) const;
};

FingerprintDataset build_dataset(std::span<const Fingerprint> full_fingerprints,
                                 PatternName pattern, const Fleet& fleet);

}  // namespace xtalkprint
