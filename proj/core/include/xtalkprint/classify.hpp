#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "xtalkprint/fingerprint.hpp"

namespace xtalkprint {

/// Per-feature training-set mean/std transform, std floored at 1e-12.
struct Standardizer {
    Eigen::VectorXd mean;
    Eigen::VectorXd stddev;

    Eigen::MatrixXd transform(const Eigen::MatrixXd& x) const;
    Eigen::VectorXd transform(const Eigen::VectorXd& x) const;
    Eigen::MatrixXd inverse(const Eigen::MatrixXd& z) const;
};

struct PcaModel {
    Eigen::MatrixXd components;              // retained m x n, orthonormal rows
    Eigen::VectorXd explained_variance_ratio;  // all n ratios, non-increasing

    long retained() const { return components.rows(); }
    Eigen::MatrixXd transform(const Eigen::MatrixXd& z) const { return z * components.transpose(); }
    Eigen::VectorXd transform(const Eigen::VectorXd& z) const { return components * z; }
};

/// Standardizer from training statistics plus PCA keeping the smallest
/// component count whose cumulative explained variance reaches the target.
std::pair<Standardizer, PcaModel> fit_preprocess(const FingerprintDataset& train,
                                                 double variance_target = 0.95);

struct MlpHyper {
    double learning_rate = 1e-3;  // ADAM defaults
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    double dropout = 0.2;
    int epochs_per_set = 100;
    int max_sets = 50;
    double loss_threshold = 0.05;
};

/// Dense sigmoid layer sized to the pre-PCA feature dimension, dropout
/// during training, dense linear output over the embedding classes.
struct MlpModel {
    Eigen::MatrixXd w1;  // m x u
    Eigen::VectorXd b1;
    Eigen::MatrixXd w2;  // u x K
    Eigen::VectorXd b2;
    std::vector<double> set_losses;  // clean training loss after each 100-epoch set
    int epochs_trained = 0;
    bool converged = false;
};

/// Full-batch ADAM on softmax cross-entropy, trained in 100-epoch sets
/// until the clean training loss drops below the threshold or the set cap
/// is reached. Deterministic given the seed.
MlpModel train_mlp(const FingerprintDataset& train, const Standardizer& standardizer,
                   const PcaModel& pca, const MlpHyper& hyper, std::uint64_t seed);

/// Loss and analytic gradients at the given parameters (no dropout); the
/// gradient order is w1, b1, w2, b2 flattened column-major.
double mlp_loss(const MlpModel& model, const Eigen::MatrixXd& x, const std::vector<int>& labels);
Eigen::VectorXd mlp_gradient(const MlpModel& model, const Eigen::MatrixXd& x,
                             const std::vector<int>& labels);
Eigen::VectorXd mlp_parameters(const MlpModel& model);
void set_mlp_parameters(MlpModel& model, const Eigen::VectorXd& params);

struct Prediction {
    int class_index = 0;
    Eigen::VectorXd scores;
};

/// Argmax of the linear outputs, ties broken toward the lowest class index.
Prediction predict(const MlpModel& model, const Standardizer& standardizer, const PcaModel& pca,
                   const Fingerprint& fp);

struct AccuracyReport {
    PatternName pattern = PatternName::P1;
    std::vector<int> train_batches;
    std::vector<int> test_batches;
    double device_accuracy = 0.0;
    double embedding_accuracy = 0.0;
    Eigen::MatrixXi confusion;  // true class x predicted class
    long num_test = 0;
};

AccuracyReport evaluate(const MlpModel& model, const Standardizer& standardizer,
                        const PcaModel& pca, const FingerprintDataset& test);

/// Scores an arbitrary prediction sequence against a labeled dataset.
AccuracyReport report_from_predictions(const FingerprintDataset& test,
                                       std::span<const int> predicted);

/// Per-class centroids in standardized space; same report shape as the MLP.
AccuracyReport nearest_centroid(const FingerprintDataset& train, const FingerprintDataset& test);

}  // namespace xtalkprint
