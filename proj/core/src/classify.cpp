#include "xtalkprint/classify.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "xtalkprint/rng.hpp"

namespace xtalkprint {

namespace {
constexpr double kStdFloor = 1e-12;
}

Eigen::MatrixXd Standardizer::transform(const Eigen::MatrixXd& x) const {
    return (x.rowwise() - mean.transpose()).array().rowwise() / stddev.transpose().array();
}

Eigen::VectorXd Standardizer::transform(const Eigen::VectorXd& x) const {
    return (x - mean).cwiseQuotient(stddev);
}

Eigen::MatrixXd Standardizer::inverse(const Eigen::MatrixXd& z) const {
    return (z.array().rowwise() * stddev.transpose().array()).rowwise() + mean.transpose().array();
}

std::pair<Standardizer, PcaModel> fit_preprocess(const FingerprintDataset& train,
                                                 double variance_target) {
    const auto& x = train.samples;
    const long n = x.rows();
    const long dim = x.cols();
    if (n < 2) throw std::invalid_argument("fit_preprocess needs at least 2 samples");

    Standardizer std_;
    std_.mean = x.colwise().mean();
    Eigen::MatrixXd centered = x.rowwise() - std_.mean.transpose();
    Eigen::VectorXd var = centered.array().square().colwise().mean();
    std_.stddev = var.array().sqrt().max(kStdFloor);
    if ((var.array() <= kStdFloor * kStdFloor).all())
        throw std::invalid_argument("fit_preprocess: all features are constant");

    Eigen::MatrixXd z = std_.transform(x);
    Eigen::MatrixXd cov = z.transpose() * z / static_cast<double>(n - 1);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("fit_preprocess: eigendecomposition failed");

    // ascending eigenvalues; reverse to non-increasing
    Eigen::VectorXd evals = solver.eigenvalues().reverse();
    Eigen::MatrixXd evecs = solver.eigenvectors().rowwise().reverse();
    evals = evals.cwiseMax(0.0);
    const double total = evals.sum();
    if (total <= 0.0) throw std::invalid_argument("fit_preprocess: degenerate data");

    PcaModel pca;
    pca.explained_variance_ratio = evals / total;
    long m = 0;
    double cum = 0.0;
    while (m < dim && cum < variance_target) {
        cum += pca.explained_variance_ratio(m);
        ++m;
    }
    if (m == 0) m = 1;
    pca.components = evecs.leftCols(m).transpose();
    return {std_, pca};
}

namespace {

Eigen::MatrixXd sigmoid(const Eigen::MatrixXd& z) {
    return 1.0 / (1.0 + (-z.array()).exp());
}

Eigen::MatrixXd softmax_rows(const Eigen::MatrixXd& logits) {
    Eigen::MatrixXd p = logits;
    for (long i = 0; i < p.rows(); ++i) {
        const double m = p.row(i).maxCoeff();
        p.row(i) = (p.row(i).array() - m).exp();
        p.row(i) /= p.row(i).sum();
    }
    return p;
}

double cross_entropy(const Eigen::MatrixXd& probs, const std::vector<int>& labels) {
    double loss = 0.0;
    for (long i = 0; i < probs.rows(); ++i)
        loss -= std::log(std::max(probs(i, labels[i]), 1e-300));
    return loss / static_cast<double>(probs.rows());
}

struct Grads {
    Eigen::MatrixXd w1, w2;
    Eigen::VectorXd b1, b2;
};

/// Forward/backward for one full batch; mask holds the per-sample,
/// per-unit inverted dropout scaling (empty when dropout is off).
std::pair<double, Grads> loss_and_grads(const MlpModel& model, const Eigen::MatrixXd& x,
                                        const std::vector<int>& labels,
                                        const Eigen::MatrixXd& mask) {
    const long n = x.rows();
    Eigen::MatrixXd a1 = sigmoid((x * model.w1).rowwise() + model.b1.transpose());
    Eigen::MatrixXd a1d = mask.size() > 0 ? a1.cwiseProduct(mask) : a1;
    Eigen::MatrixXd logits = (a1d * model.w2).rowwise() + model.b2.transpose();
    Eigen::MatrixXd probs = softmax_rows(logits);
    const double loss = cross_entropy(probs, labels);

    Eigen::MatrixXd dlogits = probs;
    for (long i = 0; i < n; ++i) dlogits(i, labels[i]) -= 1.0;
    dlogits /= static_cast<double>(n);

    Grads g;
    g.w2 = a1d.transpose() * dlogits;
    g.b2 = dlogits.colwise().sum();
    Eigen::MatrixXd da1 = dlogits * model.w2.transpose();
    if (mask.size() > 0) da1 = da1.cwiseProduct(mask);
    Eigen::MatrixXd dz1 = da1.array() * a1.array() * (1.0 - a1.array());
    g.w1 = x.transpose() * dz1;
    g.b1 = dz1.colwise().sum();
    return {loss, g};
}

struct AdamState {
    Eigen::VectorXd m, v;
    long t = 0;
};

void adam_step(Eigen::VectorXd& params, const Eigen::VectorXd& grad, AdamState& state,
               const MlpHyper& hyper) {
    ++state.t;
    state.m = hyper.beta1 * state.m + (1.0 - hyper.beta1) * grad;
    state.v = hyper.beta2 * state.v + (1.0 - hyper.beta2) * grad.cwiseProduct(grad);
    const double bc1 = 1.0 - std::pow(hyper.beta1, static_cast<double>(state.t));
    const double bc2 = 1.0 - std::pow(hyper.beta2, static_cast<double>(state.t));
    params -= hyper.learning_rate *
              (state.m / bc1).cwiseQuotient(((state.v / bc2).cwiseSqrt().array() + hyper.epsilon)
                                                .matrix());
}

Eigen::VectorXd flatten(const Grads& g) {
    Eigen::VectorXd out(g.w1.size() + g.b1.size() + g.w2.size() + g.b2.size());
    long off = 0;
    out.segment(off, g.w1.size()) = Eigen::Map<const Eigen::VectorXd>(g.w1.data(), g.w1.size());
    off += g.w1.size();
    out.segment(off, g.b1.size()) = g.b1;
    off += g.b1.size();
    out.segment(off, g.w2.size()) = Eigen::Map<const Eigen::VectorXd>(g.w2.data(), g.w2.size());
    off += g.w2.size();
    out.segment(off, g.b2.size()) = g.b2;
    return out;
}

}  // namespace

Eigen::VectorXd mlp_parameters(const MlpModel& model) {
    Grads g{model.w1, model.w2, model.b1, model.b2};
    return flatten(g);
}

void set_mlp_parameters(MlpModel& model, const Eigen::VectorXd& params) {
    long off = 0;
    Eigen::Map<Eigen::VectorXd>(model.w1.data(), model.w1.size()) =
        params.segment(off, model.w1.size());
    off += model.w1.size();
    model.b1 = params.segment(off, model.b1.size());
    off += model.b1.size();
    Eigen::Map<Eigen::VectorXd>(model.w2.data(), model.w2.size()) =
        params.segment(off, model.w2.size());
    off += model.w2.size();
    model.b2 = params.segment(off, model.b2.size());
}

double mlp_loss(const MlpModel& model, const Eigen::MatrixXd& x, const std::vector<int>& labels) {
    return loss_and_grads(model, x, labels, Eigen::MatrixXd()).first;
}

Eigen::VectorXd mlp_gradient(const MlpModel& model, const Eigen::MatrixXd& x,
                             const std::vector<int>& labels) {
    return flatten(loss_and_grads(model, x, labels, Eigen::MatrixXd()).second);
}

MlpModel train_mlp(const FingerprintDataset& train, const Standardizer& standardizer,
                   const PcaModel& pca, const MlpHyper& hyper, std::uint64_t seed) {
    if (train.num_samples() < 1) throw std::invalid_argument("train_mlp: empty training set");
    const Eigen::MatrixXd x = pca.transform(standardizer.transform(train.samples));
    const long m = x.cols();
    const long u = static_cast<long>(train.layout.size());  // pre-PCA dimension
    const long k = train.num_classes();

    Rng rng(seed);
    MlpModel model;
    auto glorot = [&](long rows, long cols) {
        const double bound = std::sqrt(6.0 / static_cast<double>(rows + cols));
        Eigen::MatrixXd w(rows, cols);
        for (long j = 0; j < cols; ++j)
            for (long i = 0; i < rows; ++i) w(i, j) = rng.uniform(-bound, bound);
        return w;
    };
    model.w1 = glorot(m, u);
    model.b1 = Eigen::VectorXd::Zero(u);
    model.w2 = glorot(u, k);
    model.b2 = Eigen::VectorXd::Zero(k);

    Eigen::VectorXd params = mlp_parameters(model);
    AdamState adam{Eigen::VectorXd::Zero(params.size()), Eigen::VectorXd::Zero(params.size()), 0};

    const double keep = 1.0 - hyper.dropout;
    const long n = x.rows();
    Eigen::MatrixXd mask;
    for (int set = 0; set < hyper.max_sets; ++set) {
        for (int epoch = 0; epoch < hyper.epochs_per_set; ++epoch) {
            if (hyper.dropout > 0.0) {
                mask.resize(n, u);
                for (long i = 0; i < n; ++i)
                    for (long j = 0; j < u; ++j)
                        mask(i, j) = rng.bernoulli(keep) ? 1.0 / keep : 0.0;
            }
            auto [loss, grads] = loss_and_grads(model, x, train.labels, mask);
            if (!std::isfinite(loss))
                throw std::runtime_error("train_mlp: non-finite loss at epoch " +
                                         std::to_string(model.epochs_trained));
            adam_step(params, flatten(grads), adam, hyper);
            set_mlp_parameters(model, params);
            ++model.epochs_trained;
        }
        const double clean = mlp_loss(model, x, train.labels);
        model.set_losses.push_back(clean);
        if (clean < hyper.loss_threshold) {
            model.converged = true;
            break;
        }
    }
    return model;
}

Prediction predict(const MlpModel& model, const Standardizer& standardizer, const PcaModel& pca,
                   const Fingerprint& fp) {
    if (fp.features.size() != standardizer.mean.size())
        throw std::invalid_argument("fingerprint dimension does not match the trained layout");
    Eigen::VectorXd z = pca.transform(standardizer.transform(fp.features));
    Eigen::VectorXd a1 = 1.0 / (1.0 + (-(model.w1.transpose() * z + model.b1)).array().exp());
    Eigen::VectorXd scores = model.w2.transpose() * a1 + model.b2;
    Prediction pred;
    pred.scores = scores;
    pred.class_index = 0;
    for (long i = 1; i < scores.size(); ++i)
        if (scores(i) > scores(pred.class_index)) pred.class_index = static_cast<int>(i);
    return pred;
}

AccuracyReport report_from_predictions(const FingerprintDataset& test,
                                       std::span<const int> predicted) {
    if (predicted.size() != static_cast<std::size_t>(test.num_samples()))
        throw std::invalid_argument("prediction count does not match the test set");
    AccuracyReport report;
    report.pattern = test.pattern;
    report.num_test = test.num_samples();
    report.confusion = Eigen::MatrixXi::Zero(test.num_classes(), test.num_classes());
    long dev_ok = 0, emb_ok = 0;
    for (long i = 0; i < test.num_samples(); ++i) {
        const int truth = test.labels[i];
        const int pred = predicted[i];
        report.confusion(truth, pred) += 1;
        if (pred == truth) ++emb_ok;
        if (test.device_of_class(pred) == test.device_of_class(truth)) ++dev_ok;
    }
    report.device_accuracy = static_cast<double>(dev_ok) / static_cast<double>(test.num_samples());
    report.embedding_accuracy =
        static_cast<double>(emb_ok) / static_cast<double>(test.num_samples());
    std::set<int> train_b(test.batch_of.begin(), test.batch_of.end());
    report.test_batches.assign(train_b.begin(), train_b.end());
    return report;
}

AccuracyReport evaluate(const MlpModel& model, const Standardizer& standardizer,
                        const PcaModel& pca, const FingerprintDataset& test) {
    if (test.num_samples() == 0) throw std::invalid_argument("evaluate: empty test set");
    std::vector<int> predicted;
    predicted.reserve(test.num_samples());
    const Eigen::MatrixXd z = pca.transform(standardizer.transform(test.samples));
    for (long i = 0; i < test.num_samples(); ++i) {
        Eigen::VectorXd a1 =
            1.0 / (1.0 + (-(model.w1.transpose() * z.row(i).transpose() + model.b1)).array().exp());
        Eigen::VectorXd scores = model.w2.transpose() * a1 + model.b2;
        int best = 0;
        for (long j = 1; j < scores.size(); ++j)
            if (scores(j) > scores(best)) best = static_cast<int>(j);
        predicted.push_back(best);
    }
    return report_from_predictions(test, predicted);
}

AccuracyReport nearest_centroid(const FingerprintDataset& train, const FingerprintDataset& test) {
    if (train.num_samples() == 0 || test.num_samples() == 0)
        throw std::invalid_argument("nearest_centroid: empty dataset");

    Standardizer std_;
    std_.mean = train.samples.colwise().mean();
    Eigen::MatrixXd centered = train.samples.rowwise() - std_.mean.transpose();
    std_.stddev = centered.array().square().colwise().mean().sqrt().max(kStdFloor);

    const long k = train.num_classes();
    Eigen::MatrixXd centroids = Eigen::MatrixXd::Zero(k, train.samples.cols());
    std::vector<long> counts(k, 0);
    Eigen::MatrixXd z = std_.transform(train.samples);
    for (long i = 0; i < train.num_samples(); ++i) {
        centroids.row(train.labels[i]) += z.row(i);
        ++counts[train.labels[i]];
    }
    for (long c = 0; c < k; ++c) {
        if (counts[c] == 0)
            throw std::invalid_argument("nearest_centroid: class " + std::to_string(c) +
                                        " has no training samples");
        centroids.row(c) /= static_cast<double>(counts[c]);
    }

    std::vector<int> predicted;
    Eigen::MatrixXd zt = std_.transform(test.samples);
    for (long i = 0; i < test.num_samples(); ++i) {
        int best = 0;
        double best_d = (zt.row(i) - centroids.row(0)).squaredNorm();
        for (long c = 1; c < k; ++c) {
            const double d = (zt.row(i) - centroids.row(c)).squaredNorm();
            if (d < best_d) {
                best_d = d;
                best = static_cast<int>(c);
            }
        }
        predicted.push_back(best);
    }
    return report_from_predictions(test, predicted);
}

}  // namespace xtalkprint
