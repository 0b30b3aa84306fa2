#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "xtalkprint/noise.hpp"
#include "xtalkprint/sim.hpp"

namespace xtalkprint {

enum class RateSource {
    HamX = 0,
    HamY,
    HamZ,
    StoX,
    StoY,
    StoZ,
    AffX,
    AffY,
    AffZ,
    PairLambda,
};

std::string to_string(RateSource source);
RateSource rate_source_from_string(const std::string& s);

struct RateEstimate {
    double value = 0.0;
    double std_err = 0.0;
    RateSource source = RateSource::HamX;
    bool clamped = false;  // negative stochastic/pair estimate clamped to 0
};

struct SlopePoint {
    double s = 0.0;
    double value = 0.0;
    double weight = 1.0;  // 1/variance; uniform weights for analytic input
};

struct SlopeFit {
    double intercept = 0.0;
    double slope = 0.0;
    double slope_std_err = 0.0;
};

/// Weighted least-squares line through (s, value) points. slope_std_err is
/// propagated from the weights taken as inverse variances; zero when the
/// input is analytic (all weights equal and marked infinite-shot upstream).
SlopeFit fit_slope(std::span<const SlopePoint> points);

/// Per-drive lookup of spectator means and pair product means over the
/// (prep sign, prep axis, meas axis, idle length) schedule grid.
class MomentTable {
  public:
    MomentTable(const DeviceTopology& device, DriveSpec drive);

    void add(const IdtCircuitSpec& spec, const CircuitMoments& moments);

    struct Cell {
        double value = 0.0;
        double variance = 0.0;  // of the mean; 0 for analytic moments
        long shots = 0;
    };

    std::optional<Cell> qubit_cell(int qubit, int sign, Axis prep, Axis meas, int s) const;
    std::optional<Cell> pair_cell(Coupling pair, int sign, Axis prep, Axis meas, int s) const;

    const DeviceTopology& device() const { return *device_; }
    const DriveSpec& drive() const { return drive_; }
    const std::vector<int>& idle_lengths() const { return idle_lengths_; }
    const std::vector<int>& spectators() const { return spectators_; }
    std::vector<Coupling> spectator_pairs() const;
    bool analytic() const { return analytic_; }

  private:
    const DeviceTopology* device_;
    DriveSpec drive_;
    std::vector<int> spectators_;
    std::vector<int> idle_lengths_;
    bool analytic_ = false;
    // key: (qubit | pair packed, sign, prep, meas, s)
    std::map<std::tuple<int, int, int, int, int>, Cell> qubit_cells_;
    std::map<std::tuple<int, int, int, int, int, int>, Cell> pair_cells_;
};

/// First-order weight-1 estimators for one spectator under one drive.
/// Returns the nine rates in RateSource order HamX..AffZ. Affine slopes are
/// subtracted from the Hamiltonian cross-slopes and the summed pair-flip
/// contraction from the decay slopes, so each estimate targets its own rate.
std::vector<RateEstimate> estimate_weight1(const MomentTable& table, int spectator);

/// Covariance-slope estimator for the joint-flip rate of an adjacent
/// spectator pair: lambda = slope_s[ cov(w_i, w_j) ] / 4, clamped at zero.
RateEstimate estimate_weight2(const MomentTable& table, Coupling pair);

struct FeatureKey {
    DriveKind drive_kind = DriveKind::ControlSingle;
    int drive_a = -1;
    int drive_b = -1;
    int target_a = -1;
    int target_b = -1;  // -1: single-qubit target
    RateSource source = RateSource::HamX;

    friend auto operator<=>(const FeatureKey&, const FeatureKey&) = default;
};

std::string to_string(const FeatureKey& key);

/// Rate estimates for one (device, batch), in canonical feature order.
struct EstimateSet {
    std::vector<std::pair<FeatureKey, RateEstimate>> items;

    const RateEstimate* find(const FeatureKey& key) const;
};

/// Runs every weight-1 and weight-2 estimator over a full suite of moments
/// for one device and batch.
EstimateSet estimate_device(const DeviceTopology& device, std::span<const IdtCircuitSpec> specs,
                            std::span<const CircuitMoments> moments);

/// Composed per-step ground-truth rates in the same canonical order, for
/// comparing estimates against the model that generated them.
EstimateSet effective_truth(const DeviceTopology& device, const ErrorModel& model);

}  // namespace xtalkprint
