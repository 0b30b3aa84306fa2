#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "xtalkprint/experiments.hpp"
#include "xtalkprint/topology.hpp"

namespace xtalkprint {

/// Per-step weight-1 error generators for one qubit, per unit (single-qubit
/// gate) step duration:
///   h: Hamiltonian rates; the step rotates the Bloch vector by angle 2|h|
///      about h.
///   s: stochastic Pauli X/Y/Z probabilities; axis w contracts by
///      d_w = 1 - 2(s_u + s_v) for the other two axes u, v.
///   a: affine Bloch shift added after rotation and contraction.
struct QubitRates {
    Eigen::Vector3d h = Eigen::Vector3d::Zero();
    Eigen::Vector3d s = Eigen::Vector3d::Zero();
    Eigen::Vector3d a = Eigen::Vector3d::Zero();

    QubitRates scaled(double f) const;
    QubitRates operator+(const QubitRates& o) const;
    /// Bloch contraction factors (d_x, d_y, d_z).
    Eigen::Vector3d contraction() const;
    bool is_zero() const;
};

/// Per-step probability of a correlated joint flip on an adjacent pair.
struct PairRate {
    Coupling pair{0, 0};
    double lambda = 0.0;
};

/// Rate-range defaults are calibrated so that the slope estimators recover
/// every composed rate within the acceptance tolerances at 2048 shots while
/// fingerprints of distinct localities stay well separated.
struct NoiseConfig {
    // ambient weight-1 ranges, per component and per unit step
    double h_min = 0.008, h_max = 0.014;  // magnitude, sign drawn at random
    double s_min = 0.0006, s_max = 0.0014;
    // affine magnitude as a fraction of the qubit's contraction budget
    // 2*min_w(s_u+s_v); keeps every composed per-step map a valid channel
    double a_frac_min = 0.05, a_frac_max = 0.35;
    double lambda_min = 0.0001, lambda_max = 0.0004;
    // crosstalk increments: same ranges scaled by crosstalk_scale * gamma^d
    // at graph distance d >= 1 from the drive element
    double crosstalk_scale = 1.0;
    double gamma = 0.4;
    // two-qubit drive step duration in units of the single-qubit step
    double duration_ratio = 1.3;

    void validate() const;  // throws std::invalid_argument on bad ranges
};

struct DriftConfig {
    double sigma_drift = 0.05;  // lognormal per-rate jitter, unit mean
    double p_cal = 0.1;         // per-(device, batch) calibration-event rate
    double sigma_cal = 0.15;    // extra lognormal scale on calibration events
};

/// Ground-truth error model for one device. Crosstalk increments are keyed
/// by (drive element, target); control drives carry no crosstalk.
struct ErrorModel {
    struct CrosstalkBlock {
        DriveSpec drive;
        std::vector<QubitRates> per_spectator;  // indexed by qubit, zero for driven qubits
        std::vector<PairRate> per_pair;         // spectator-adjacent couplings under this drive
    };

    std::string device_id;
    double duration_ratio = 1.5;
    std::vector<QubitRates> ambient;     // per qubit
    std::vector<PairRate> pair_ambient;  // per coupling
    std::vector<CrosstalkBlock> crosstalk;

    const CrosstalkBlock* find_block(const DriveSpec& drive) const;
};

/// Error model with per-batch multiplicative jitter applied. Batch 0 with
/// drift disabled equals the base model.
struct BatchParams {
    std::string device_id;
    int batch_index = 0;
    ErrorModel effective;
};

std::vector<ErrorModel> generate_fleet_model(const Fleet& fleet, const NoiseConfig& config,
                                             std::uint64_t seed);

BatchParams batch_params(const ErrorModel& model, int batch_index, const DriftConfig& drift,
                         std::uint64_t seed);

/// Composed per-step rates for a spectator under a drive: duration-scaled
/// ambient plus crosstalk increment, with the affine vector projected back
/// into the channel-validity budget if jitter pushed it out.
QubitRates effective_rates(const ErrorModel& model, const DriveSpec& drive, int qubit);

/// Composed per-step joint-flip probability for an adjacent spectator pair.
double effective_lambda(const ErrorModel& model, const DriveSpec& drive, Coupling pair);

/// Sum of effective pair rates over couplings touching `qubit` whose other
/// endpoint is also a spectator; the extra marginal contraction every
/// weight-1 estimator sees.
double effective_lambda_sum(const ErrorModel& model, const DriveSpec& drive, int qubit,
                            const DeviceTopology& device);

}  // namespace xtalkprint
