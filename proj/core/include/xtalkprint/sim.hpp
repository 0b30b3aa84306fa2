#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "xtalkprint/experiments.hpp"
#include "xtalkprint/noise.hpp"

namespace xtalkprint {

/// One per-step application of the weight-1 error channel:
///   r <- R(2h) * diag(d_x, d_y, d_z) * r + a
Eigen::Vector3d step_bloch(const QubitRates& rates, const Eigen::Vector3d& r);

/// Exact meas-axis Bloch component of a spectator after `idle_length` steps
/// under the composed (ambient + crosstalk, duration-scaled) rates. Pair
/// events are not included here; they contract the sampled marginals on top
/// of this value.
double expectation(const BatchParams& params, int qubit, SignedAxis prep, Axis meas,
                   const DriveSpec& drive, int idle_length);

/// Sampled outcomes of one circuit: bitstring position k is spectator k
/// (ascending qubit order), '1' meaning the -1 eigenvalue.
struct CountRecord {
    std::string circuit_id;
    long shots = 0;
    std::map<std::string, long> counts;
};

/// Exact per-spectator means and adjacent-pair product means for one
/// circuit. shots == 0 marks analytic (infinite-shot) moments.
struct CircuitMoments {
    std::vector<int> spectators;
    std::vector<Coupling> pairs;        // spectator-adjacent couplings
    std::vector<double> mean;           // <w_i>, aligned with spectators
    std::vector<double> pair_mean;      // <w_i w_j>, aligned with pairs
    long shots = 0;

    double mean_of(int qubit) const;
    double pair_mean_of(Coupling pair) const;
};

CircuitMoments analytic_moments(const BatchParams& params, const IdtCircuitSpec& spec);

/// Draws `shots` joint spectator outcomes from the exact model
/// distribution: independent per-qubit outcomes with mean `expectation`,
/// each adjacent pair sharing a joint-flip parity with mean (1-2*lambda)^s.
CountRecord simulate_counts(const BatchParams& params, const IdtCircuitSpec& spec, long shots,
                            std::uint64_t seed);

CircuitMoments moments_from_counts(const DeviceTopology& device, const IdtCircuitSpec& spec,
                                   const CountRecord& record);

}  // namespace xtalkprint
