#include "xtalkprint/sim.hpp"

#include <Eigen/Geometry>
#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "xtalkprint/rng.hpp"

namespace xtalkprint {

Eigen::Vector3d step_bloch(const QubitRates& rates, const Eigen::Vector3d& r) {
    Eigen::Vector3d v = rates.contraction().cwiseProduct(r);
    const double angle = 2.0 * rates.h.norm();
    if (angle > 0.0)
        v = Eigen::AngleAxisd(angle, rates.h.normalized()).toRotationMatrix() * v;
    return v + rates.a;
}

namespace {

Eigen::Vector3d axis_vector(Axis a) {
    Eigen::Vector3d v = Eigen::Vector3d::Zero();
    v(static_cast<int>(a)) = 1.0;
    return v;
}

double iterate_component(const QubitRates& rates, SignedAxis prep, Axis meas, int steps) {
    Eigen::Vector3d r = axis_vector(prep.axis) * static_cast<double>(prep.sign);
    for (int i = 0; i < steps; ++i) r = step_bloch(rates, r);
    return r(static_cast<int>(meas));
}

std::vector<Coupling> spectator_couplings(const ErrorModel& model, const DriveSpec& drive) {
    std::vector<Coupling> pairs;
    for (const auto& p : model.pair_ambient)
        if (!drive.drives(p.pair.first) && !drive.drives(p.pair.second)) pairs.push_back(p.pair);
    return pairs;
}

}  // namespace

double expectation(const BatchParams& params, int qubit, SignedAxis prep, Axis meas,
                   const DriveSpec& drive, int idle_length) {
    if (idle_length < 0) throw std::invalid_argument("idle length must be >= 0");
    if (drive.drives(qubit))
        throw std::invalid_argument("qubit " + std::to_string(qubit) +
                                    " is driven, not a spectator");
    const QubitRates rates = effective_rates(params.effective, drive, qubit);
    return iterate_component(rates, prep, meas, idle_length);
}

double CircuitMoments::mean_of(int qubit) const {
    for (std::size_t i = 0; i < spectators.size(); ++i)
        if (spectators[i] == qubit) return mean[i];
    throw std::invalid_argument("no moment for qubit " + std::to_string(qubit));
}

double CircuitMoments::pair_mean_of(Coupling pair) const {
    for (std::size_t i = 0; i < pairs.size(); ++i)
        if (pairs[i] == pair) return pair_mean[i];
    throw std::invalid_argument("no moment for that pair");
}

CircuitMoments analytic_moments(const BatchParams& params, const IdtCircuitSpec& spec) {
    if (spec.device_id != params.device_id)
        throw std::invalid_argument("circuit/device mismatch: " + spec.circuit_id);
    const auto& model = params.effective;
    CircuitMoments m;
    m.spectators = spec.spectators;
    m.pairs = spectator_couplings(model, spec.drive);
    m.shots = 0;

    const int s = spec.idle_length;
    std::vector<double> own(spec.spectators.size());
    std::vector<double> pair_decay(m.pairs.size());
    for (std::size_t i = 0; i < spec.spectators.size(); ++i) {
        const int q = spec.spectators[i];
        own[i] = expectation(params, q, spec.prep[i], spec.meas[i], spec.drive, s);
    }
    for (std::size_t p = 0; p < m.pairs.size(); ++p) {
        const double lambda = effective_lambda(model, spec.drive, m.pairs[p]);
        pair_decay[p] = std::pow(1.0 - 2.0 * lambda, s);
    }

    auto pair_product_excluding = [&](int qubit, std::size_t excluded) {
        double prod = 1.0;
        for (std::size_t p = 0; p < m.pairs.size(); ++p) {
            if (p == excluded) continue;
            if (m.pairs[p].first == qubit || m.pairs[p].second == qubit) prod *= pair_decay[p];
        }
        return prod;
    };

    m.mean.resize(own.size());
    for (std::size_t i = 0; i < own.size(); ++i)
        m.mean[i] = own[i] * pair_product_excluding(spec.spectators[i], m.pairs.size());
    m.pair_mean.resize(m.pairs.size());
    for (std::size_t p = 0; p < m.pairs.size(); ++p) {
        const int qi = m.pairs[p].first;
        const int qj = m.pairs[p].second;
        const double own_i = own[spec.spectator_pos(qi)];
        const double own_j = own[spec.spectator_pos(qj)];
        // the shared parity squares away; all other pairs touching either
        // endpoint still contract the product
        m.pair_mean[p] =
            own_i * own_j * pair_product_excluding(qi, p) * pair_product_excluding(qj, p);
    }
    return m;
}

CountRecord simulate_counts(const BatchParams& params, const IdtCircuitSpec& spec, long shots,
                            std::uint64_t seed) {
    if (shots < 1) throw std::invalid_argument("shots must be >= 1");
    if (spec.device_id != params.device_id)
        throw std::invalid_argument("circuit/device mismatch: " + spec.circuit_id);
    const auto& model = params.effective;
    const auto pairs = spectator_couplings(model, spec.drive);
    const std::size_t n = spec.spectators.size();
    const int s = spec.idle_length;

    std::vector<double> p_plus(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double e =
            expectation(params, spec.spectators[i], spec.prep[i], spec.meas[i], spec.drive, s);
        p_plus[i] = 0.5 * (1.0 + e);
    }
    std::vector<double> p_even(pairs.size());
    for (std::size_t p = 0; p < pairs.size(); ++p) {
        const double mu = std::pow(1.0 - 2.0 * effective_lambda(model, spec.drive, pairs[p]), s);
        p_even[p] = 0.5 * (1.0 + mu);
    }
    // pair index -> spectator positions it couples
    std::vector<std::pair<std::size_t, std::size_t>> pair_pos(pairs.size());
    for (std::size_t p = 0; p < pairs.size(); ++p)
        pair_pos[p] = {static_cast<std::size_t>(spec.spectator_pos(pairs[p].first)),
                       static_cast<std::size_t>(spec.spectator_pos(pairs[p].second))};

    Rng rng(seed);
    CountRecord record;
    record.circuit_id = spec.circuit_id;
    record.shots = shots;
    std::string bits(n, '0');
    std::vector<int> w(n);
    for (long shot = 0; shot < shots; ++shot) {
        for (std::size_t i = 0; i < n; ++i) w[i] = rng.bernoulli(p_plus[i]) ? 1 : -1;
        for (std::size_t p = 0; p < pairs.size(); ++p)
            if (!rng.bernoulli(p_even[p])) {
                w[pair_pos[p].first] = -w[pair_pos[p].first];
                w[pair_pos[p].second] = -w[pair_pos[p].second];
            }
        for (std::size_t i = 0; i < n; ++i) bits[i] = w[i] > 0 ? '0' : '1';
        ++record.counts[bits];
    }
    return record;
}

CircuitMoments moments_from_counts(const DeviceTopology& device, const IdtCircuitSpec& spec,
                                   const CountRecord& record) {
    if (record.circuit_id != spec.circuit_id)
        throw std::invalid_argument("count record does not match circuit " + spec.circuit_id);
    const std::size_t n = spec.spectators.size();
    CircuitMoments m;
    m.spectators = spec.spectators;
    m.pairs = spec.spectator_pairs(device);
    m.shots = record.shots;
    m.mean.assign(n, 0.0);
    m.pair_mean.assign(m.pairs.size(), 0.0);

    std::vector<std::pair<std::size_t, std::size_t>> pair_pos(m.pairs.size());
    for (std::size_t p = 0; p < m.pairs.size(); ++p)
        pair_pos[p] = {static_cast<std::size_t>(spec.spectator_pos(m.pairs[p].first)),
                       static_cast<std::size_t>(spec.spectator_pos(m.pairs[p].second))};

    long total = 0;
    for (const auto& [bits, count] : record.counts) {
        if (bits.size() != n)
            throw std::invalid_argument("bitstring length mismatch in " + record.circuit_id);
        total += count;
        for (std::size_t i = 0; i < n; ++i) {
            const double wi = bits[i] == '0' ? 1.0 : -1.0;
            m.mean[i] += wi * count;
        }
        for (std::size_t p = 0; p < m.pairs.size(); ++p) {
            const double wi = bits[pair_pos[p].first] == '0' ? 1.0 : -1.0;
            const double wj = bits[pair_pos[p].second] == '0' ? 1.0 : -1.0;
            m.pair_mean[p] += wi * wj * count;
        }
    }
    if (total != record.shots)
        throw std::invalid_argument("counts do not sum to shots in " + record.circuit_id);
    for (auto& v : m.mean) v /= static_cast<double>(total);
    for (auto& v : m.pair_mean) v /= static_cast<double>(total);
    return m;
}

}  // namespace xtalkprint
