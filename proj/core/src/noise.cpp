#include "xtalkprint/noise.hpp"

#include <cmath>
#include <stdexcept>

#include "xtalkprint/rng.hpp"

namespace xtalkprint {

QubitRates QubitRates::scaled(double f) const {
    QubitRates r;
    r.h = h * f;
    r.s = s * f;
    r.a = a * f;
    return r;
}

QubitRates QubitRates::operator+(const QubitRates& o) const {
    QubitRates r;
    r.h = h + o.h;
    r.s = s + o.s;
    r.a = a + o.a;
    return r;
}

Eigen::Vector3d QubitRates::contraction() const {
    return {1.0 - 2.0 * (s.y() + s.z()), 1.0 - 2.0 * (s.x() + s.z()), 1.0 - 2.0 * (s.x() + s.y())};
}

bool QubitRates::is_zero() const { return h.isZero() && s.isZero() && a.isZero(); }

void NoiseConfig::validate() const {
    auto range_ok = [](double lo, double hi) { return lo >= 0.0 && hi >= lo; };
    if (!range_ok(h_min, h_max) || !range_ok(s_min, s_max) || !range_ok(lambda_min, lambda_max) ||
        !range_ok(a_frac_min, a_frac_max))
        throw std::invalid_argument("noise config: ranges must satisfy 0 <= lo <= hi");
    if (s_max > 0.25) throw std::invalid_argument("noise config: stochastic rate above 0.25");
    if (3.0 * s_max * std::max(duration_ratio, 1.0) * (1.0 + crosstalk_scale * gamma) > 0.5)
        throw std::invalid_argument("noise config: composed stochastic rates can exceed 0.5");
    if (lambda_max > 0.1) throw std::invalid_argument("noise config: pair rate above 0.1");
    if (a_frac_max > 0.5)
        throw std::invalid_argument("noise config: affine fraction above channel-validity budget");
    if (gamma < 0.0 || gamma >= 1.0)
        throw std::invalid_argument("noise config: gamma must be in [0, 1)");
    if (duration_ratio < 1.0)
        throw std::invalid_argument("noise config: duration ratio must be >= 1");
    if (crosstalk_scale < 0.0) throw std::invalid_argument("noise config: negative crosstalk scale");
}

const ErrorModel::CrosstalkBlock* ErrorModel::find_block(const DriveSpec& drive) const {
    for (const auto& block : crosstalk)
        if (block.drive == drive) return &block;
    return nullptr;
}

namespace {

QubitRates draw_rates(Rng& rng, const NoiseConfig& cfg, double scale) {
    QubitRates r;
    for (int i = 0; i < 3; ++i) r.h(i) = rng.sign() * rng.uniform(cfg.h_min, cfg.h_max) * scale;
    for (int i = 0; i < 3; ++i) r.s(i) = rng.uniform(cfg.s_min, cfg.s_max) * scale;
    // affine magnitude tied to the drawn stochastic contraction so the
    // per-step map keeps the Bloch ball invariant with drift headroom
    const double budget =
        2.0 * std::min({r.s.x() + r.s.y(), r.s.x() + r.s.z(), r.s.y() + r.s.z()});
    const double mag = rng.uniform(cfg.a_frac_min, cfg.a_frac_max) * budget;
    Eigen::Vector3d dir;
    for (int i = 0; i < 3; ++i) dir(i) = rng.normal01();
    double norm = dir.norm();
    if (norm > 0.0) r.a = dir / norm * mag;
    return r;
}

int drive_distance(const DeviceTopology& device, const DriveSpec& drive, int qubit) {
    auto da = device.distances_from(drive.a);
    if (drive.kind == DriveKind::Single) return da[qubit];
    auto db = device.distances_from(drive.b);
    return std::min(da[qubit], db[qubit]);
}

}  // namespace

std::vector<ErrorModel> generate_fleet_model(const Fleet& fleet, const NoiseConfig& config,
                                             std::uint64_t seed) {
    config.validate();
    std::vector<ErrorModel> models;
    models.reserve(fleet.devices.size());
    for (const auto& device : fleet.devices) {
        Rng rng(derive_seed(fleet.fleet_seed, "model", device.device_id, seed));
        ErrorModel model;
        model.device_id = device.device_id;
        model.duration_ratio = config.duration_ratio;
        for (int q = 0; q < device.num_qubits; ++q)
            model.ambient.push_back(draw_rates(rng, config, 1.0));
        for (auto c : device.couplings)
            model.pair_ambient.push_back({c, rng.uniform(config.lambda_min, config.lambda_max)});
        for (const DriveSpec& drive : enumerate_drives(device)) {
            if (drive.is_control()) continue;
            ErrorModel::CrosstalkBlock block;
            block.drive = drive;
            block.per_spectator.assign(device.num_qubits, QubitRates{});
            for (int q : spectators_of(device, drive)) {
                const int d = drive_distance(device, drive, q);
                const double scale = config.crosstalk_scale * std::pow(config.gamma, d);
                block.per_spectator[q] = draw_rates(rng, config, scale);
            }
            for (auto pr : device.couplings) {
                if (drive.drives(pr.first) || drive.drives(pr.second)) continue;
                const int d = std::min(drive_distance(device, drive, pr.first),
                                       drive_distance(device, drive, pr.second));
                const double scale = config.crosstalk_scale * std::pow(config.gamma, d);
                block.per_pair.push_back(
                    {pr, rng.uniform(config.lambda_min, config.lambda_max) * scale});
            }
            model.crosstalk.push_back(std::move(block));
        }
        models.push_back(std::move(model));
    }
    return models;
}

namespace {

double jitter(Rng& rng, const DriftConfig& drift, bool cal_event) {
    double m = rng.lognormal_unit_mean(drift.sigma_drift);
    if (cal_event) m *= rng.lognormal_unit_mean(drift.sigma_cal);
    return m;
}

void jitter_rates(QubitRates& r, Rng& rng, const DriftConfig& drift, bool cal) {
    for (int i = 0; i < 3; ++i) r.h(i) *= jitter(rng, drift, cal);
    for (int i = 0; i < 3; ++i) r.s(i) *= jitter(rng, drift, cal);
    for (int i = 0; i < 3; ++i) r.a(i) *= jitter(rng, drift, cal);
}

}  // namespace

BatchParams batch_params(const ErrorModel& model, int batch_index, const DriftConfig& drift,
                         std::uint64_t seed) {
    if (batch_index < 0) throw std::invalid_argument("batch index must be >= 0");
    BatchParams params;
    params.device_id = model.device_id;
    params.batch_index = batch_index;
    params.effective = model;

    Rng rng(derive_seed(seed, "drift", model.device_id, batch_index));
    const bool cal = rng.bernoulli(drift.p_cal);
    // fixed walk order over rate slots; serialization uses the same order
    for (auto& q : params.effective.ambient) jitter_rates(q, rng, drift, cal);
    for (auto& p : params.effective.pair_ambient) p.lambda *= jitter(rng, drift, cal);
    for (auto& block : params.effective.crosstalk) {
        for (auto& q : block.per_spectator) jitter_rates(q, rng, drift, cal);
        for (auto& p : block.per_pair) p.lambda *= jitter(rng, drift, cal);
    }
    return params;
}

QubitRates effective_rates(const ErrorModel& model, const DriveSpec& drive, int qubit) {
    QubitRates rates = model.ambient.at(qubit);
    if (const auto* block = model.find_block(drive)) rates = rates + block->per_spectator.at(qubit);
    const double dur = drive.two_qubit_duration() ? model.duration_ratio : 1.0;
    rates = rates.scaled(dur);
    // validity projection: ||R D r + a|| <= max(d) + ||a|| must stay <= 1
    const double budget = 1.0 - rates.contraction().maxCoeff();
    const double norm = rates.a.norm();
    if (norm > 0.98 * budget && norm > 0.0) rates.a *= 0.98 * budget / norm;
    return rates;
}

double effective_lambda(const ErrorModel& model, const DriveSpec& drive, Coupling pair) {
    double lambda = 0.0;
    bool found = false;
    for (const auto& p : model.pair_ambient)
        if (p.pair == pair) {
            lambda = p.lambda;
            found = true;
        }
    if (!found) throw std::invalid_argument("pair is not a device coupling");
    if (const auto* block = model.find_block(drive))
        for (const auto& p : block->per_pair)
            if (p.pair == pair) lambda += p.lambda;
    const double dur = drive.two_qubit_duration() ? model.duration_ratio : 1.0;
    return lambda * dur;
}

double effective_lambda_sum(const ErrorModel& model, const DriveSpec& drive, int qubit,
                            const DeviceTopology& device) {
    double sum = 0.0;
    for (auto c : device.couplings) {
        if (c.first != qubit && c.second != qubit) continue;
        const int other = c.first == qubit ? c.second : c.first;
        if (drive.drives(other) || drive.drives(qubit)) continue;
        sum += effective_lambda(model, drive, c);
    }
    return sum;
}

}  // namespace xtalkprint
