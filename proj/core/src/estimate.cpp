#include "xtalkprint/estimate.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace xtalkprint {

std::string to_string(RateSource source) {
    switch (source) {
        case RateSource::HamX: return "ham_x";
        case RateSource::HamY: return "ham_y";
        case RateSource::HamZ: return "ham_z";
        case RateSource::StoX: return "sto_x";
        case RateSource::StoY: return "sto_y";
        case RateSource::StoZ: return "sto_z";
        case RateSource::AffX: return "aff_x";
        case RateSource::AffY: return "aff_y";
        case RateSource::AffZ: return "aff_z";
        case RateSource::PairLambda: return "pair_lambda";
    }
    throw std::logic_error("bad rate source");
}

RateSource rate_source_from_string(const std::string& s) {
    for (int i = 0; i <= static_cast<int>(RateSource::PairLambda); ++i)
        if (to_string(static_cast<RateSource>(i)) == s) return static_cast<RateSource>(i);
    throw std::invalid_argument("unknown rate source: " + s);
}

SlopeFit fit_slope(std::span<const SlopePoint> points) {
    if (points.size() < 2) throw std::invalid_argument("fit_slope needs at least 2 points");
    double sw = 0.0, sx = 0.0;
    for (const auto& p : points) {
        if (p.weight <= 0.0) throw std::invalid_argument("fit_slope weights must be positive");
        sw += p.weight;
        sx += p.weight * p.s;
    }
    const double xbar = sx / sw;
    double sxx = 0.0, sxy = 0.0, sy = 0.0;
    for (const auto& p : points) {
        sxx += p.weight * (p.s - xbar) * (p.s - xbar);
        sxy += p.weight * (p.s - xbar) * p.value;
        sy += p.weight * p.value;
    }
    if (sxx == 0.0) throw std::invalid_argument("fit_slope needs at least 2 distinct s values");
    SlopeFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = sy / sw - fit.slope * xbar;
    fit.slope_std_err = std::sqrt(1.0 / sxx);
    return fit;
}

MomentTable::MomentTable(const DeviceTopology& device, DriveSpec drive)
    : device_(&device), drive_(drive), spectators_(spectators_of(device, drive)) {}

void MomentTable::add(const IdtCircuitSpec& spec, const CircuitMoments& moments) {
    if (!(spec.drive == drive_))
        throw std::invalid_argument("circuit " + spec.circuit_id + " is for another drive");
    analytic_ = analytic_ || moments.shots == 0;
    if (std::find(idle_lengths_.begin(), idle_lengths_.end(), spec.idle_length) ==
        idle_lengths_.end()) {
        idle_lengths_.push_back(spec.idle_length);
        std::sort(idle_lengths_.begin(), idle_lengths_.end());
    }
    const long shots = moments.shots;
    for (std::size_t i = 0; i < spec.spectators.size(); ++i) {
        const int q = spec.spectators[i];
        const double m = moments.mean[i];
        Cell cell;
        cell.value = m;
        cell.shots = shots;
        cell.variance =
            shots == 0 ? 0.0 : (1.0 - m * m + 1.0 / static_cast<double>(shots)) / shots;
        qubit_cells_[{q, spec.prep[i].sign, static_cast<int>(spec.prep[i].axis),
                      static_cast<int>(spec.meas[i]), spec.idle_length}] = cell;
    }
    for (std::size_t p = 0; p < moments.pairs.size(); ++p) {
        const auto [qi, qj] = moments.pairs[p];
        const int i = spec.spectator_pos(qi);
        const int j = spec.spectator_pos(qj);
        if (!(spec.prep[i] == spec.prep[j]) || spec.meas[i] != spec.meas[j])
            continue;  // pair moments only usable when both ends share settings
        const double m = moments.pair_mean[p];
        Cell cell;
        cell.value = m;
        cell.shots = shots;
        cell.variance =
            shots == 0 ? 0.0 : (1.0 - m * m + 1.0 / static_cast<double>(shots)) / shots;
        pair_cells_[{qi, qj, spec.prep[i].sign, static_cast<int>(spec.prep[i].axis),
                     static_cast<int>(spec.meas[i]), spec.idle_length}] = cell;
    }
}

std::optional<MomentTable::Cell> MomentTable::qubit_cell(int qubit, int sign, Axis prep, Axis meas,
                                                         int s) const {
    auto it = qubit_cells_.find(
        {qubit, sign, static_cast<int>(prep), static_cast<int>(meas), s});
    if (it == qubit_cells_.end()) return std::nullopt;
    return it->second;
}

std::optional<MomentTable::Cell> MomentTable::pair_cell(Coupling pair, int sign, Axis prep,
                                                        Axis meas, int s) const {
    auto it = pair_cells_.find({pair.first, pair.second, sign, static_cast<int>(prep),
                                static_cast<int>(meas), s});
    if (it == pair_cells_.end()) return std::nullopt;
    return it->second;
}

std::vector<Coupling> MomentTable::spectator_pairs() const {
    std::vector<Coupling> pairs;
    for (auto c : device_->couplings)
        if (!drive_.drives(c.first) && !drive_.drives(c.second)) pairs.push_back(c);
    return pairs;
}

namespace {

struct Series {
    std::vector<SlopePoint> points;

    SlopeFit fit() const { return fit_slope(points); }
};

constexpr double kVarFloor = 1e-18;

void require(bool ok, std::vector<std::string>& missing, int sign, Axis prep, Axis meas, int s) {
    if (ok) return;
    std::ostringstream os;
    os << (sign > 0 ? '+' : '-') << axis_char(prep) << "->" << axis_char(meas) << " s=" << s;
    missing.push_back(os.str());
}

[[noreturn]] void throw_missing(const std::string& what, const std::vector<std::string>& missing) {
    std::ostringstream os;
    os << what << ": missing schedule cells:";
    for (const auto& m : missing) os << " [" << m << "]";
    throw std::invalid_argument(os.str());
}

/// Builds the (value vs idle length) series for one (sign, prep, meas) cell
/// of one spectator, with inverse-variance weights.
Series qubit_series(const MomentTable& table, int qubit, int sign, Axis prep, Axis meas,
                    std::vector<std::string>& missing) {
    Series series;
    for (int s : table.idle_lengths()) {
        auto cell = table.qubit_cell(qubit, sign, prep, meas, s);
        require(cell.has_value(), missing, sign, prep, meas, s);
        if (!cell) continue;
        series.points.push_back(
            {static_cast<double>(s), cell->value,
             cell->variance > 0.0 ? 1.0 / std::max(cell->variance, kVarFloor) : 1.0});
    }
    return series;
}

/// Raw covariance-slope pair estimate; no clamping, used both for the
/// reported weight-2 estimate and for the weight-1 decay correction.
SlopeFit lambda_fit(const MomentTable& table, Coupling pair) {
    std::vector<std::string> missing;
    Series cov;
    for (int s : table.idle_lengths()) {
        auto pm = table.pair_cell(pair, +1, Axis::Z, Axis::Z, s);
        auto mi = table.qubit_cell(pair.first, +1, Axis::Z, Axis::Z, s);
        auto mj = table.qubit_cell(pair.second, +1, Axis::Z, Axis::Z, s);
        require(pm && mi && mj, missing, +1, Axis::Z, Axis::Z, s);
        if (!(pm && mi && mj)) continue;
        const double c = pm->value - mi->value * mj->value;
        double var = 0.0;
        if (pm->shots != 0) {
            // first-order propagation, cross terms dropped
            var = pm->variance + mj->value * mj->value * mi->variance +
                  mi->value * mi->value * mj->variance;
        }
        cov.points.push_back(
            {static_cast<double>(s), c, var > 0.0 ? 1.0 / std::max(var, kVarFloor) : 1.0});
    }
    if (!missing.empty())
        throw_missing("pair (" + std::to_string(pair.first) + "," + std::to_string(pair.second) +
                          ")",
                      missing);
    return cov.fit();
}

double lambda_sum_raw(const MomentTable& table, int spectator) {
    double sum = 0.0;
    for (auto pair : table.spectator_pairs())
        if (pair.first == spectator || pair.second == spectator)
            sum += lambda_fit(table, pair).slope / 4.0;
    return sum;
}

}  // namespace

std::vector<RateEstimate> estimate_weight1(const MomentTable& table, int spectator) {
    const auto& spect = table.spectators();
    if (std::find(spect.begin(), spect.end(), spectator) == spect.end())
        throw std::invalid_argument("qubit " + std::to_string(spectator) +
                                    " is not a spectator of drive " + table.drive().label());
    if (table.idle_lengths().size() < 2)
        throw std::invalid_argument("need at least two idle lengths");

    const Axis axes[] = {Axis::X, Axis::Y, Axis::Z};
    std::vector<std::string> missing;

    // affine: slope of (<w>_+ + <w>_-)/2; decay: slope of (<w>_+ - <w>_-)/2
    SlopeFit affine[3], decay[3];
    for (Axis w : axes) {
        Series plus = qubit_series(table, spectator, +1, w, w, missing);
        Series minus = qubit_series(table, spectator, -1, w, w, missing);
        if (!missing.empty()) continue;
        Series sum, diff;
        for (std::size_t k = 0; k < plus.points.size(); ++k) {
            const double var_sum =
                0.25 * (1.0 / plus.points[k].weight + 1.0 / minus.points[k].weight);
            sum.points.push_back({plus.points[k].s,
                                  0.5 * (plus.points[k].value + minus.points[k].value),
                                  1.0 / std::max(var_sum, kVarFloor)});
            diff.points.push_back({plus.points[k].s,
                                   0.5 * (plus.points[k].value - minus.points[k].value),
                                   1.0 / std::max(var_sum, kVarFloor)});
        }
        affine[static_cast<int>(w)] = sum.fit();
        decay[static_cast<int>(w)] = diff.fit();
    }
    // cross slopes for the Hamiltonian rates
    SlopeFit cross[3][3];
    const std::pair<Axis, Axis> cross_cells[] = {{Axis::X, Axis::Y}, {Axis::Y, Axis::X},
                                                 {Axis::Y, Axis::Z}, {Axis::Z, Axis::Y},
                                                 {Axis::Z, Axis::X}, {Axis::X, Axis::Z}};
    for (auto [w, v] : cross_cells) {
        Series series = qubit_series(table, spectator, +1, w, v, missing);
        if (missing.empty()) cross[static_cast<int>(w)][static_cast<int>(v)] = series.fit();
    }
    if (!missing.empty()) throw_missing("qubit " + std::to_string(spectator), missing);

    const bool analytic = table.analytic();
    auto err2 = [&](const SlopeFit& f) {
        return analytic ? 0.0 : f.slope_std_err * f.slope_std_err;
    };

    // pair-flip contraction affects every decay series identically; its sum
    // is estimated from the z-basis covariances and subtracted
    const double lam_sum = lambda_sum_raw(table, spectator);

    double t_corr[3], t_var[3];
    for (int w = 0; w < 3; ++w) {
        t_corr[w] = -decay[w].slope / 2.0 - lam_sum;
        t_var[w] = err2(decay[w]) / 4.0;
    }

    std::vector<RateEstimate> out(9);
    // slope(prep w, meas v) = 2 (h x w)_v + a_v at first order; the two
    // cyclic cells carry h_u with opposite signs
    struct HamCell {
        RateSource source;
        Axis w1, v1, w2, v2;
    };
    const HamCell ham_cells[] = {
        {RateSource::HamX, Axis::Y, Axis::Z, Axis::Z, Axis::Y},
        {RateSource::HamY, Axis::Z, Axis::X, Axis::X, Axis::Z},
        {RateSource::HamZ, Axis::X, Axis::Y, Axis::Y, Axis::X},
    };
    for (const auto& cell : ham_cells) {
        const auto& c1 = cross[static_cast<int>(cell.w1)][static_cast<int>(cell.v1)];
        const auto& c2 = cross[static_cast<int>(cell.w2)][static_cast<int>(cell.v2)];
        const auto& a1 = affine[static_cast<int>(cell.v1)];
        const auto& a2 = affine[static_cast<int>(cell.v2)];
        RateEstimate est;
        est.source = cell.source;
        est.value = ((c1.slope - a1.slope) - (c2.slope - a2.slope)) / 4.0;
        est.std_err = std::sqrt((err2(c1) + err2(a1) + err2(c2) + err2(a2)) / 16.0);
        out[static_cast<int>(cell.source)] = est;
    }
    const RateSource sto_sources[] = {RateSource::StoX, RateSource::StoY, RateSource::StoZ};
    for (int x = 0; x < 3; ++x) {
        const int y = (x + 1) % 3, z = (x + 2) % 3;
        RateEstimate est;
        est.source = sto_sources[x];
        est.value = (t_corr[y] + t_corr[z] - t_corr[x]) / 2.0;
        est.std_err = std::sqrt((t_var[x] + t_var[y] + t_var[z]) / 4.0);
        if (est.value < 0.0) {
            est.value = 0.0;
            est.clamped = true;
        }
        out[static_cast<int>(est.source)] = est;
    }
    const RateSource aff_sources[] = {RateSource::AffX, RateSource::AffY, RateSource::AffZ};
    for (int w = 0; w < 3; ++w) {
        RateEstimate est;
        est.source = aff_sources[w];
        est.value = affine[w].slope;
        est.std_err = analytic ? 0.0 : affine[w].slope_std_err;
        out[static_cast<int>(est.source)] = est;
    }
    return out;
}

RateEstimate estimate_weight2(const MomentTable& table, Coupling pair) {
    if (!table.device().adjacent(pair.first, pair.second))
        throw std::invalid_argument("pair (" + std::to_string(pair.first) + "," +
                                    std::to_string(pair.second) + ") is not a device coupling");
    const auto pairs = table.spectator_pairs();
    if (std::find(pairs.begin(), pairs.end(), pair) == pairs.end())
        throw std::invalid_argument("pair endpoints are not both spectators of drive " +
                                    table.drive().label());
    const SlopeFit fit = lambda_fit(table, pair);
    RateEstimate est;
    est.source = RateSource::PairLambda;
    est.value = fit.slope / 4.0;
    est.std_err = table.analytic() ? 0.0 : fit.slope_std_err / 4.0;
    if (est.value < 0.0) {
        est.value = 0.0;
        est.clamped = true;
    }
    return est;
}

std::string to_string(const FeatureKey& key) {
    DriveSpec drive{key.drive_kind, key.drive_a, key.drive_b};
    std::ostringstream os;
    os << drive.label() << ":";
    if (key.target_b < 0)
        os << "q" << key.target_a;
    else
        os << "q" << key.target_a << "q" << key.target_b;
    os << ":" << to_string(key.source);
    return os.str();
}

const RateEstimate* EstimateSet::find(const FeatureKey& key) const {
    for (const auto& [k, v] : items)
        if (k == key) return &v;
    return nullptr;
}

EstimateSet estimate_device(const DeviceTopology& device, std::span<const IdtCircuitSpec> specs,
                            std::span<const CircuitMoments> moments) {
    if (specs.size() != moments.size())
        throw std::invalid_argument("specs and moments differ in length");
    EstimateSet set;
    for (const DriveSpec& drive : enumerate_drives(device)) {
        MomentTable table(device, drive);
        bool any = false;
        for (std::size_t i = 0; i < specs.size(); ++i) {
            if (!(specs[i].drive == drive)) continue;
            table.add(specs[i], moments[i]);
            any = true;
        }
        if (!any && spectators_of(device, drive).empty()) continue;
        FeatureKey base;
        base.drive_kind = drive.kind;
        base.drive_a = drive.a;
        base.drive_b = drive.b;
        for (int q : table.spectators()) {
            auto rates = estimate_weight1(table, q);
            for (const auto& est : rates) {
                FeatureKey key = base;
                key.target_a = q;
                key.target_b = -1;
                key.source = est.source;
                set.items.emplace_back(key, est);
            }
        }
        for (auto pair : table.spectator_pairs()) {
            FeatureKey key = base;
            key.target_a = pair.first;
            key.target_b = pair.second;
            key.source = RateSource::PairLambda;
            set.items.emplace_back(key, estimate_weight2(table, pair));
        }
    }
    return set;
}

EstimateSet effective_truth(const DeviceTopology& device, const ErrorModel& model) {
    EstimateSet set;
    for (const DriveSpec& drive : enumerate_drives(device)) {
        auto spect = spectators_of(device, drive);
        if (spect.empty()) continue;
        FeatureKey base;
        base.drive_kind = drive.kind;
        base.drive_a = drive.a;
        base.drive_b = drive.b;
        for (int q : spect) {
            const QubitRates rates = effective_rates(model, drive, q);
            const double values[9] = {rates.h.x(), rates.h.y(), rates.h.z(),
                                      rates.s.x(), rates.s.y(), rates.s.z(),
                                      rates.a.x(), rates.a.y(), rates.a.z()};
            for (int k = 0; k < 9; ++k) {
                FeatureKey key = base;
                key.target_a = q;
                key.target_b = -1;
                key.source = static_cast<RateSource>(k);
                set.items.emplace_back(key, RateEstimate{values[k], 0.0, key.source, false});
            }
        }
        for (auto pair : device.couplings) {
            if (drive.drives(pair.first) || drive.drives(pair.second)) continue;
            FeatureKey key = base;
            key.target_a = pair.first;
            key.target_b = pair.second;
            key.source = RateSource::PairLambda;
            set.items.emplace_back(
                key, RateEstimate{effective_lambda(model, drive, pair), 0.0, key.source, false});
        }
    }
    return set;
}

}  // namespace xtalkprint
