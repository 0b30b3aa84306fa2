#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "xtalkprint/estimate.hpp"
#include "xtalkprint/rng.hpp"

using namespace xtalkprint;

namespace {

BatchParams wrap(const DeviceTopology& device, ErrorModel model) {
    model.device_id = device.device_id;
    if (model.ambient.empty()) model.ambient.assign(device.num_qubits, QubitRates{});
    if (model.pair_ambient.empty())
        for (auto c : device.couplings) model.pair_ambient.push_back({c, 0.0});
    return BatchParams{device.device_id, 0, std::move(model)};
}

BatchParams ambient_only(const DeviceTopology& device, const QubitRates& rates,
                         double lambda = 0.0) {
    ErrorModel model;
    model.duration_ratio = 1.0;
    model.ambient.assign(device.num_qubits, rates);
    for (auto c : device.couplings) model.pair_ambient.push_back({c, lambda});
    return wrap(device, std::move(model));
}

/// Analytic (infinite-shot) moment table for one drive of the suite.
MomentTable analytic_table(const BatchParams& params, const DeviceTopology& device,
                           const DriveSpec& drive, const IdtConfig& config = IdtConfig{}) {
    MomentTable table(device, drive);
    for (const auto& spec : generate_experiments(device, config))
        if (spec.drive == drive) table.add(spec, analytic_moments(params, spec));
    return table;
}

MomentTable sampled_table(const BatchParams& params, const DeviceTopology& device,
                          const DriveSpec& drive, long shots, std::uint64_t seed) {
    MomentTable table(device, drive);
    for (const auto& spec : generate_experiments(device, IdtConfig{}))
        if (spec.drive == drive) {
            auto record = simulate_counts(params, spec, shots, derive_seed(seed, spec.circuit_id));
            table.add(spec, moments_from_counts(device, spec, record));
        }
    return table;
}

double value_of(const std::vector<RateEstimate>& estimates, RateSource source) {
    for (const auto& e : estimates)
        if (e.source == source) return e.value;
    throw std::logic_error("missing source");
}

}  // namespace

TEST_CASE("experiment schedule counts") {
    IdtConfig config;

    SUBCASE("L5: 11 drives, 48 circuits per drive, 528 total") {
        auto device = canonical_topology(DeviceKind::L5, "d0");
        auto suite = generate_experiments(device, config);
        CHECK(suite.size() == 528);
        CHECK(enumerate_drives(device).size() == 11);
        // 12 prep/meas settings x 4 idle lengths per drive
        long per_drive = std::count_if(suite.begin(), suite.end(), [](const auto& s) {
            return s.drive == DriveSpec{DriveKind::Single, 0, -1};
        });
        CHECK(per_drive == 48);
    }

    SUBCASE("single-qubit device: only control groups have spectators") {
        DeviceTopology p1;
        p1.device_id = "p";
        p1.num_qubits = 1;
        auto suite = generate_experiments(p1, config);
        for (const auto& spec : suite) CHECK(spec.drive.is_control());
        CHECK(suite.size() == 2 * 12 * 4);
    }

    SUBCASE("restricting S restricts every circuit") {
        auto device = canonical_topology(DeviceKind::T5, "d3");
        IdtConfig one;
        one.idle_lengths = {1};
        for (const auto& spec : generate_experiments(device, one)) CHECK(spec.idle_length == 1);
    }

    SUBCASE("empty S is rejected") {
        auto device = canonical_topology(DeviceKind::L5, "d0");
        IdtConfig empty;
        empty.idle_lengths = {};
        CHECK_THROWS_AS(generate_experiments(device, empty), std::invalid_argument);
    }

    SUBCASE("circuit ids are unique") {
        auto device = canonical_topology(DeviceKind::H7, "d6");
        auto suite = generate_experiments(device, config);
        std::set<std::string> ids;
        for (const auto& spec : suite) ids.insert(spec.circuit_id);
        CHECK(ids.size() == suite.size());
    }
}

TEST_CASE("fit_slope basics") {
    SUBCASE("exact line") {
        const SlopePoint pts[] = {{1, 1, 1}, {2, 2, 1}, {4, 4, 1}, {8, 8, 1}};
        auto fit = fit_slope(pts);
        CHECK(fit.slope == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(fit.intercept == doctest::Approx(0.0).epsilon(1e-12));
    }
    SUBCASE("constant series") {
        const SlopePoint pts[] = {{1, 3.5, 1}, {2, 3.5, 1}, {4, 3.5, 1}, {8, 3.5, 1}};
        CHECK(fit_slope(pts).slope == doctest::Approx(0.0).epsilon(1e-12));
    }
    SUBCASE("identical s values are rejected") {
        const SlopePoint pts[] = {{2, 1, 1}, {2, 2, 1}};
        CHECK_THROWS_AS(fit_slope(pts), std::invalid_argument);
        const SlopePoint one[] = {{2, 1, 1}};
        CHECK_THROWS_AS(fit_slope(one), std::invalid_argument);
    }
    SUBCASE("noisy line: truth within 3 std errors in >= 99% of trials") {
        Rng rng(99);
        const double sigma = 0.05;
        const double true_slope = 0.7;
        int covered = 0;
        const int trials = 10000;
        for (int t = 0; t < trials; ++t) {
            std::vector<SlopePoint> pts;
            for (double s : {1.0, 2.0, 4.0, 8.0})
                pts.push_back({s, 0.3 + true_slope * s + sigma * rng.normal01(),
                               1.0 / (sigma * sigma)});
            auto fit = fit_slope(pts);
            if (std::abs(fit.slope - true_slope) <= 3.0 * fit.slope_std_err) ++covered;
        }
        CHECK(static_cast<double>(covered) / trials >= 0.99);
    }
}

TEST_CASE("zero-noise weight-1 estimates are exactly zero") {
    auto device = canonical_topology(DeviceKind::L5, "d0");
    auto params = ambient_only(device, QubitRates{});
    auto table = analytic_table(params, device, {DriveKind::Single, 0, -1});
    for (int q : {1, 2, 3, 4})
        for (const auto& est : estimate_weight1(table, q)) CHECK(est.value == 0.0);
}

TEST_CASE("isolated hamiltonian rate is recovered within curvature limits") {
    auto device = canonical_topology(DeviceKind::L5, "d0");
    QubitRates rates;
    rates.h = {0.0, 0.0, 0.01};
    auto params = ambient_only(device, rates);
    auto table = analytic_table(params, device, {DriveKind::Single, 0, -1});
    auto estimates = estimate_weight1(table, 2);
    const double hz = value_of(estimates, RateSource::HamZ);
    CHECK(hz >= 0.0095);
    CHECK(hz <= 0.0105);
    CHECK(std::abs(value_of(estimates, RateSource::HamX)) < 5e-4);
    CHECK(std::abs(value_of(estimates, RateSource::HamY)) < 5e-4);
}

TEST_CASE("isolated stochastic rates are recovered within 5e-4") {
    auto device = canonical_topology(DeviceKind::L5, "d0");
    QubitRates rates;
    rates.s = {0.004, 0.002, 0.001};
    auto params = ambient_only(device, rates);
    auto table = analytic_table(params, device, {DriveKind::Single, 0, -1});
    auto estimates = estimate_weight1(table, 2);
    CHECK(value_of(estimates, RateSource::StoX) == doctest::Approx(0.004).epsilon(0.125));
    CHECK(std::abs(value_of(estimates, RateSource::StoX) - 0.004) <= 5e-4);
    CHECK(std::abs(value_of(estimates, RateSource::StoY) - 0.002) <= 5e-4);
    CHECK(std::abs(value_of(estimates, RateSource::StoZ) - 0.001) <= 5e-4);
}

TEST_CASE("affine rates are recovered from the +/- preparation pairs") {
    auto device = canonical_topology(DeviceKind::L5, "d0");
    QubitRates rates;
    rates.s = {0.0015, 0.0015, 0.0015};
    rates.a = {0.001, -0.0008, 0.0012};
    auto params = ambient_only(device, rates);
    auto table = analytic_table(params, device, {DriveKind::Single, 4, -1});
    auto estimates = estimate_weight1(table, 1);
    CHECK(std::abs(value_of(estimates, RateSource::AffX) - 0.001) <= 1e-4);
    CHECK(std::abs(value_of(estimates, RateSource::AffY) + 0.0008) <= 1e-4);
    CHECK(std::abs(value_of(estimates, RateSource::AffZ) - 0.0012) <= 1e-4);
}

TEST_CASE("flipping hamiltonian signs flips h estimates and leaves s, lambda alone") {
    auto device = canonical_topology(DeviceKind::T5, "d3");
    QubitRates rates;
    rates.h = {0.006, -0.004, 0.008};
    rates.s = {0.002, 0.001, 0.0015};
    auto params_pos = ambient_only(device, rates, 0.0004);
    QubitRates flipped = rates;
    flipped.h = -rates.h;
    auto params_neg = ambient_only(device, flipped, 0.0004);

    DriveSpec drive{DriveKind::Single, 0, -1};
    auto est_pos = estimate_weight1(analytic_table(params_pos, device, drive), 2);
    auto est_neg = estimate_weight1(analytic_table(params_neg, device, drive), 2);
    // antisymmetric at first order; second-order cross terms are even in h
    for (RateSource s : {RateSource::HamX, RateSource::HamY, RateSource::HamZ})
        CHECK(std::abs(value_of(est_pos, s) + value_of(est_neg, s)) <= 1e-5);
    for (RateSource s : {RateSource::StoX, RateSource::StoY, RateSource::StoZ})
        CHECK(std::abs(value_of(est_pos, s) - value_of(est_neg, s)) <= 1e-5);

    auto lam_pos = estimate_weight2(analytic_table(params_pos, device, drive), {3, 4});
    auto lam_neg = estimate_weight2(analytic_table(params_neg, device, drive), {3, 4});
    CHECK(lam_pos.value == doctest::Approx(lam_neg.value).epsilon(1e-9));
}

TEST_CASE("pair rate estimation") {
    auto device = canonical_topology(DeviceKind::L5, "d0");
    DriveSpec drive{DriveKind::ControlSingle, -1, -1};
    auto single_pair_params = [&](double lambda) {
        ErrorModel model;
        model.duration_ratio = 1.0;
        model.ambient.assign(device.num_qubits, QubitRates{});
        for (auto c : device.couplings)
            model.pair_ambient.push_back({c, c == Coupling{2, 3} ? lambda : 0.0});
        return BatchParams{device.device_id, 0, std::move(model)};
    };

    SUBCASE("null case stays within two standard errors of zero") {
        QubitRates rates;
        rates.s = {0.001, 0.001, 0.001};
        auto params = ambient_only(device, rates, 0.0);
        auto table = sampled_table(params, device, drive, 2048, 123);
        auto est = estimate_weight2(table, {1, 2});
        CHECK((est.value <= 2.0 * est.std_err || est.clamped));
    }

    SUBCASE("analytic recovery of lambda = 0.004 within 10%") {
        auto table = analytic_table(single_pair_params(0.004), device, drive);
        auto est = estimate_weight2(table, {2, 3});
        CHECK(est.value >= 0.0036);
        CHECK(est.value <= 0.0044);
    }

    SUBCASE("sampled recovery: median error over 100 seeds below 1.5e-3") {
        auto params = single_pair_params(0.004);
        std::vector<double> errors;
        for (std::uint64_t seed = 0; seed < 100; ++seed) {
            auto table = sampled_table(params, device, drive, 2048, seed);
            errors.push_back(std::abs(estimate_weight2(table, {2, 3}).value - 0.004));
        }
        std::nth_element(errors.begin(), errors.begin() + 50, errors.end());
        CHECK(errors[50] <= 1.5e-3);
    }

    SUBCASE("non-adjacent pairs are rejected") {
        auto params = ambient_only(device, QubitRates{}, 0.001);
        auto table = analytic_table(params, device, drive);
        CHECK_THROWS_AS(estimate_weight2(table, {0, 2}), std::invalid_argument);
    }
}

TEST_CASE("negative stochastic estimates clamp to zero and get flagged") {
    auto device = canonical_topology(DeviceKind::L5, "d0");
    QubitRates rates;
    rates.s = {0.0, 0.0, 0.0005};  // tiny; shot noise will push some below zero
    auto params = ambient_only(device, rates);
    bool saw_clamp = false;
    for (std::uint64_t seed = 0; seed < 10 && !saw_clamp; ++seed) {
        auto table = sampled_table(params, device, {DriveKind::Single, 0, -1}, 512, seed);
        for (int q : {1, 2, 3, 4})
            for (const auto& est : estimate_weight1(table, q))
                if (est.clamped) {
                    CHECK(est.value == 0.0);
                    saw_clamp = true;
                }
    }
    CHECK(saw_clamp);
}

TEST_CASE("missing schedule cells raise an error naming them") {
    auto device = canonical_topology(DeviceKind::L5, "d0");
    auto params = ambient_only(device, QubitRates{});
    DriveSpec drive{DriveKind::Single, 0, -1};
    MomentTable table(device, drive);
    int added = 0;
    for (const auto& spec : generate_experiments(device, IdtConfig{}))
        if (spec.drive == drive && !(spec.prep[0] == SignedAxis{Axis::Y, +1})) {
            table.add(spec, analytic_moments(params, spec));
            ++added;
        }
    REQUIRE(added > 0);
    CHECK_THROWS_WITH_AS(estimate_weight1(table, 2), doctest::Contains("missing schedule cells"),
                         std::invalid_argument);
}

TEST_CASE("control-group estimates agree with drive estimates when crosstalk is zero") {
    auto device = canonical_topology(DeviceKind::T5, "d3");
    QubitRates rates;
    rates.h = {0.005, 0.003, -0.004};
    rates.s = {0.0015, 0.001, 0.002};
    auto params = ambient_only(device, rates, 0.0005);
    auto drive_table = sampled_table(params, device, {DriveKind::Single, 0, -1}, 2048, 7);
    auto control_table = sampled_table(params, device, {DriveKind::ControlSingle, -1, -1}, 2048, 8);
    auto in_drive = estimate_weight1(drive_table, 2);
    auto in_control = estimate_weight1(control_table, 2);
    for (std::size_t i = 0; i < in_drive.size(); ++i) {
        const double se = std::hypot(in_drive[i].std_err, in_control[i].std_err);
        CHECK(std::abs(in_drive[i].value - in_control[i].value) <= 3.0 * se + 1e-6);
    }
}

TEST_CASE("estimate_device covers the full canonical layout") {
    auto device = canonical_topology(DeviceKind::T5, "d3");
    QubitRates rates;
    rates.s = {0.001, 0.001, 0.001};
    auto params = ambient_only(device, rates, 0.0004);
    auto specs = generate_experiments(device, IdtConfig{});
    std::vector<CircuitMoments> moments;
    for (const auto& spec : specs) moments.push_back(analytic_moments(params, spec));
    auto estimates = estimate_device(device, specs, moments);
    auto truth = effective_truth(device, params.effective);
    REQUIRE(estimates.items.size() == truth.items.size());
    for (std::size_t i = 0; i < estimates.items.size(); ++i)
        CHECK(estimates.items[i].first == truth.items[i].first);
}
