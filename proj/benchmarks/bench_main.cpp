#include <benchmark/benchmark.h>

#include "xtalkprint/estimate.hpp"
#include "xtalkprint/fingerprint.hpp"
#include "xtalkprint/rng.hpp"

using namespace xtalkprint;

namespace {

struct DeviceFixture {
    Fleet fleet = default_fleet(7);
    std::vector<ErrorModel> models = generate_fleet_model(fleet, NoiseConfig{}, 7);

    const DeviceTopology& device(int i) const { return fleet.devices[i]; }
    BatchParams params(int i) const {
        return BatchParams{fleet.devices[i].device_id, 0, models[i]};
    }
};

const DeviceFixture& fixture() {
    static DeviceFixture f;
    return f;
}

}  // namespace

static void BM_EnumerateEmbeddings(benchmark::State& state) {
    const auto& f = fixture();
    auto pattern = pattern_topology(PatternName::L3);
    for (auto _ : state) {
        auto embeddings = enumerate_embeddings(pattern, f.fleet);
        benchmark::DoNotOptimize(embeddings);
    }
}
BENCHMARK(BM_EnumerateEmbeddings);

static void BM_GenerateExperiments(benchmark::State& state) {
    const auto& f = fixture();
    for (auto _ : state) {
        auto suite = generate_experiments(f.device(8), IdtConfig{});
        benchmark::DoNotOptimize(suite);
    }
}
BENCHMARK(BM_GenerateExperiments);

static void BM_SimulateCircuit(benchmark::State& state) {
    const auto& f = fixture();
    auto params = f.params(0);
    auto suite = generate_experiments(f.device(0), IdtConfig{});
    const auto& spec = suite[40];
    std::uint64_t seed = 1;
    for (auto _ : state) {
        auto record = simulate_counts(params, spec, state.range(0), seed++);
        benchmark::DoNotOptimize(record);
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SimulateCircuit)->Arg(256)->Arg(2048);

static void BM_EstimateDevice(benchmark::State& state) {
    const auto& f = fixture();
    auto params = f.params(0);
    auto suite = generate_experiments(f.device(0), IdtConfig{});
    std::vector<CircuitMoments> moments;
    for (const auto& spec : suite) moments.push_back(analytic_moments(params, spec));
    for (auto _ : state) {
        auto estimates = estimate_device(f.device(0), suite, moments);
        benchmark::DoNotOptimize(estimates);
    }
}
BENCHMARK(BM_EstimateDevice);

static void BM_SliceFingerprint(benchmark::State& state) {
    const auto& f = fixture();
    auto params = f.params(6);
    auto suite = generate_experiments(f.device(6), IdtConfig{});
    std::vector<CircuitMoments> moments;
    for (const auto& spec : suite) moments.push_back(analytic_moments(params, spec));
    auto fp = assemble(estimate_device(f.device(6), suite, moments), f.device(6), 0);
    auto embeddings = enumerate_embeddings(pattern_topology(PatternName::L4), f.device(6));
    std::size_t i = 0;
    for (auto _ : state) {
        auto sliced = slice(fp, embeddings[i++ % embeddings.size()], f.fleet);
        benchmark::DoNotOptimize(sliced);
    }
}
BENCHMARK(BM_SliceFingerprint);

static void BM_NormalizedDistance(benchmark::State& state) {
    const auto& f = fixture();
    auto params = f.params(0);
    auto suite = generate_experiments(f.device(0), IdtConfig{});
    std::vector<CircuitMoments> moments;
    for (const auto& spec : suite) moments.push_back(analytic_moments(params, spec));
    auto fp = assemble(estimate_device(f.device(0), suite, moments), f.device(0), 0);
    auto other = fp;
    other.features.array() += 1e-4;
    for (auto _ : state) benchmark::DoNotOptimize(normalized_distance(fp, other));
}
BENCHMARK(BM_NormalizedDistance);

BENCHMARK_MAIN();
