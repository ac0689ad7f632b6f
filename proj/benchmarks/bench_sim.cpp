#include <benchmark/benchmark.h>

#include "bellsim/coincidence.hpp"
#include "bellsim/neutron.hpp"
#include "bellsim/photon.hpp"
#include "bellsim/rng.hpp"

namespace {

using namespace bellsim;

constexpr double pi = 3.141592653589793238462643383279502884;

void BM_UniformDraws(benchmark::State& state) {
    RngStream s(1);
    double acc = 0.0;
    for (auto _ : state) acc += s.uniform_open();
    benchmark::DoNotOptimize(acc);
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_UniformDraws);

struct NullSink final : PairSink {
    std::uint64_t seen = 0;
    void pair(std::uint64_t, const std::optional<EventRecord>&,
              const std::optional<EventRecord>&) override {
        ++seen;
    }
};

void BM_PhotonPairs(benchmark::State& state) {
    RngStream s(2);
    const StationSettings s1{0.0, pi / 4, 1000.0};
    const StationSettings s2{pi / 8, 3 * pi / 8, 1000.0};
    NullSink sink;
    for (auto _ : state) {
        run_experiment_into(ExperimentI{}, s1, s2, 1000, s, sink);
    }
    state.SetItemsProcessed(state.iterations() * 1000);
}
BENCHMARK(BM_PhotonPairs)->Unit(benchmark::kMicrosecond);

void BM_StreamingCoincidence(benchmark::State& state) {
    RngStream s(3);
    const StationSettings s1{0.3, 0.3, 1000.0};
    const StationSettings s2{0.0, 0.0, 1000.0};
    for (auto _ : state) {
        StreamingCounter counter(1.0, {1.0, 8.0}, true);
        run_experiment_into(ExperimentI{}, s1, s2, 1000, s, counter);
        benchmark::DoNotOptimize(counter.complete_pairs());
    }
    state.SetItemsProcessed(state.iterations() * 1000);
}
BENCHMARK(BM_StreamingCoincidence)->Unit(benchmark::kMicrosecond);

void BM_OfflineCoincidence(benchmark::State& state) {
    RngStream s(4);
    auto [log1, log2] = run_experiment(ExperimentI{}, StationSettings{0.3, 0.9, 1000.0},
                                       StationSettings{0.0, 0.5, 1000.0}, 100000, s);
    for (auto _ : state) {
        benchmark::DoNotOptimize(count_coincidences(log1, log2, AnalysisConfig{1.0, 1.0}));
    }
    state.SetItemsProcessed(state.iterations() * 100000);
}
BENCHMARK(BM_OfflineCoincidence)->Unit(benchmark::kMillisecond);

void BM_BeamSplitterCycle(benchmark::State& state) {
    RngStream s(5);
    DlmBeamSplitter bs(0.2, 0.99);
    bs.initialize(s);
    const NeutronMessage u = spin_up_message();
    for (auto _ : state) {
        bs.absorb(0, u);
        benchmark::DoNotOptimize(bs.emit(s));
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_BeamSplitterCycle);

void BM_InterferometerRun(benchmark::State& state) {
    InterferometerConfig cfg;
    cfg.n_per_setting = 1000;
    cfg.chi0 = 0.7;
    RngStream s(6);
    for (auto _ : state) {
        benchmark::DoNotOptimize(run_interferometer(cfg, s));
    }
    state.SetItemsProcessed(state.iterations() * 1000);
}
BENCHMARK(BM_InterferometerRun)->Unit(benchmark::kMicrosecond);

} // namespace

BENCHMARK_MAIN();
