#include "lwi/features.hpp"
#include "lwi/grid.hpp"
#include "lwi/synth.hpp"

#include <benchmark/benchmark.h>

namespace {

std::vector<lwi::GridBin> shared_bins() {
    static const auto bins = [] {
        const auto events = lwi::synth_stream(2, 3600.0);
        lwi::SessionWindow session;
        session.start_ns = lwi::SynthParams{}.start_ts;
        session.end_ns = session.start_ns + 3'600'000'000'000LL;
        return lwi::warm_start(lwi::resample(events, session).bins, 240);
    }();
    return bins;
}

void BM_BuildFrame(benchmark::State& state) {
    const auto bins = shared_bins();
    lwi::FeatureSpec spec = lwi::FeatureSpec::consensus_default();
    for (auto _ : state) {
        auto frame = lwi::build_frame(bins, spec, "BENCH");
        benchmark::DoNotOptimize(frame.rows());
    }
    state.SetItemsProcessed(static_cast<int64_t>(state.iterations()) *
                            static_cast<int64_t>(bins.size()));
}
BENCHMARK(BM_BuildFrame)->Unit(benchmark::kMillisecond);

void BM_RollingSd(benchmark::State& state) {
    const auto bins = shared_bins();
    const auto lwi_col = lwi::compute_lwi(bins);
    for (auto _ : state) {
        auto sd = lwi::rolling_stat(lwi_col, static_cast<int>(state.range(0)), lwi::RollKind::Sd);
        benchmark::DoNotOptimize(sd.data());
    }
}
BENCHMARK(BM_RollingSd)->Arg(4)->Arg(40)->Arg(240)->Unit(benchmark::kMicrosecond);

} // namespace
