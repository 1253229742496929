#include "lwi/book.hpp"
#include "lwi/grid.hpp"
#include "lwi/synth.hpp"

#include <benchmark/benchmark.h>

namespace {

std::vector<lwi::MboEvent> shared_events() {
    static const auto events = lwi::synth_stream(1, 240.0);
    return events;
}

void BM_BookApply(benchmark::State& state) {
    const auto events = shared_events();
    for (auto _ : state) {
        lwi::BookEngine book;
        for (const auto& ev : events) benchmark::DoNotOptimize(book.apply(ev));
    }
    state.SetItemsProcessed(static_cast<int64_t>(state.iterations()) *
                            static_cast<int64_t>(events.size()));
}
BENCHMARK(BM_BookApply)->Unit(benchmark::kMillisecond);

void BM_Resample(benchmark::State& state) {
    const auto events = shared_events();
    lwi::SessionWindow session;
    session.start_ns = lwi::SynthParams{}.start_ts;
    session.end_ns = session.start_ns + 240'000'000'000LL;
    for (auto _ : state) {
        auto result = lwi::resample(events, session);
        benchmark::DoNotOptimize(result.bins.size());
    }
    state.SetItemsProcessed(static_cast<int64_t>(state.iterations()) *
                            static_cast<int64_t>(events.size()));
}
BENCHMARK(BM_Resample)->Unit(benchmark::kMillisecond);

void BM_SynthStream(benchmark::State& state) {
    for (auto _ : state) {
        auto events = lwi::synth_stream(9, 60.0);
        benchmark::DoNotOptimize(events.size());
    }
}
BENCHMARK(BM_SynthStream)->Unit(benchmark::kMillisecond);

} // namespace
