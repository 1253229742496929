#pragma once

#include "lwi/mbo.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace lwi {

// Marked-Poisson synthetic MBO stream. Event times are piecewise-homogeneous
// Poisson (exactly homogeneous when burst_multiplier == 1); event types are
// marks whose probabilities depend on book state and on withdrawal episodes,
// which leaves the arrival-time law untouched. Sizes are log-normal.
struct SynthParams {
    std::string symbol = "SYN";

    // Base mark intensities, events per second.
    double add_rate = 120.0;
    double cancel_rate = 100.0;
    double fill_rate = 15.0;
    double modify_rate = 15.0;

    // Bursts multiply the total arrival rate inside episode windows.
    double burst_multiplier = 3.0;
    double burst_rate = 0.02; // episodes per second
    double burst_duration_s = 2.0;

    // Withdrawal episodes reshape marks toward L1 cancels (rate unchanged).
    double withdrawal_rate = 0.01; // episodes per second
    double withdrawal_duration_s = 1.5;

    // Book geometry.
    int64_t start_ts = 1'753'898'400'000'000'000; // 2025-07-30 14:00 ET as UTC ns
    int64_t initial_mid = 120'000'000'000;        // $120.00 in 1e-9 units
    int64_t tick = 10'000'000;                    // $0.01
    int max_levels_away = 8;
    double size_log_mean = 3.6;
    double size_log_sd = 0.7;

    // Mark probabilities mean-revert the live-order count to this level.
    uint32_t live_target = 200;

    void validate() const; // throws ConfigError
};

std::vector<MboEvent> synth_stream(uint64_t seed, double duration_s,
                                   const SynthParams& params = {});

} // namespace lwi
