#pragma once

#include "lwi/eval.hpp"
#include "lwi/features.hpp"
#include "lwi/grid.hpp"
#include "lwi/models.hpp"
#include "lwi/stats.hpp"
#include "lwi/synth.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace lwi::cli {

// Frozen description of one run. Every knob has an embedded default; a config
// file overrides keys, command-line flags override the file.
struct RunConfig {
    // [run]
    std::string out_dir = "out";
    uint64_t seed = 42;
    int jobs = 1;
    int64_t grid_ms = 250;
    int64_t session_start_ns = 1'753'898'400'000'000'000; // 2025-07-30 14:00 ET as UTC
    int64_t session_end_ns = 1'753'902'000'000'000'000;   // one hour later
    size_t warm_bins = 240;
    double epsilon = 1.0;
    int lwi_ma_bins = 4;

    // [symbols] name -> input path (csv or .mbo). Empty means four synthetic
    // symbols under out_dir.
    std::vector<std::pair<std::string, std::string>> symbols;

    // [features]
    std::vector<std::string> feature_set; // empty = consensus default
    std::vector<int> horizons = {1, 4, 8, 20};

    // [models]
    std::vector<std::string> model_names = {"ar", "har", "gbt"};
    int ar_order = 5;
    std::vector<int> har_windows = {1, 8, 40};
    GbtParams gbt;

    // [plan]
    PlanParams plan;

    // [screen]
    int screen_horizon = 4; // the 1 s horizon
    int screen_top_k = 15;
    int screen_mi_bins = 16;
    double consensus_threshold = 0.6;

    // [diag]
    int diag_max_lags = 0; // 0 = Schwert rule
    int diag_acf_lags = 40;

    // [synth]
    double synth_duration_s = 3600.0;
    SynthParams synth;

    void validate_common() const;                  // throws ConfigError
    void validate_inputs_readable() const;         // build-time check
    SessionWindow session() const;
    FeatureSpec feature_spec() const;
    std::vector<ModelSpec> model_specs() const;
    std::vector<std::pair<std::string, std::string>> effective_symbols() const;
};

RunConfig parse_config_file(const std::string& path);
RunConfig parse_config_text(const std::string& text);

// The canonical default configuration, suitable as a starting config file.
std::string defaults_text();

} // namespace lwi::cli
