#include "commands.hpp"

#include "lwi/errors.hpp"
#include "lwi/log.hpp"
#include "lwi/rng.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <future>
#include <iostream>
#include <sstream>
#include <thread>

namespace fs = std::filesystem;

namespace lwi::cli {

namespace {

uint64_t fnv1a(const std::string& s) {
    uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

uint64_t symbol_seed(const RunConfig& cfg, const std::string& symbol) {
    return derive_seed(cfg.seed, fnv1a(symbol));
}

bool ends_with(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

std::string frame_path(const RunConfig& cfg, const std::string& symbol) {
    return cfg.out_dir + "/" + symbol + "_frame.ffr";
}

// Runs job(i) for every symbol index on up to cfg.jobs threads. Results are
// merged by the caller in symbol order, so parallelism never reorders output.
void for_each_symbol(const RunConfig& cfg, size_t count,
                     const std::function<void(size_t)>& job) {
    const size_t workers = std::min<size_t>(static_cast<size_t>(cfg.jobs), count);
    if (workers <= 1) {
        for (size_t i = 0; i < count; ++i) job(i);
        return;
    }
    std::atomic<size_t> next{0};
    std::vector<std::future<void>> futs;
    for (size_t w = 0; w < workers; ++w) {
        futs.push_back(std::async(std::launch::async, [&] {
            while (true) {
                const size_t i = next.fetch_add(1);
                if (i >= count) return;
                job(i);
            }
        }));
    }
    for (auto& f : futs) f.get(); // propagate the first exception
}

FeatureFrame load_frame(const RunConfig& cfg, const std::string& symbol) {
    const std::string path = frame_path(cfg, symbol);
    if (!fs::exists(path))
        throw DataError("no frame for " + symbol + " at " + path + "; run `lwi build` first");
    return read_frame_ffr_file(path);
}

void ensure_out_dir(const RunConfig& cfg) {
    std::error_code ec;
    fs::create_directories(cfg.out_dir, ec);
    if (ec) throw DataError("cannot create output directory " + cfg.out_dir);
}

} // namespace

int cmd_synth(const RunConfig& cfg) {
    cfg.validate_common();
    if (cfg.synth_duration_s <= 0) throw ConfigError("config: synth duration must be > 0");
    const auto symbols = cfg.effective_symbols();
    ensure_out_dir(cfg);

    std::vector<size_t> counts(symbols.size(), 0);
    for_each_symbol(cfg, symbols.size(), [&](size_t i) {
        const auto& [symbol, path] = symbols[i];
        SynthParams params = cfg.synth;
        params.symbol = symbol;
        params.start_ts = cfg.session_start_ns;
        auto events = synth_stream(symbol_seed(cfg, symbol), cfg.synth_duration_s, params);
        const fs::path parent = fs::path(path).parent_path();
        if (!parent.empty()) fs::create_directories(parent);
        if (ends_with(path, ".mbo"))
            write_mbo_binary_file(path, events);
        else
            write_mbo_csv_file(path, events);
        counts[i] = events.size();
    });
    for (size_t i = 0; i < symbols.size(); ++i)
        std::cout << symbols[i].first << ": " << counts[i] << " events -> " << symbols[i].second
                  << "\n";
    return 0;
}

int cmd_build(const RunConfig& cfg) {
    cfg.validate_common();
    cfg.validate_inputs_readable();
    const auto symbols = cfg.effective_symbols();
    ensure_out_dir(cfg);

    struct BuildOut {
        size_t rows = 0;
        size_t modelable = 0;
        uint64_t parse_errors = 0;
        uint64_t dropped = 0;
        uint64_t book_errors = 0;
    };
    std::vector<BuildOut> outs(symbols.size());

    for_each_symbol(cfg, symbols.size(), [&](size_t i) {
        const auto& [symbol, path] = symbols[i];
        ParseResult parsed;
        if (ends_with(path, ".mbo")) {
            parsed = read_mbo_binary_file(path, symbol);
        } else {
            std::unordered_set<std::string> filter{symbol};
            parsed = parse_mbo_csv_file(path, &filter);
        }

        auto resampled = resample(parsed.events, cfg.session());
        auto bins = warm_start(std::move(resampled.bins), cfg.warm_bins);
        auto frame = build_frame(bins, cfg.feature_spec(), symbol);

        write_frame_ffr_file(frame_path(cfg, symbol), frame);
        write_frame_csv_file(cfg.out_dir + "/" + symbol + "_frame.csv", frame);
        write_bins_csv_file(cfg.out_dir + "/" + symbol + "_bins.csv", bins);

        BuildOut out;
        out.rows = frame.rows();
        for (auto m : frame.modelable) out.modelable += m;
        out.parse_errors = parsed.errors.count;
        out.dropped = resampled.dropped_events;
        out.book_errors = resampled.book_errors.count;
        outs[i] = out;
    });

    for (size_t i = 0; i < symbols.size(); ++i) {
        const auto& o = outs[i];
        std::cout << symbols[i].first << ": " << o.rows << " bins, " << o.modelable
                  << " modelable, parse_errors=" << o.parse_errors << ", dropped=" << o.dropped
                  << ", book_errors=" << o.book_errors << "\n";
    }
    return 0;
}

int cmd_screen(const RunConfig& cfg) {
    cfg.validate_common();
    const auto symbols = cfg.effective_symbols();
    ensure_out_dir(cfg);

    std::vector<ScreenResult> screens(symbols.size());
    for_each_symbol(cfg, symbols.size(), [&](size_t i) {
        const auto& symbol = symbols[i].first;
        auto frame = load_frame(cfg, symbol);
        ScreenParams params;
        params.top_k = cfg.screen_top_k;
        params.mi_bins = cfg.screen_mi_bins;
        params.gbt = cfg.gbt;
        params.seed = symbol_seed(cfg, symbol);
        screens[i] = screen_features(frame, cfg.screen_horizon, params);
    });

    for (size_t i = 0; i < symbols.size(); ++i) {
        const std::string path = cfg.out_dir + "/" + symbols[i].first + "_ranking.csv";
        std::ofstream out(path, std::ios::binary);
        if (!out) throw DataError("cannot write " + path);
        out << "method,rank,feature,score\n";
        char buf[64];
        for (const auto& method : screens[i].methods) {
            for (size_t r = 0; r < method.ranked.size(); ++r) {
                std::snprintf(buf, sizeof(buf), "%.9g", method.ranked[r].second);
                out << method.method << ',' << r + 1 << ',' << method.ranked[r].first << ',' << buf
                    << '\n';
            }
        }
    }

    auto table = consensus(screens, cfg.consensus_threshold);
    write_consensus_csv_file(cfg.out_dir + "/consensus.csv", table);

    size_t yes = 0;
    for (const auto& row : table) yes += row.consensus ? 1 : 0;
    std::cout << "consensus: " << table.size() << " features ranked, " << yes
              << " pass the " << cfg.consensus_threshold << " threshold -> " << cfg.out_dir
              << "/consensus.csv\n";
    return 0;
}

int cmd_eval(const RunConfig& cfg) {
    cfg.validate_common();
    const auto symbols = cfg.effective_symbols();
    ensure_out_dir(cfg);
    fs::create_directories(cfg.out_dir + "/forecasts");

    const auto specs = cfg.model_specs();
    std::vector<EvalReport> reports(symbols.size());

    for_each_symbol(cfg, symbols.size(), [&](size_t i) {
        const auto& symbol = symbols[i].first;
        auto frame = load_frame(cfg, symbol);
        const int64_t ms = cfg.grid_ms;
        ForecastSink sink = [&cfg, ms](const std::string& sym, const std::string& model,
                                       int horizon, int fold, const std::vector<int64_t>& ts,
                                       const std::vector<double>& y_true,
                                       const std::vector<double>& y_pred) {
            std::string name = model;
            std::replace(name.begin(), name.end(), '(', '_');
            std::erase(name, ')');
            std::ostringstream path;
            path << cfg.out_dir << "/forecasts/" << sym << '_' << name << '_' << horizon * ms
                 << "ms_fold" << fold << ".csv";
            std::ofstream out(path.str(), std::ios::binary);
            if (!out) throw DataError("cannot write " + path.str());
            out << "bin_start_ns,y_true,y_pred\n";
            char buf[80];
            for (size_t r = 0; r < ts.size(); ++r) {
                std::snprintf(buf, sizeof(buf), "%lld,%.17g,%.17g\n",
                              static_cast<long long>(ts[r]), y_true[r], y_pred[r]);
                out << buf;
            }
        };
        reports[i] =
            run_experiment(frame, specs, cfg.horizons, cfg.plan, symbol_seed(cfg, symbol), &sink);
    });

    // Deterministic merge in symbol order.
    EvalReport merged;
    for (const auto& r : reports) {
        merged.bin_ns = r.bin_ns;
        merged.rows.insert(merged.rows.end(), r.rows.begin(), r.rows.end());
        merged.failures.insert(merged.failures.end(), r.failures.begin(), r.failures.end());
    }
    write_report_csv_file(cfg.out_dir + "/report.csv", merged);
    write_summary_csv_file(cfg.out_dir + "/summary.csv", merged);

    std::cout << "eval: " << merged.rows.size() << " fold rows, " << merged.failures.size()
              << " failed cells -> " << cfg.out_dir << "/report.csv, summary.csv\n";
    for (const auto& failure : merged.failures)
        log::warn("cell failed: " + failure.symbol + "/" + failure.model + "/k=" +
                  std::to_string(failure.horizon) + ": " + failure.reason);
    return 0;
}

int cmd_diag(const RunConfig& cfg) {
    cfg.validate_common();
    const auto symbols = cfg.effective_symbols();
    ensure_out_dir(cfg);

    struct DiagOut {
        bool ok = false;
        std::string error;
        AdfResult adf;
        AcfResult acf;
    };
    std::vector<DiagOut> outs(symbols.size());

    for_each_symbol(cfg, symbols.size(), [&](size_t i) {
        const auto& symbol = symbols[i].first;
        auto frame = load_frame(cfg, symbol);
        std::vector<double> series;
        for (size_t t = 0; t < frame.rows(); ++t)
            if (frame.modelable[t] && !is_missing(frame.lwi[t])) series.push_back(frame.lwi[t]);
        DiagOut out;
        try {
            const int max_lags =
                cfg.diag_max_lags > 0 ? cfg.diag_max_lags : adf_default_max_lags(series.size());
            out.adf = adf_test(series, max_lags);
            out.acf = acf_pacf(series, cfg.diag_acf_lags);
            out.ok = true;
        } catch (const std::runtime_error& e) {
            out.error = e.what();
        }
        outs[i] = out;
    });

    {
        std::ofstream out(cfg.out_dir + "/adf.csv", std::ios::binary);
        if (!out) throw DataError("cannot write adf.csv");
        out << "symbol,statistic,lags_used,n_obs,crit_1pct,crit_5pct,crit_10pct,reject_at_5pct,"
               "error\n";
        char buf[160];
        for (size_t i = 0; i < symbols.size(); ++i) {
            const auto& o = outs[i];
            if (o.ok) {
                std::snprintf(buf, sizeof(buf), "%s,%.6f,%d,%d,%.4f,%.4f,%.4f,%s,\n",
                              symbols[i].first.c_str(), o.adf.statistic, o.adf.lags_used,
                              o.adf.n_obs, o.adf.crit_1pct, o.adf.crit_5pct, o.adf.crit_10pct,
                              o.adf.reject_at_5pct ? "true" : "false");
                out << buf;
            } else {
                out << symbols[i].first << ",,,,,,,," << o.error << '\n';
            }
        }
    }
    for (size_t i = 0; i < symbols.size(); ++i) {
        if (!outs[i].ok) continue;
        const std::string path = cfg.out_dir + "/" + symbols[i].first + "_acf.csv";
        std::ofstream out(path, std::ios::binary);
        if (!out) throw DataError("cannot write " + path);
        out << "lag,acf,pacf,conf_band\n";
        char buf[120];
        for (size_t k = 0; k < outs[i].acf.acf.size(); ++k) {
            std::snprintf(buf, sizeof(buf), "%zu,%.9g,%.9g,%.9g\n", k, outs[i].acf.acf[k],
                          outs[i].acf.pacf[k], outs[i].acf.conf_band);
            out << buf;
        }
    }

    for (size_t i = 0; i < symbols.size(); ++i) {
        if (outs[i].ok)
            std::cout << symbols[i].first << ": adf=" << outs[i].adf.statistic
                      << (outs[i].adf.reject_at_5pct ? " (stationary at 5%)" : " (unit root)")
                      << "\n";
        else
            std::cout << symbols[i].first << ": error: " << outs[i].error << "\n";
    }
    return 0;
}

int cmd_defaults() {
    std::cout << defaults_text();
    return 0;
}

} // namespace lwi::cli
