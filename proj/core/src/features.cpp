#include "lwi/features.hpp"

#include "lwi/errors.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

namespace lwi {

const std::vector<double>* FeatureFrame::column(const std::string& name) const {
    for (size_t i = 0; i < names.size(); ++i)
        if (names[i] == name) return &columns[i];
    return nullptr;
}

FeatureSpec FeatureSpec::consensus_default() {
    FeatureSpec spec;
    spec.features = {
        "LWI_ma1s",  "LWI_lag1",     "LWI_sd1s",        "dLWI_1s",
        "LWI_lag2",  "adds_rate1s",  "canc_rate1s",     "QI_lag1s",
        "depth_L1_lag1s", "depth_L1_lag4", "QI_sd1s",   "LWI_ma10s",
        "QI_lag4",   "LWI_ma2s",     "LWI_sd2s",        "spread_sd1s",
    };
    return spec;
}

const std::vector<std::string>& FeatureSpec::vocabulary() {
    static const std::vector<std::string> vocab = {
        "LWI_lag1",  "LWI_lag2",  "LWI_lag3",  "LWI_lag4",  "LWI_lag5",
        "LWI_ma1s",  "LWI_ma2s",  "LWI_ma10s", "LWI_sd1s",  "LWI_sd2s",
        "dLWI_1s",
        "QI_lag1",   "QI_lag2",   "QI_lag3",   "QI_lag4",   "QI_lag1s",
        "QI_sd1s",
        "depth_L1_lag1s", "depth_L1_lag4",
        "spread_sd1s",
        "adds_rate1s",    "canc_rate1s",
        "OFI",
        "midret_sd1s",    "midret_sd10s",
    };
    return vocab;
}

std::vector<double> compute_lwi(const std::vector<GridBin>& bins, double epsilon, int ma_window) {
    if (epsilon <= 0) throw ConfigError("compute_lwi: epsilon must be > 0");
    if (ma_window < 1) throw ConfigError("compute_lwi: ma_window must be >= 1");

    const size_t n = bins.size();
    std::vector<double> out(n, missing());

    // Trailing depth sum over the ma_window bins strictly before t.
    long double depth_sum = 0.0L;
    for (size_t t = 0; t < n; ++t) {
        if (t >= static_cast<size_t>(ma_window)) {
            const double depth_ma = static_cast<double>(depth_sum) / ma_window;
            const double adds = static_cast<double>(bins[t].adds_L1);
            const double cancels = static_cast<double>(bins[t].cancels_L1);
            out[t] = cancels == 0.0 ? 0.0 : cancels / (depth_ma + std::max(adds, epsilon));
        }
        depth_sum += static_cast<long double>(bins[t].book.depth_l1());
        if (t + 1 > static_cast<size_t>(ma_window))
            depth_sum -= static_cast<long double>(bins[t - ma_window].book.depth_l1());
    }
    return out;
}

std::vector<double> compute_qi(const std::vector<GridBin>& bins) {
    std::vector<double> out(bins.size(), 0.0);
    for (size_t t = 0; t < bins.size(); ++t) {
        const double bid = static_cast<double>(bins[t].book.bid_depth);
        const double ask = static_cast<double>(bins[t].book.ask_depth);
        const double total = bid + ask;
        out[t] = total == 0.0 ? 0.0 : (bid - ask) / total;
    }
    return out;
}

std::vector<double> compute_ofi(const std::vector<GridBin>& bins) {
    std::vector<double> out(bins.size(), 0.0);
    for (size_t t = 0; t < bins.size(); ++t) {
        const GridBin& b = bins[t];
        const double supply_bid = static_cast<double>(b.bid_adds_L1);
        const double drain_bid = static_cast<double>(b.bid_cancels_L1 + b.bid_exec_L1);
        const double supply_ask = static_cast<double>(b.ask_adds_L1);
        const double drain_ask = static_cast<double>(b.ask_cancels_L1 + b.ask_exec_L1);
        out[t] = (supply_bid - drain_bid) - (supply_ask - drain_ask);
    }
    return out;
}

std::vector<double> rolling_stat(const std::vector<double>& col, int window, RollKind kind) {
    if (window < 1) throw ConfigError("rolling_stat: window must be >= 1");
    if (kind == RollKind::Sd && window < 2) throw ConfigError("rolling_stat: sd needs window >= 2");

    const size_t n = col.size();
    const size_t w = static_cast<size_t>(window);
    std::vector<double> out(n, missing());
    if (n < w) return out;

    // Incremental shifted sums, re-anchored every window so rounding drift
    // cannot accumulate; the shift keeps the sd well conditioned and makes it
    // exactly zero on constant windows.
    long double t1 = 0.0L, t2 = 0.0L;
    double shift = 0.0;
    size_t nan_in_window = 0;
    size_t anchor_countdown = 0;

    auto reanchor = [&](size_t end) { // window is [end - w + 1, end]
        const size_t begin = end - w + 1;
        shift = col[begin];
        if (is_missing(shift)) shift = 0.0;
        t1 = 0.0L;
        t2 = 0.0L;
        nan_in_window = 0;
        for (size_t i = begin; i <= end; ++i) {
            if (is_missing(col[i])) {
                ++nan_in_window;
                continue;
            }
            const double d = col[i] - shift;
            t1 += d;
            t2 += static_cast<long double>(d) * d;
        }
        anchor_countdown = w;
    };

    for (size_t t = w - 1; t < n; ++t) {
        if (t == w - 1 || anchor_countdown == 0) {
            reanchor(t);
        } else {
            // slide: drop col[t - w], add col[t]
            const double dropped = col[t - w];
            if (is_missing(dropped)) {
                --nan_in_window;
            } else {
                const double d = dropped - shift;
                t1 -= d;
                t2 -= static_cast<long double>(d) * d;
            }
            if (is_missing(col[t])) {
                ++nan_in_window;
            } else {
                const double d = col[t] - shift;
                t1 += d;
                t2 += static_cast<long double>(d) * d;
            }
            --anchor_countdown;
        }

        if (nan_in_window > 0) continue;
        if (kind == RollKind::Mean) {
            out[t] = shift + static_cast<double>(t1 / static_cast<long double>(w));
        } else {
            const long double var =
                (t2 - t1 * t1 / static_cast<long double>(w)) / static_cast<long double>(w - 1);
            out[t] = std::sqrt(std::max(static_cast<double>(var), 0.0));
        }
    }
    return out;
}

ActivityRates activity_rates(const std::vector<GridBin>& bins, int window) {
    if (window < 1) throw ConfigError("activity_rates: window must be >= 1");
    const size_t n = bins.size();
    const size_t w = static_cast<size_t>(window);
    ActivityRates rates;
    rates.adds_rate.assign(n, missing());
    rates.canc_rate.assign(n, missing());
    if (n == 0) return rates;

    const double bin_s = static_cast<double>(bins[0].bin_ns) * 1e-9;
    const double denom_s = bin_s * static_cast<double>(window);
    uint64_t adds = 0, cancels = 0;
    for (size_t t = 0; t < n; ++t) {
        adds += bins[t].adds_L1;
        cancels += bins[t].cancels_L1;
        if (t >= w) {
            adds -= bins[t - w].adds_L1;
            cancels -= bins[t - w].cancels_L1;
        }
        if (t + 1 >= w) {
            rates.adds_rate[t] = static_cast<double>(adds) / denom_s;
            rates.canc_rate[t] = static_cast<double>(cancels) / denom_s;
        }
    }
    return rates;
}

namespace {

std::vector<double> lag_col(const std::vector<double>& base, size_t by) {
    std::vector<double> out(base.size(), missing());
    for (size_t t = by; t < base.size(); ++t) out[t] = base[t - by];
    return out;
}

std::vector<double> diff_col(const std::vector<double>& base, size_t by) {
    std::vector<double> out(base.size(), missing());
    for (size_t t = by; t < base.size(); ++t) {
        if (!is_missing(base[t]) && !is_missing(base[t - by])) out[t] = base[t] - base[t - by];
    }
    return out;
}

std::vector<double> mid_log_returns(const std::vector<GridBin>& bins) {
    std::vector<double> out(bins.size(), missing());
    for (size_t t = 1; t < bins.size(); ++t) {
        auto m0 = bins[t - 1].mid_px();
        auto m1 = bins[t].mid_px();
        if (m0 && m1 && *m0 > 0 && *m1 > 0) out[t] = std::log(*m1 / *m0);
    }
    return out;
}

} // namespace

FeatureFrame build_frame(const std::vector<GridBin>& bins, const FeatureSpec& spec,
                         std::string symbol) {
    const size_t n = bins.size();

    FeatureFrame frame;
    frame.symbol = std::move(symbol);
    frame.bin_index.resize(n);
    frame.bin_start.resize(n);
    for (size_t t = 0; t < n; ++t) {
        frame.bin_index[t] = static_cast<int64_t>(t);
        frame.bin_start[t] = bins[t].bin_start;
    }

    // Base series shared by several columns.
    frame.lwi = compute_lwi(bins, spec.epsilon, spec.lwi_ma_bins);
    const std::vector<double>& lwi = frame.lwi;
    const std::vector<double> qi = compute_qi(bins);
    std::vector<double> depth(n), spread_px(n, missing());
    for (size_t t = 0; t < n; ++t) {
        depth[t] = static_cast<double>(bins[t].book.depth_l1());
        if (auto s = bins[t].spread()) spread_px[t] = static_cast<double>(*s);
    }

    // Lazily evaluated builders, one per vocabulary entry. "Ns" window
    // suffixes mean N seconds = 4N bins on the 250 ms grid; bare lagN means
    // N bins.
    std::map<std::string, std::function<std::vector<double>()>> builders;
    for (int k = 1; k <= 5; ++k)
        builders["LWI_lag" + std::to_string(k)] = [&, k] { return lag_col(lwi, k); };
    builders["LWI_ma1s"] = [&] { return rolling_stat(lwi, 4, RollKind::Mean); };
    builders["LWI_ma2s"] = [&] { return rolling_stat(lwi, 8, RollKind::Mean); };
    builders["LWI_ma10s"] = [&] { return rolling_stat(lwi, 40, RollKind::Mean); };
    builders["LWI_sd1s"] = [&] { return rolling_stat(lwi, 4, RollKind::Sd); };
    builders["LWI_sd2s"] = [&] { return rolling_stat(lwi, 8, RollKind::Sd); };
    builders["dLWI_1s"] = [&] { return diff_col(lwi, 4); };
    for (int k = 1; k <= 4; ++k)
        builders["QI_lag" + std::to_string(k)] = [&, k] { return lag_col(qi, k); };
    builders["QI_lag1s"] = [&] { return lag_col(qi, 4); };
    builders["QI_sd1s"] = [&] { return rolling_stat(qi, 4, RollKind::Sd); };
    builders["depth_L1_lag1s"] = [&] { return lag_col(depth, 4); };
    builders["depth_L1_lag4"] = [&] { return lag_col(depth, 4); };
    builders["spread_sd1s"] = [&] { return rolling_stat(spread_px, 4, RollKind::Sd); };
    builders["adds_rate1s"] = [&] { return activity_rates(bins, 4).adds_rate; };
    builders["canc_rate1s"] = [&] { return activity_rates(bins, 4).canc_rate; };
    builders["OFI"] = [&] { return compute_ofi(bins); };
    builders["midret_sd1s"] = [&] { return rolling_stat(mid_log_returns(bins), 4, RollKind::Sd); };
    builders["midret_sd10s"] = [&] { return rolling_stat(mid_log_returns(bins), 40, RollKind::Sd); };

    for (const auto& name : spec.features) {
        auto it = builders.find(name);
        if (it == builders.end()) {
            std::ostringstream msg;
            msg << "unknown feature '" << name << "'; vocabulary:";
            for (const auto& v : FeatureSpec::vocabulary()) msg << ' ' << v;
            throw ConfigError(msg.str());
        }
        frame.names.push_back(name);
        frame.columns.push_back(it->second());
    }

    // Horizon targets: mean LWI over the next k bins.
    for (int k : spec.horizons) {
        if (k < 1) throw ConfigError("build_frame: horizons must be >= 1");
        std::vector<double> target(n, missing());
        // trailing sum of lwi over (t, t+k]
        for (size_t t = 0; t + static_cast<size_t>(k) < n; ++t) {
            long double sum = 0.0L;
            bool ok = true;
            for (size_t j = 1; j <= static_cast<size_t>(k); ++j) {
                const double v = lwi[t + j];
                if (is_missing(v)) {
                    ok = false;
                    break;
                }
                sum += v;
            }
            if (ok) target[t] = static_cast<double>(sum / k);
        }
        frame.targets[k] = std::move(target);
    }

    frame.modelable.assign(n, 1);
    for (size_t t = 0; t < n; ++t) {
        bool ok = !bins[t].warmup;
        for (const auto& colv : frame.columns)
            if (is_missing(colv[t])) {
                ok = false;
                break;
            }
        if (ok)
            for (const auto& [k, target] : frame.targets)
                if (is_missing(target[t])) {
                    ok = false;
                    break;
                }
        frame.modelable[t] = ok ? 1 : 0;
    }
    return frame;
}

} // namespace lwi
