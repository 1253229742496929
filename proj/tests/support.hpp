#pragma once

// Shared test fixtures: seeded series generators, a naive order-book oracle,
// and grid-bin builders. Everything here recomputes results independently of
// the library code it checks.

#include "lwi/book.hpp"
#include "lwi/grid.hpp"
#include "lwi/mbo.hpp"
#include "lwi/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <unordered_map>
#include <vector>

namespace testing {

// AR(1) with near-Gaussian innovations (sum of 12 uniforms). Deterministic
// and bit-identical across platforms; the frozen ADF reference statistics
// were computed on exactly these streams.
inline std::vector<double> ar1_series(uint64_t seed, double phi, size_t n) {
    lwi::Rng rng(seed);
    std::vector<double> y(n);
    y[0] = rng.gauss12();
    for (size_t t = 1; t < n; ++t) y[t] = phi * y[t - 1] + rng.gauss12();
    return y;
}

inline std::vector<double> rw_series(uint64_t seed, size_t n) {
    lwi::Rng rng(seed);
    std::vector<double> y(n);
    y[0] = rng.gauss12();
    for (size_t t = 1; t < n; ++t) y[t] = y[t - 1] + rng.gauss12();
    return y;
}

// Full-rescan order book: applies the same event semantics as BookEngine but
// stores only the per-order map and recomputes L1 by scanning every order.
class NaiveBook {
public:
    void apply(const lwi::MboEvent& ev) {
        using lwi::Action;
        switch (ev.action) {
            case Action::Add:
                if (ev.size == 0 || ev.price <= 0 || ev.side == lwi::Side::None) return;
                if (orders_.count(ev.order_id) != 0) return;
                orders_[ev.order_id] = {ev.price, ev.size, ev.side};
                return;
            case Action::Cancel:
            case Action::Trade:
            case Action::Fill: {
                auto it = orders_.find(ev.order_id);
                if (it == orders_.end()) return;
                if (ev.size == 0 || ev.size > it->second.size) return;
                it->second.size -= ev.size;
                if (it->second.size == 0) orders_.erase(it);
                return;
            }
            case Action::Modify: {
                auto it = orders_.find(ev.order_id);
                if (it == orders_.end()) return;
                if (ev.size == 0 || ev.price <= 0) return;
                it->second.price = ev.price;
                it->second.size = ev.size;
                return;
            }
            case Action::Clear:
                orders_.clear();
                return;
            case Action::None:
                return;
        }
    }

    lwi::BookL1 scan() const {
        lwi::BookL1 top;
        for (const auto& [id, rec] : orders_) {
            (void)id;
            if (rec.side == lwi::Side::Bid) {
                if (!top.best_bid_px || rec.price > *top.best_bid_px) {
                    top.best_bid_px = rec.price;
                    top.bid_depth = rec.size;
                } else if (rec.price == *top.best_bid_px) {
                    top.bid_depth += rec.size;
                }
            } else if (rec.side == lwi::Side::Ask) {
                if (!top.best_ask_px || rec.price < *top.best_ask_px) {
                    top.best_ask_px = rec.price;
                    top.ask_depth = rec.size;
                } else if (rec.price == *top.best_ask_px) {
                    top.ask_depth += rec.size;
                }
            }
        }
        return top;
    }

    const std::unordered_map<uint64_t, lwi::BookEngine::OrderRec>& orders() const {
        return orders_;
    }

private:
    std::unordered_map<uint64_t, lwi::BookEngine::OrderRec> orders_;
};

// One-sample Kolmogorov-Smirnov statistic against Exp(rate).
inline double ks_stat_exponential(std::vector<double> gaps, double rate) {
    std::sort(gaps.begin(), gaps.end());
    const double n = static_cast<double>(gaps.size());
    double d = 0.0;
    for (size_t i = 0; i < gaps.size(); ++i) {
        const double cdf = 1.0 - std::exp(-rate * gaps[i]);
        d = std::max(d, std::abs(static_cast<double>(i + 1) / n - cdf));
        d = std::max(d, std::abs(static_cast<double>(i) / n - cdf));
    }
    return d;
}

// Minimal bin builder for feature tests: depth/adds/cancels per bin, flat
// books with the given L1 depths split evenly unless sides are given.
struct BinSeq {
    std::vector<lwi::GridBin> bins;

    BinSeq& add(uint64_t bid_depth, uint64_t ask_depth, uint64_t adds, uint64_t cancels,
                uint64_t execs = 0) {
        lwi::GridBin b;
        b.bin_start = static_cast<int64_t>(bins.size()) * b.bin_ns;
        b.book.best_bid_px = 100'000'000'000;
        b.book.best_ask_px = 100'010'000'000;
        b.book.bid_depth = bid_depth;
        b.book.ask_depth = ask_depth;
        b.adds_L1 = adds;
        b.bid_adds_L1 = adds;
        b.cancels_L1 = cancels;
        b.bid_cancels_L1 = cancels;
        b.exec_L1 = execs;
        b.bid_exec_L1 = execs;
        b.event_count = adds + cancels + execs > 0 ? 1 : 0;
        bins.push_back(b);
        return *this;
    }
};

// Bin stream with planted structure: a slow log-intensity factor drives the
// cancel level (persistence), a lagged queue-imbalance threshold multiplies
// it (nonlinearity reachable through QI features but not through LWI
// history), and per-bin lognormal noise dominates single-bin variance.
// Optional rare spikes give the heavy right tail.
struct PatternParams {
    size_t n_bins = 6000;
    double slow_phi = 0.995;
    double slow_sd = 0.8;      // stationary sd of the slow log factor
    double qi_phi = 0.97;
    double qi_sd = 0.10;       // stationary sd of each side's log depth
    double qi_threshold = -0.08;
    double regime_boost = 2.2; // cancel multiplier inside the regime
    int regime_lead = 6;       // bins between the qi signal and the response
    double noise_sd = 0.5;     // lognormal per-bin cancel noise
    double spike_prob = 0.0;
    double spike_mult = 8.0;
    double base_cancels = 40.0;
    double base_adds = 30.0;
    double base_depth = 400.0;
};

inline std::vector<lwi::GridBin> pattern_bins(uint64_t seed, const PatternParams& p) {
    lwi::Rng rng(seed);
    const double s_eps = p.slow_sd * std::sqrt(1.0 - p.slow_phi * p.slow_phi);
    const double q_eps = p.qi_sd * std::sqrt(1.0 - p.qi_phi * p.qi_phi);

    std::vector<lwi::GridBin> bins(p.n_bins);
    std::vector<uint8_t> regime(p.n_bins, 0);
    double slow = 0.0, lu = 0.0, lv = 0.0;
    constexpr int64_t kTick = 10'000'000;
    constexpr int64_t kMid = 100'000'000'000;

    for (size_t t = 0; t < p.n_bins; ++t) {
        slow = p.slow_phi * slow + s_eps * rng.gauss12();
        lu = p.qi_phi * lu + q_eps * rng.gauss12();
        lv = p.qi_phi * lv + q_eps * rng.gauss12();

        const double bid_depth = p.base_depth * std::exp(lu);
        const double ask_depth = p.base_depth * std::exp(lv);
        const double qi = (bid_depth - ask_depth) / (bid_depth + ask_depth);
        regime[t] = qi < p.qi_threshold ? 1 : 0;
        const bool boosted =
            t >= static_cast<size_t>(p.regime_lead) && regime[t - p.regime_lead] != 0;

        double cancels = p.base_cancels * std::exp(slow) *
                         (boosted ? p.regime_boost : 1.0) *
                         std::exp(p.noise_sd * rng.gauss12() - 0.5 * p.noise_sd * p.noise_sd);
        if (p.spike_prob > 0.0 && rng.bernoulli(p.spike_prob)) cancels *= p.spike_mult;
        const double adds = p.base_adds * std::exp(0.3 * rng.gauss12());

        lwi::GridBin& b = bins[t];
        b.bin_start = static_cast<int64_t>(t) * b.bin_ns;
        const auto spread_bid = 1 + static_cast<int64_t>(rng.uniform_u64(2));
        const auto spread_ask = 1 + static_cast<int64_t>(rng.uniform_u64(2));
        b.book.best_bid_px = kMid - spread_bid * kTick;
        b.book.best_ask_px = kMid + spread_ask * kTick;
        b.book.bid_depth = static_cast<uint64_t>(std::max(1.0, bid_depth));
        b.book.ask_depth = static_cast<uint64_t>(std::max(1.0, ask_depth));
        b.bid_cancels_L1 = static_cast<uint64_t>(std::max(0.0, cancels * 0.5));
        b.ask_cancels_L1 = static_cast<uint64_t>(std::max(0.0, cancels * 0.5));
        b.cancels_L1 = b.bid_cancels_L1 + b.ask_cancels_L1;
        b.bid_adds_L1 = static_cast<uint64_t>(std::max(0.0, adds * 0.5));
        b.ask_adds_L1 = static_cast<uint64_t>(std::max(0.0, adds * 0.5));
        b.adds_L1 = b.bid_adds_L1 + b.ask_adds_L1;
        b.bid_exec_L1 = rng.uniform_u64(8);
        b.ask_exec_L1 = rng.uniform_u64(8);
        b.exec_L1 = b.bid_exec_L1 + b.ask_exec_L1;
        b.event_count = b.adds_L1 + b.cancels_L1 + b.exec_L1;
    }
    return bins;
}

// Random bin stream with controllable scale, for property tests.
inline std::vector<lwi::GridBin> random_bins(uint64_t seed, size_t n) {
    lwi::Rng rng(seed);
    std::vector<lwi::GridBin> bins(n);
    for (size_t t = 0; t < n; ++t) {
        lwi::GridBin& b = bins[t];
        b.bin_start = static_cast<int64_t>(t) * b.bin_ns;
        b.book.best_bid_px = 100'000'000'000 + static_cast<int64_t>(rng.uniform_u64(20)) * 10'000'000;
        b.book.best_ask_px = *b.book.best_bid_px + 10'000'000 * (1 + static_cast<int64_t>(rng.uniform_u64(4)));
        b.book.bid_depth = 50 + rng.uniform_u64(400);
        b.book.ask_depth = 50 + rng.uniform_u64(400);
        b.bid_adds_L1 = rng.uniform_u64(120);
        b.ask_adds_L1 = rng.uniform_u64(120);
        b.bid_cancels_L1 = rng.uniform_u64(90);
        b.ask_cancels_L1 = rng.uniform_u64(90);
        b.bid_exec_L1 = rng.uniform_u64(30);
        b.ask_exec_L1 = rng.uniform_u64(30);
        b.adds_L1 = b.bid_adds_L1 + b.ask_adds_L1;
        b.cancels_L1 = b.bid_cancels_L1 + b.ask_cancels_L1;
        b.exec_L1 = b.bid_exec_L1 + b.ask_exec_L1;
        b.event_count = 1 + rng.uniform_u64(50);
    }
    return bins;
}

} // namespace testing
