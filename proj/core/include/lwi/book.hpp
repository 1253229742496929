#pragma once

#include "lwi/mbo.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <unordered_map>

namespace lwi {

// Top-of-book state. Depths are the aggregate resident size at the best price.
struct BookL1 {
    std::optional<int64_t> best_bid_px;
    std::optional<int64_t> best_ask_px;
    uint64_t bid_depth = 0;
    uint64_t ask_depth = 0;

    bool operator==(const BookL1&) const = default;

    std::optional<double> mid_px() const {
        if (!best_bid_px || !best_ask_px) return std::nullopt;
        return 0.5 * (static_cast<double>(*best_bid_px) + static_cast<double>(*best_ask_px));
    }
    std::optional<int64_t> spread() const {
        if (!best_bid_px || !best_ask_px) return std::nullopt;
        return *best_ask_px - *best_bid_px;
    }
    uint64_t depth_l1() const { return bid_depth + ask_depth; }
};

// Shares the event moved at the best quote of its side, classified against
// the pre-event best price. At most one bucket is set per event; a Modify is
// netted (liquidity gained at the top minus liquidity pulled from it).
struct FlowDelta {
    uint64_t adds_L1 = 0;
    uint64_t cancels_L1 = 0;
    uint64_t exec_L1 = 0;
    Side side = Side::None;

    bool empty() const { return adds_L1 == 0 && cancels_L1 == 0 && exec_L1 == 0; }
};

// Deterministic L3 order book: per-order hash index plus per-price aggregates
// in ordered maps, so apply() is O(log levels) and snapshots are O(1).
// Single-threaded mutation; run one engine per symbol.
class BookEngine {
public:
    struct OrderRec {
        int64_t price = 0;
        uint32_t size = 0;
        Side side = Side::None;
    };

    // Applies one event. Never throws on data problems: unknown order ids,
    // duplicate adds and over-sized removals leave the state unchanged and
    // are counted on the error channel (keyed by event sequence).
    FlowDelta apply(const MboEvent& ev);

    BookL1 snapshot() const;
    void clear();

    const StreamErrors& errors() const { return errors_; }
    size_t live_orders() const { return orders_.size(); }
    const std::unordered_map<uint64_t, OrderRec>& orders() const { return orders_; }

private:
    std::optional<int64_t> best_price(Side s) const;
    // "at or better than the pre-event best" for the given side
    static bool at_top(int64_t price, const std::optional<int64_t>& pre_best, Side s);
    void level_add(Side s, int64_t price, uint32_t size);
    void level_remove(Side s, int64_t price, uint32_t size);

    std::unordered_map<uint64_t, OrderRec> orders_;
    std::map<int64_t, uint64_t, std::greater<int64_t>> bid_levels_; // price -> depth
    std::map<int64_t, uint64_t> ask_levels_;
    StreamErrors errors_;
};

} // namespace lwi
