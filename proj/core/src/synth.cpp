#include "lwi/synth.hpp"

#include "lwi/errors.hpp"
#include "lwi/rng.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <unordered_map>

namespace lwi {

void SynthParams::validate() const {
    if (add_rate <= 0 || cancel_rate < 0 || fill_rate < 0 || modify_rate < 0)
        throw ConfigError("synth: rates must be positive (add) / non-negative");
    if (burst_multiplier < 1.0) throw ConfigError("synth: burst_multiplier must be >= 1");
    if (burst_rate < 0 || withdrawal_rate < 0) throw ConfigError("synth: episode rates must be >= 0");
    if (burst_duration_s <= 0 || withdrawal_duration_s <= 0)
        throw ConfigError("synth: episode durations must be > 0");
    if (tick <= 0 || initial_mid <= tick) throw ConfigError("synth: bad price geometry");
    if (max_levels_away < 1) throw ConfigError("synth: max_levels_away must be >= 1");
    if (live_target == 0) throw ConfigError("synth: live_target must be > 0");
}

namespace {

// Generator-side book mirror. Unlike BookEngine it can enumerate the orders
// resting at a price level, which the mark sampler needs to aim cancels and
// fills at the touch.
class GenBook {
public:
    struct Order {
        int64_t price = 0;
        uint32_t size = 0;
        Side side = Side::None;
    };

    size_t live() const { return live_ids_.size(); }
    size_t side_orders(Side s) const { return s == Side::Bid ? n_bid_ : n_ask_; }

    std::optional<int64_t> best(Side s) const {
        if (s == Side::Bid)
            return bids_.empty() ? std::nullopt : std::optional(bids_.begin()->first);
        return asks_.empty() ? std::nullopt : std::optional(asks_.begin()->first);
    }

    const Order& order(uint64_t id) const { return orders_.at(id); }

    uint64_t pick_uniform(Rng& rng) const { return live_ids_[rng.uniform_u64(live_ids_.size())]; }

    // Random order resting at one of the best quotes; nullopt when empty.
    std::optional<uint64_t> pick_at_touch(Rng& rng) const {
        const bool has_bid = !bids_.empty();
        const bool has_ask = !asks_.empty();
        if (!has_bid && !has_ask) return std::nullopt;
        bool use_bid = has_bid && (!has_ask || rng.bernoulli(0.5));
        const auto& ids = use_bid ? bids_.begin()->second : asks_.begin()->second;
        return ids[rng.uniform_u64(ids.size())];
    }

    void add(uint64_t id, int64_t price, uint32_t size, Side side) {
        orders_[id] = Order{price, size, side};
        id_pos_[id] = live_ids_.size();
        live_ids_.push_back(id);
        with_levels(side, [&](auto& levels) { levels[price].push_back(id); });
        (side == Side::Bid ? n_bid_ : n_ask_) += 1;
    }

    void reduce(uint64_t id, uint32_t by) {
        Order& o = orders_.at(id);
        if (by >= o.size)
            remove(id);
        else
            o.size -= by;
    }

    void remove(uint64_t id) {
        auto it = orders_.find(id);
        const Order& o = it->second;
        with_levels(o.side, [&](auto& levels) {
            auto lvl = levels.find(o.price);
            auto& ids = lvl->second;
            ids.erase(std::find(ids.begin(), ids.end(), id));
            if (ids.empty()) levels.erase(lvl);
        });
        size_t pos = id_pos_.at(id);
        uint64_t back = live_ids_.back();
        live_ids_[pos] = back;
        id_pos_[back] = pos;
        live_ids_.pop_back();
        id_pos_.erase(id);
        (o.side == Side::Bid ? n_bid_ : n_ask_) -= 1;
        orders_.erase(it);
    }

    void move(uint64_t id, int64_t new_price, uint32_t new_size) {
        Order o = orders_.at(id);
        remove(id);
        add(id, new_price, new_size, o.side);
    }

private:
    template <typename F>
    void with_levels(Side s, F&& f) {
        if (s == Side::Bid)
            f(bids_);
        else
            f(asks_);
    }

    std::map<int64_t, std::vector<uint64_t>, std::greater<int64_t>> bids_;
    std::map<int64_t, std::vector<uint64_t>> asks_;
    std::unordered_map<uint64_t, Order> orders_;
    std::vector<uint64_t> live_ids_;
    std::unordered_map<uint64_t, size_t> id_pos_;
    size_t n_bid_ = 0;
    size_t n_ask_ = 0;
};

// [start, end) episode windows laid out by a Poisson arrival process.
std::vector<std::pair<double, double>> episode_windows(Rng& rng, double duration_s, double rate,
                                                       double ep_len) {
    std::vector<std::pair<double, double>> out;
    if (rate <= 0.0) return out;
    double t = rng.exponential(rate);
    while (t < duration_s) {
        out.emplace_back(t, std::min(t + ep_len, duration_s));
        t += ep_len + rng.exponential(rate);
    }
    return out;
}

bool in_window(const std::vector<std::pair<double, double>>& ws, double t, size_t& cursor) {
    while (cursor < ws.size() && ws[cursor].second <= t) ++cursor;
    return cursor < ws.size() && ws[cursor].first <= t;
}

enum class Mark { Add, Cancel, Fill, Modify };

} // namespace

std::vector<MboEvent> synth_stream(uint64_t seed, double duration_s, const SynthParams& p) {
    if (duration_s <= 0) throw ConfigError("synth: duration must be > 0");
    p.validate();

    Rng rng(seed);
    GenBook book;
    std::vector<MboEvent> out;
    const double total_rate = p.add_rate + p.cancel_rate + p.fill_rate + p.modify_rate;
    out.reserve(static_cast<size_t>(total_rate * duration_s * 1.2) + 64);

    // Episode layout is drawn up front so the arrival loop stays simple.
    auto bursts = episode_windows(rng, duration_s, p.burst_rate, p.burst_duration_s);
    auto withdrawals = episode_windows(rng, duration_s, p.withdrawal_rate, p.withdrawal_duration_s);
    if (p.burst_multiplier == 1.0) bursts.clear(); // no rate boundaries to honor
    size_t burst_cursor = 0, wd_cursor = 0;

    uint64_t next_order_id = 1;
    uint64_t sequence = 1;
    int64_t mid_ref = p.initial_mid;

    auto clamp_bid = [&](int64_t px) {
        auto ask = book.best(Side::Ask);
        if (ask) px = std::min(px, *ask - p.tick);
        return std::max(px, p.tick);
    };
    auto clamp_ask = [&](int64_t px) {
        auto bid = book.best(Side::Bid);
        if (bid) px = std::max(px, *bid + p.tick);
        return std::max(px, 2 * p.tick);
    };

    auto draw_size = [&]() {
        double s = rng.lognormal(p.size_log_mean, p.size_log_sd);
        return static_cast<uint32_t>(std::clamp(s, 1.0, 1e6));
    };

    // Ticks away from the touch; short geometric tail keeps the book compact.
    auto draw_offset = [&]() {
        int k = static_cast<int>(rng.exponential(0.7));
        return std::min(k, p.max_levels_away - 1);
    };

    auto emit = [&](int64_t ts, Action action, Side side, uint64_t id, int64_t px, uint32_t sz) {
        MboEvent ev;
        ev.ts_event = ts;
        ev.order_id = id;
        ev.symbol = p.symbol;
        ev.price = px;
        ev.size = sz;
        ev.side = side;
        ev.action = action;
        ev.sequence = sequence++;
        out.push_back(std::move(ev));
    };

    auto do_add = [&](int64_t ts, bool during_withdrawal) {
        // Occasional reference drift gives the mid its own variance.
        if (rng.bernoulli(0.02)) mid_ref += rng.bernoulli(0.5) ? p.tick : -p.tick;
        mid_ref = std::max(mid_ref, 4 * p.tick);

        Side side = rng.bernoulli(0.5) ? Side::Bid : Side::Ask;
        int offset = draw_offset();
        if (during_withdrawal) offset += 2; // quotes back away from the touch
        int64_t px;
        if (side == Side::Bid) {
            auto best = book.best(Side::Bid);
            int64_t ref = best ? *best : mid_ref - p.tick;
            // Improve the quote now and then so spreads re-tighten.
            if (!during_withdrawal && offset == 0 && rng.bernoulli(0.25)) ref += p.tick;
            px = clamp_bid(ref - static_cast<int64_t>(offset) * p.tick);
        } else {
            auto best = book.best(Side::Ask);
            int64_t ref = best ? *best : mid_ref + p.tick;
            if (!during_withdrawal && offset == 0 && rng.bernoulli(0.25)) ref -= p.tick;
            px = clamp_ask(ref + static_cast<int64_t>(offset) * p.tick);
        }
        uint32_t sz = draw_size();
        uint64_t id = next_order_id++;
        book.add(id, px, sz, side);
        emit(ts, Action::Add, side, id, px, sz);
    };

    double t = 0.0;
    while (true) {
        bool bursting = in_window(bursts, t, burst_cursor);
        double rate = bursting ? total_rate * p.burst_multiplier : total_rate;
        double gap = rng.exponential(rate);

        if (bursting) {
            // Piecewise-constant thinning: a draw that crosses the episode end
            // is restarted at the boundary with the base rate.
            double boundary = bursts[burst_cursor].second;
            if (t + gap >= boundary) {
                t = boundary;
                continue;
            }
        } else if (burst_cursor < bursts.size()) {
            double boundary = bursts[burst_cursor].first;
            if (t < boundary && t + gap >= boundary) {
                t = boundary;
                continue;
            }
        }
        t += gap;
        if (t >= duration_s) break;

        const int64_t ts = p.start_ts + static_cast<int64_t>(std::llround(t * 1e9));
        const bool withdrawing = in_window(withdrawals, t, wd_cursor);

        // Mark weights: state-dependent so the live-order count mean-reverts,
        // reshaped during withdrawal episodes. Times stay untouched.
        double fullness = std::clamp(static_cast<double>(book.live()) / p.live_target, 0.0, 2.0);
        double w_add = p.add_rate * (2.0 - fullness);
        double w_cancel = p.cancel_rate * fullness;
        double w_fill = p.fill_rate * fullness;
        double w_modify = p.modify_rate * fullness;
        if (withdrawing) {
            double w_total = w_add + w_cancel + w_fill + w_modify;
            w_cancel = 0.75 * w_total;
            w_add = 0.15 * w_total;
            w_fill = 0.04 * w_total;
            w_modify = 0.06 * w_total;
        }

        Mark mark;
        double u = rng.uniform() * (w_add + w_cancel + w_fill + w_modify);
        if (u < w_add)
            mark = Mark::Add;
        else if (u < w_add + w_cancel)
            mark = Mark::Cancel;
        else if (u < w_add + w_cancel + w_fill)
            mark = Mark::Fill;
        else
            mark = Mark::Modify;
        if (book.live() == 0 && mark != Mark::Add) mark = Mark::Add;

        switch (mark) {
            case Mark::Add:
                do_add(ts, withdrawing);
                break;

            case Mark::Cancel: {
                // Withdrawal episodes rip liquidity from the touch.
                std::optional<uint64_t> id;
                if (withdrawing && rng.bernoulli(0.85)) id = book.pick_at_touch(rng);
                if (!id) id = book.pick_uniform(rng);
                const auto& o = book.order(*id);
                if (book.side_orders(o.side) <= 1) {
                    // never empty a side; keep the quote two-sided
                    do_add(ts, withdrawing);
                    break;
                }
                emit(ts, Action::Cancel, o.side, *id, o.price, o.size);
                book.remove(*id);
                break;
            }

            case Mark::Fill: {
                auto id = book.pick_at_touch(rng);
                if (!id) {
                    do_add(ts, withdrawing);
                    break;
                }
                const auto& o = book.order(*id);
                uint32_t take = std::min(o.size, draw_size());
                if (take == o.size && book.side_orders(o.side) <= 1) {
                    if (o.size <= 1) {
                        do_add(ts, withdrawing);
                        break;
                    }
                    take = o.size - 1; // leave the side resident
                }
                emit(ts, Action::Fill, o.side, *id, o.price, take);
                book.reduce(*id, take);
                break;
            }

            case Mark::Modify: {
                uint64_t id = book.pick_uniform(rng);
                const GenBook::Order o = book.order(id); // copy, move() invalidates
                int64_t shift = (static_cast<int64_t>(rng.uniform_u64(5)) - 2) * p.tick;
                int64_t px = o.side == Side::Bid ? clamp_bid(o.price + shift)
                                                 : clamp_ask(o.price + shift);
                uint32_t sz = draw_size();
                book.move(id, px, sz);
                emit(ts, Action::Modify, o.side, id, px, sz);
                break;
            }
        }
    }
    return out;
}

} // namespace lwi
