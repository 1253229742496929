#include "lwi/book.hpp"

#include "lwi/errors.hpp"

namespace lwi {

std::optional<int64_t> BookEngine::best_price(Side s) const {
    if (s == Side::Bid) {
        if (bid_levels_.empty()) return std::nullopt;
        return bid_levels_.begin()->first;
    }
    if (ask_levels_.empty()) return std::nullopt;
    return ask_levels_.begin()->first;
}

bool BookEngine::at_top(int64_t price, const std::optional<int64_t>& pre_best, Side s) {
    if (!pre_best) return true; // first order on an empty side becomes the best
    return s == Side::Bid ? price >= *pre_best : price <= *pre_best;
}

void BookEngine::level_add(Side s, int64_t price, uint32_t size) {
    if (s == Side::Bid)
        bid_levels_[price] += size;
    else
        ask_levels_[price] += size;
}

void BookEngine::level_remove(Side s, int64_t price, uint32_t size) {
    auto erase_from = [price, size](auto& levels) {
        auto it = levels.find(price);
        if (it == levels.end() || it->second < size) throw InternalError("level ledger underflow");
        it->second -= size;
        if (it->second == 0) levels.erase(it);
    };
    if (s == Side::Bid)
        erase_from(bid_levels_);
    else
        erase_from(ask_levels_);
}

FlowDelta BookEngine::apply(const MboEvent& ev) {
    FlowDelta delta;

    switch (ev.action) {
        case Action::Add: {
            if (ev.size == 0 || ev.price <= 0 || ev.side == Side::None) {
                errors_.add(ev.sequence, "invalid add");
                return delta;
            }
            auto [it, inserted] = orders_.try_emplace(ev.order_id, OrderRec{ev.price, ev.size, ev.side});
            if (!inserted) {
                errors_.add(ev.sequence, "add with duplicate live order id");
                return delta;
            }
            auto pre_best = best_price(ev.side);
            level_add(ev.side, ev.price, ev.size);
            delta.side = ev.side;
            if (at_top(ev.price, pre_best, ev.side)) delta.adds_L1 = ev.size;
            return delta;
        }

        case Action::Cancel: {
            auto it = orders_.find(ev.order_id);
            if (it == orders_.end()) {
                errors_.add(ev.sequence, "cancel of unknown order id");
                return delta;
            }
            OrderRec& rec = it->second;
            if (ev.size == 0 || ev.size > rec.size) {
                errors_.add(ev.sequence, "cancel size exceeds resting size");
                return delta;
            }
            auto pre_best = best_price(rec.side);
            level_remove(rec.side, rec.price, ev.size);
            delta.side = rec.side;
            if (pre_best && rec.price == *pre_best) delta.cancels_L1 = ev.size;
            rec.size -= ev.size;
            if (rec.size == 0) orders_.erase(it);
            return delta;
        }

        case Action::Modify: {
            auto it = orders_.find(ev.order_id);
            if (it == orders_.end()) {
                errors_.add(ev.sequence, "modify of unknown order id");
                return delta;
            }
            if (ev.size == 0 || ev.price <= 0) {
                errors_.add(ev.sequence, "invalid modify");
                return delta;
            }
            OrderRec& rec = it->second;
            const Side side = rec.side;
            auto pre_best = best_price(side);

            // Cancel-old-then-add-new semantics; both legs classified against
            // the same pre-event best, then netted into a single bucket.
            uint64_t removed_at_top = (pre_best && rec.price == *pre_best) ? rec.size : 0;
            uint64_t added_at_top = at_top(ev.price, pre_best, side) ? ev.size : 0;

            level_remove(side, rec.price, rec.size);
            level_add(side, ev.price, ev.size);
            rec.price = ev.price;
            rec.size = ev.size;

            delta.side = side;
            if (added_at_top > removed_at_top)
                delta.adds_L1 = added_at_top - removed_at_top;
            else if (removed_at_top > added_at_top)
                delta.cancels_L1 = removed_at_top - added_at_top;
            return delta;
        }

        case Action::Trade:
        case Action::Fill: {
            auto it = orders_.find(ev.order_id);
            if (it == orders_.end()) {
                errors_.add(ev.sequence, "execution against unknown order id");
                return delta;
            }
            OrderRec& rec = it->second;
            if (ev.size == 0 || ev.size > rec.size) {
                errors_.add(ev.sequence, "execution size exceeds resting size");
                return delta;
            }
            auto pre_best = best_price(rec.side);
            level_remove(rec.side, rec.price, ev.size);
            delta.side = rec.side;
            if (pre_best && rec.price == *pre_best) delta.exec_L1 = ev.size;
            rec.size -= ev.size;
            if (rec.size == 0) orders_.erase(it);
            return delta;
        }

        case Action::Clear:
            clear();
            return delta;

        case Action::None:
            return delta;
    }
    return delta;
}

BookL1 BookEngine::snapshot() const {
    BookL1 top;
    if (!bid_levels_.empty()) {
        top.best_bid_px = bid_levels_.begin()->first;
        top.bid_depth = bid_levels_.begin()->second;
    }
    if (!ask_levels_.empty()) {
        top.best_ask_px = ask_levels_.begin()->first;
        top.ask_depth = ask_levels_.begin()->second;
    }
    return top;
}

void BookEngine::clear() {
    orders_.clear();
    bid_levels_.clear();
    ask_levels_.clear();
}

} // namespace lwi
