#include "lwi/grid.hpp"

#include "lwi/errors.hpp"
#include "lwi/log.hpp"

#include <fstream>
#include <ostream>

namespace lwi {

void SessionWindow::validate() const {
    if (bin_ns <= 0) throw ConfigError("session: bin width must be > 0");
    if (end_ns <= start_ns) throw ConfigError("session: end must be after start");
    if ((end_ns - start_ns) % bin_ns != 0)
        throw ConfigError("session: window must be a whole number of bins");
}

ResampleResult resample(const std::vector<MboEvent>& events, const SessionWindow& session) {
    session.validate();
    const int64_t n_bins = session.n_bins();

    ResampleResult result;
    result.bins.resize(static_cast<size_t>(n_bins));
    for (int64_t b = 0; b < n_bins; ++b) {
        result.bins[static_cast<size_t>(b)].bin_start = session.start_ns + b * session.bin_ns;
        result.bins[static_cast<size_t>(b)].bin_ns = session.bin_ns;
    }

    BookEngine engine;
    int64_t current = 0; // bin being filled

    auto close_through = [&](int64_t last) {
        // Snapshot the open bin, then carry it into any empty bins up to `last`.
        BookL1 snap = engine.snapshot();
        result.bins[static_cast<size_t>(current)].book = snap;
        for (int64_t b = current + 1; b <= last; ++b)
            result.bins[static_cast<size_t>(b)].book = snap;
        current = last;
    };

    for (const auto& ev : events) {
        if (ev.ts_event < session.start_ns || ev.ts_event >= session.end_ns) {
            ++result.dropped_events;
            continue;
        }
        const int64_t b = (ev.ts_event - session.start_ns) / session.bin_ns;
        if (b > current) close_through(b);

        FlowDelta delta = engine.apply(ev);
        GridBin& bin = result.bins[static_cast<size_t>(b)];
        ++bin.event_count;
        bin.adds_L1 += delta.adds_L1;
        bin.cancels_L1 += delta.cancels_L1;
        bin.exec_L1 += delta.exec_L1;
        if (delta.side == Side::Bid) {
            bin.bid_adds_L1 += delta.adds_L1;
            bin.bid_cancels_L1 += delta.cancels_L1;
            bin.bid_exec_L1 += delta.exec_L1;
        } else if (delta.side == Side::Ask) {
            bin.ask_adds_L1 += delta.adds_L1;
            bin.ask_cancels_L1 += delta.cancels_L1;
            bin.ask_exec_L1 += delta.exec_L1;
        }
    }
    close_through(n_bins - 1);

    result.book_errors = engine.errors();
    return result;
}

std::vector<GridBin> warm_start(std::vector<GridBin> bins, size_t warm) {
    if (warm >= bins.size() && !bins.empty())
        log::warn("warm_start: warm bins >= session length, nothing is modelable");
    const size_t n = std::min(warm, bins.size());
    for (size_t i = 0; i < n; ++i) bins[i].warmup = true;
    return bins;
}

void write_bins_csv(std::ostream& out, const std::vector<GridBin>& bins) {
    out << "bin_start_ns,best_bid_px,best_ask_px,bid_depth,ask_depth,adds_L1,cancels_L1,"
           "exec_L1,event_count\n";
    for (const auto& b : bins) {
        out << b.bin_start << ',';
        if (b.book.best_bid_px) out << *b.book.best_bid_px;
        out << ',';
        if (b.book.best_ask_px) out << *b.book.best_ask_px;
        out << ',' << b.book.bid_depth << ',' << b.book.ask_depth << ',' << b.adds_L1 << ','
            << b.cancels_L1 << ',' << b.exec_L1 << ',' << b.event_count << '\n';
    }
}

void write_bins_csv_file(const std::string& path, const std::vector<GridBin>& bins) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write bins csv: " + path);
    write_bins_csv(out, bins);
}

} // namespace lwi
