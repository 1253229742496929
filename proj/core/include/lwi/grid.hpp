#pragma once

#include "lwi/book.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace lwi {

// One uniform grid bin: end-of-bin book snapshot plus intra-bin flow at the
// pre-event best quotes. Flow is kept side-split so imbalance features can be
// built downstream without replaying events.
struct GridBin {
    int64_t bin_start = 0;                // ns; multiple of bin_ns from session start
    int64_t bin_ns = 250'000'000;
    BookL1 book;                          // state at bin end
    uint64_t adds_L1 = 0;                 // bid + ask
    uint64_t cancels_L1 = 0;
    uint64_t exec_L1 = 0;
    uint64_t bid_adds_L1 = 0, ask_adds_L1 = 0;
    uint64_t bid_cancels_L1 = 0, ask_cancels_L1 = 0;
    uint64_t bid_exec_L1 = 0, ask_exec_L1 = 0;
    uint64_t event_count = 0;
    bool warmup = false;                  // flagged by warm_start

    std::optional<double> mid_px() const { return book.mid_px(); }
    std::optional<int64_t> spread() const { return book.spread(); }
};

// Session window on the uniform grid. start_ns is the ET session open already
// expressed as a UTC nanosecond timestamp; no timezone lookups happen here.
struct SessionWindow {
    int64_t start_ns = 0;
    int64_t end_ns = 0;
    int64_t bin_ns = 250'000'000;

    int64_t n_bins() const { return (end_ns - start_ns) / bin_ns; }
    void validate() const; // throws ConfigError
};

struct ResampleResult {
    std::vector<GridBin> bins;
    uint64_t dropped_events = 0; // outside [start_ns, end_ns)
    StreamErrors book_errors;    // unknown ids etc. surfaced by the engine
};

// Replays a time-sorted single-symbol stream through a BookEngine and folds
// it onto the grid: event at ts lands in bin floor((ts - start)/bin_ns), the
// snapshot is taken at bin end, and empty bins carry the last snapshot
// forward with zero flow.
ResampleResult resample(const std::vector<MboEvent>& events, const SessionWindow& session);

// Flags the first `warm` bins as excluded from modeling; data is untouched.
// warm >= bins.size() flags everything and logs a warning.
std::vector<GridBin> warm_start(std::vector<GridBin> bins, size_t warm);

void write_bins_csv(std::ostream& out, const std::vector<GridBin>& bins);
void write_bins_csv_file(const std::string& path, const std::vector<GridBin>& bins);

} // namespace lwi
