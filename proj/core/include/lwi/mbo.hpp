#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

namespace lwi {

enum class Side : uint8_t { None = 0, Bid = 1, Ask = 2 };

enum class Action : uint8_t {
    None = 0,
    Add = 1,
    Cancel = 2,
    Modify = 3,
    Clear = 4,
    Trade = 5,
    Fill = 6,
};

char side_code(Side s);     // 'B', 'A', 'N'
char action_code(Action a); // 'A', 'C', 'M', 'R', 'T', 'F', 'N'
std::optional<Side> side_from_code(char c);
std::optional<Action> action_from_code(char c);

// One normalized order message. Prices are integer multiples of 1e-9 currency
// units; timestamps are nanoseconds since the UNIX epoch.
struct MboEvent {
    int64_t ts_event = 0;
    uint64_t order_id = 0;
    std::string symbol;
    int64_t price = 0;
    uint32_t size = 0;
    Side side = Side::None;
    Action action = Action::None;
    uint64_t sequence = 0;

    bool operator==(const MboEvent&) const = default;
};

// Recoverable per-row problems found while parsing or replaying a stream.
// The full count is always kept; messages are capped to bound memory.
struct StreamErrors {
    struct Entry {
        uint64_t row = 0; // 1-based data row (or sequence number during replay)
        std::string what;
    };

    uint64_t count = 0;
    std::vector<Entry> entries;
    size_t max_kept = 64;

    void add(uint64_t row, std::string what);
    void merge(const StreamErrors& other);
};

struct ParseResult {
    std::vector<MboEvent> events;
    StreamErrors errors;
};

// Parses vendor-schema CSV. The header row must name at least ts_event,
// order_id, symbol, price, size, side, action and sequence; extra columns
// (ts_recv, flags, ...) are accepted and ignored. Rows that fail event
// invariants are routed to the error channel with their row number. A header
// missing a required column throws DataError. Prices are parsed as exact
// integers; no float round-trip.
ParseResult parse_mbo_csv(std::istream& in,
                          const std::unordered_set<std::string>* symbol_filter = nullptr);
ParseResult parse_mbo_csv_file(const std::string& path,
                               const std::unordered_set<std::string>* symbol_filter = nullptr);

void write_mbo_csv(std::ostream& out, const std::vector<MboEvent>& events);
void write_mbo_csv_file(const std::string& path, const std::vector<MboEvent>& events);

// Binary interchange: magic "MBO1", then fixed 38-byte little-endian records
// (ts_event u64, order_id u64, price i64, size u32, side u8, action u8,
// sequence u64). The format carries no symbol; the caller stamps one on read.
void write_mbo_binary(std::ostream& out, const std::vector<MboEvent>& events);
void write_mbo_binary_file(const std::string& path, const std::vector<MboEvent>& events);
ParseResult read_mbo_binary(std::istream& in, const std::string& symbol);
ParseResult read_mbo_binary_file(const std::string& path, const std::string& symbol);

} // namespace lwi
