#include "lwi/mbo.hpp"

#include "lwi/errors.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string_view>
#include <unordered_map>

namespace lwi {

char side_code(Side s) {
    switch (s) {
        case Side::Bid: return 'B';
        case Side::Ask: return 'A';
        default: return 'N';
    }
}

char action_code(Action a) {
    switch (a) {
        case Action::Add: return 'A';
        case Action::Cancel: return 'C';
        case Action::Modify: return 'M';
        case Action::Clear: return 'R';
        case Action::Trade: return 'T';
        case Action::Fill: return 'F';
        default: return 'N';
    }
}

std::optional<Side> side_from_code(char c) {
    switch (c) {
        case 'B': case 'b': return Side::Bid;
        case 'A': case 'a': return Side::Ask;
        case 'N': case 'n': return Side::None;
        default: return std::nullopt;
    }
}

std::optional<Action> action_from_code(char c) {
    switch (c) {
        case 'A': case 'a': return Action::Add;
        case 'C': case 'c': return Action::Cancel;
        case 'M': case 'm': return Action::Modify;
        case 'R': case 'r': return Action::Clear;
        case 'T': case 't': return Action::Trade;
        case 'F': case 'f': return Action::Fill;
        case 'N': case 'n': return Action::None;
        default: return std::nullopt;
    }
}

void StreamErrors::add(uint64_t row, std::string what) {
    ++count;
    if (entries.size() < max_kept) entries.push_back({row, std::move(what)});
}

void StreamErrors::merge(const StreamErrors& other) {
    count += other.count;
    for (const auto& e : other.entries) {
        if (entries.size() >= max_kept) break;
        entries.push_back(e);
    }
}

namespace {

template <typename T>
bool parse_int(std::string_view field, T& out) {
    if (field.empty()) {
        out = T{0}; // blank numeric fields appear on Clear/None rows
        return true;
    }
    const char* first = field.data();
    const char* last = field.data() + field.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc{} && ptr == last;
}

// Stateful per-symbol invariant checks shared by the CSV and binary readers.
// Sequence and timestamp state only advance on accepted events.
class EventValidator {
public:
    // Returns empty optional when the event is acceptable.
    std::optional<std::string> check(const MboEvent& ev) {
        if (ev.action == Action::Add) {
            if (ev.size == 0) return "add with size=0";
            if (ev.price <= 0) return "add with non-positive price";
            if (ev.side == Side::None) return "add with side=N";
        }
        auto& st = state_[ev.symbol];
        if (st.seen) {
            if (ev.sequence <= st.last_seq) return "sequence not increasing";
            if (ev.ts_event < st.last_ts) return "ts_event decreasing";
        }
        st.seen = true;
        st.last_seq = ev.sequence;
        st.last_ts = ev.ts_event;
        return std::nullopt;
    }

private:
    struct SymbolState {
        bool seen = false;
        uint64_t last_seq = 0;
        int64_t last_ts = 0;
    };
    std::unordered_map<std::string, SymbolState> state_;
};

void split_fields(std::string_view line, std::vector<std::string_view>& out) {
    out.clear();
    size_t start = 0;
    while (true) {
        size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            out.push_back(line.substr(start));
            return;
        }
        out.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

} // namespace

ParseResult parse_mbo_csv(std::istream& in, const std::unordered_set<std::string>* symbol_filter) {
    ParseResult result;
    std::string line;
    if (!std::getline(in, line)) throw DataError("mbo csv: empty input, header row required");
    if (!line.empty() && line.back() == '\r') line.pop_back();

    std::vector<std::string_view> fields;
    split_fields(line, fields);
    std::unordered_map<std::string_view, int> col;
    for (size_t i = 0; i < fields.size(); ++i) col[fields[i]] = static_cast<int>(i);

    const std::array<std::string_view, 8> required = {
        "ts_event", "order_id", "symbol", "price", "size", "side", "action", "sequence"};
    std::array<int, 8> idx{};
    for (size_t i = 0; i < required.size(); ++i) {
        auto it = col.find(required[i]);
        if (it == col.end())
            throw DataError("mbo csv: header missing required column '" + std::string(required[i]) + "'");
        idx[i] = it->second;
    }
    const int i_ts = idx[0], i_oid = idx[1], i_sym = idx[2], i_px = idx[3], i_sz = idx[4],
              i_side = idx[5], i_act = idx[6], i_seq = idx[7];
    const size_t min_fields = static_cast<size_t>(*std::max_element(idx.begin(), idx.end())) + 1;

    EventValidator validator;
    uint64_t row = 0;
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        split_fields(line, fields);
        if (fields.size() < min_fields) {
            result.errors.add(row, "too few fields");
            continue;
        }

        MboEvent ev;
        ev.symbol.assign(fields[i_sym]);
        if (symbol_filter != nullptr && symbol_filter->count(ev.symbol) == 0) continue;

        if (!parse_int(fields[i_ts], ev.ts_event) || !parse_int(fields[i_oid], ev.order_id) ||
            !parse_int(fields[i_px], ev.price) || !parse_int(fields[i_sz], ev.size) ||
            !parse_int(fields[i_seq], ev.sequence)) {
            result.errors.add(row, "malformed numeric field");
            continue;
        }
        if (fields[i_side].size() != 1 || fields[i_act].size() != 1) {
            result.errors.add(row, "malformed side/action code");
            continue;
        }
        auto side = side_from_code(fields[i_side][0]);
        auto action = action_from_code(fields[i_act][0]);
        if (!side || !action) {
            result.errors.add(row, "unknown side/action code");
            continue;
        }
        ev.side = *side;
        ev.action = *action;

        if (auto why = validator.check(ev)) {
            result.errors.add(row, *why);
            continue;
        }
        result.events.push_back(std::move(ev));
    }
    return result;
}

ParseResult parse_mbo_csv_file(const std::string& path,
                               const std::unordered_set<std::string>* symbol_filter) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open mbo csv: " + path);
    return parse_mbo_csv(in, symbol_filter);
}

void write_mbo_csv(std::ostream& out, const std::vector<MboEvent>& events) {
    out << "ts_recv,ts_event,rtype,publisher_id,instrument_id,action,side,price,size,"
           "channel_id,order_id,flags,ts_in_delta,sequence,symbol\n";
    for (const auto& ev : events) {
        out << ev.ts_event << ',' << ev.ts_event << ",160,1,0," << action_code(ev.action) << ','
            << side_code(ev.side) << ',' << ev.price << ',' << ev.size << ",0," << ev.order_id
            << ",0,0," << ev.sequence << ',' << ev.symbol << '\n';
    }
}

void write_mbo_csv_file(const std::string& path, const std::vector<MboEvent>& events) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write mbo csv: " + path);
    write_mbo_csv(out, events);
}

namespace {

constexpr char kBinMagic[4] = {'M', 'B', 'O', '1'};
constexpr size_t kBinRecordSize = 38;

template <typename T>
void put_le(unsigned char*& p, T v) {
    for (size_t i = 0; i < sizeof(T); ++i) {
        *p++ = static_cast<unsigned char>(static_cast<uint64_t>(v) >> (8 * i));
    }
}

template <typename T>
T get_le(const unsigned char*& p) {
    uint64_t v = 0;
    for (size_t i = 0; i < sizeof(T); ++i) v |= static_cast<uint64_t>(*p++) << (8 * i);
    return static_cast<T>(v);
}

} // namespace

void write_mbo_binary(std::ostream& out, const std::vector<MboEvent>& events) {
    out.write(kBinMagic, 4);
    std::array<unsigned char, kBinRecordSize> rec{};
    for (const auto& ev : events) {
        unsigned char* p = rec.data();
        put_le<uint64_t>(p, static_cast<uint64_t>(ev.ts_event));
        put_le<uint64_t>(p, ev.order_id);
        put_le<int64_t>(p, ev.price);
        put_le<uint32_t>(p, ev.size);
        put_le<uint8_t>(p, static_cast<uint8_t>(ev.side));
        put_le<uint8_t>(p, static_cast<uint8_t>(ev.action));
        put_le<uint64_t>(p, ev.sequence);
        out.write(reinterpret_cast<const char*>(rec.data()), kBinRecordSize);
    }
}

void write_mbo_binary_file(const std::string& path, const std::vector<MboEvent>& events) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write mbo binary: " + path);
    write_mbo_binary(out, events);
}

ParseResult read_mbo_binary(std::istream& in, const std::string& symbol) {
    char magic[4] = {};
    in.read(magic, 4);
    if (in.gcount() != 4 || std::memcmp(magic, kBinMagic, 4) != 0)
        throw DataError("mbo binary: bad magic, expected MBO1");

    ParseResult result;
    EventValidator validator;
    std::array<unsigned char, kBinRecordSize> rec{};
    uint64_t row = 0;
    while (in.read(reinterpret_cast<char*>(rec.data()), kBinRecordSize)) {
        ++row;
        const unsigned char* p = rec.data();
        MboEvent ev;
        ev.ts_event = static_cast<int64_t>(get_le<uint64_t>(p));
        ev.order_id = get_le<uint64_t>(p);
        ev.price = get_le<int64_t>(p);
        ev.size = get_le<uint32_t>(p);
        uint8_t side_raw = get_le<uint8_t>(p);
        uint8_t action_raw = get_le<uint8_t>(p);
        ev.sequence = get_le<uint64_t>(p);
        ev.symbol = symbol;
        if (side_raw > 2 || action_raw > 6) {
            result.errors.add(row, "invalid side/action byte");
            continue;
        }
        ev.side = static_cast<Side>(side_raw);
        ev.action = static_cast<Action>(action_raw);
        if (auto why = validator.check(ev)) {
            result.errors.add(row, *why);
            continue;
        }
        result.events.push_back(std::move(ev));
    }
    if (in.gcount() != 0) result.errors.add(row + 1, "truncated trailing record");
    return result;
}

ParseResult read_mbo_binary_file(const std::string& path, const std::string& symbol) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open mbo binary: " + path);
    return read_mbo_binary(in, symbol);
}

} // namespace lwi
