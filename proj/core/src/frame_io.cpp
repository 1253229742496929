#include "lwi/errors.hpp"
#include "lwi/features.hpp"

#include <array>
#include <charconv>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <string_view>

namespace lwi {

namespace {

// Shortest-exact float formatting is not needed; 17 significant digits
// round-trip any double and keep output byte-stable.
void append_double(std::string& buf, double v) {
    if (is_missing(v)) return; // missing = empty field
    char tmp[32];
    int len = std::snprintf(tmp, sizeof(tmp), "%.17g", v);
    buf.append(tmp, static_cast<size_t>(len));
}

bool parse_double(std::string_view field, double& out) {
    if (field.empty()) {
        out = missing();
        return true;
    }
    char* end = nullptr;
    std::string tmp(field);
    out = std::strtod(tmp.c_str(), &end);
    return end == tmp.c_str() + tmp.size();
}

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

std::string target_name(int k) { return "target_k" + std::to_string(k); }

} // namespace

void write_frame_csv(std::ostream& out, const FeatureFrame& frame) {
    std::string buf;
    buf += "bin_index,bin_start_ns,LWI";
    for (const auto& name : frame.names) {
        buf += ',';
        buf += name;
    }
    for (const auto& [k, target] : frame.targets) {
        (void)target;
        buf += ',';
        buf += target_name(k);
    }
    buf += ",modelable\n";
    out << buf;

    for (size_t t = 0; t < frame.rows(); ++t) {
        buf.clear();
        buf += std::to_string(frame.bin_index[t]);
        buf += ',';
        buf += std::to_string(frame.bin_start[t]);
        buf += ',';
        append_double(buf, frame.lwi[t]);
        for (const auto& col : frame.columns) {
            buf += ',';
            append_double(buf, col[t]);
        }
        for (const auto& [k, target] : frame.targets) {
            (void)k;
            buf += ',';
            append_double(buf, target[t]);
        }
        buf += ',';
        buf += frame.modelable[t] ? '1' : '0';
        buf += '\n';
        out << buf;
    }
}

void write_frame_csv_file(const std::string& path, const FeatureFrame& frame) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write frame csv: " + path);
    write_frame_csv(out, frame);
}

FeatureFrame read_frame_csv(std::istream& in, std::string symbol) {
    std::string line;
    if (!std::getline(in, line)) throw DataError("frame csv: missing header");
    if (!line.empty() && line.back() == '\r') line.pop_back();

    std::vector<std::string_view> fields;
    split_fields(line, fields);
    if (fields.size() < 4 || fields[0] != "bin_index" || fields[1] != "bin_start_ns" ||
        fields[2] != "LWI" || fields.back() != "modelable")
        throw DataError("frame csv: unexpected header layout");

    FeatureFrame frame;
    frame.symbol = std::move(symbol);
    std::vector<int> target_ks;
    for (size_t i = 3; i + 1 < fields.size(); ++i) {
        std::string_view name = fields[i];
        if (name.starts_with("target_k")) {
            int k = 0;
            auto sv = name.substr(8);
            auto [p, ec] = std::from_chars(sv.data(), sv.data() + sv.size(), k);
            if (ec != std::errc{} || p != sv.data() + sv.size() || k < 1)
                throw DataError("frame csv: bad target column name");
            target_ks.push_back(k);
            frame.targets[k] = {};
        } else {
            if (!target_ks.empty()) throw DataError("frame csv: feature column after targets");
            frame.names.emplace_back(name);
            frame.columns.emplace_back();
        }
    }

    const size_t n_features = frame.names.size();
    const size_t expect = 3 + n_features + target_ks.size() + 1;
    uint64_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        split_fields(line, fields);
        if (fields.size() != expect)
            throw DataError("frame csv: wrong field count at line " + std::to_string(row));

        int64_t bi = 0, bs = 0;
        double v = 0;
        auto geti = [&](std::string_view f, int64_t& x) {
            auto [p, ec] = std::from_chars(f.data(), f.data() + f.size(), x);
            if (ec != std::errc{} || p != f.data() + f.size())
                throw DataError("frame csv: bad integer at line " + std::to_string(row));
        };
        geti(fields[0], bi);
        geti(fields[1], bs);
        frame.bin_index.push_back(bi);
        frame.bin_start.push_back(bs);
        if (!parse_double(fields[2], v))
            throw DataError("frame csv: bad number at line " + std::to_string(row));
        frame.lwi.push_back(v);
        for (size_t i = 0; i < n_features; ++i) {
            if (!parse_double(fields[3 + i], v))
                throw DataError("frame csv: bad number at line " + std::to_string(row));
            frame.columns[i].push_back(v);
        }
        for (size_t i = 0; i < target_ks.size(); ++i) {
            if (!parse_double(fields[3 + n_features + i], v))
                throw DataError("frame csv: bad number at line " + std::to_string(row));
            frame.targets[target_ks[i]].push_back(v);
        }
        frame.modelable.push_back(fields.back() == "1" ? 1 : 0);
    }
    return frame;
}

FeatureFrame read_frame_csv_file(const std::string& path, std::string symbol) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open frame csv: " + path);
    return read_frame_csv(in, std::move(symbol));
}

// ---------------------------------------------------------------------------
// FFR1 binary layout (all little-endian):
//   "FFR1" | u32 version | u16 symbol_len + bytes | u64 n_rows
//   u32 n_features | per feature: u16 name_len + bytes
//   u32 n_targets  | per target: u32 k
//   i64 bin_index[n] | i64 bin_start[n] | f64 lwi[n]
//   f64 col[n] per feature | f64 target[n] per target | u8 modelable[n]
// ---------------------------------------------------------------------------

namespace {

constexpr char kFrameMagic[4] = {'F', 'F', 'R', '1'};

template <typename T>
void write_pod(std::ostream& out, T v) {
    static_assert(std::is_trivially_copyable_v<T>);
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::istream& in) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in) throw DataError("frame ffr: truncated file");
    return v;
}

void write_string16(std::ostream& out, const std::string& s) {
    if (s.size() > 0xFFFF) throw DataError("frame ffr: string too long");
    write_pod<uint16_t>(out, static_cast<uint16_t>(s.size()));
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string read_string16(std::istream& in) {
    uint16_t len = read_pod<uint16_t>(in);
    std::string s(len, '\0');
    in.read(s.data(), len);
    if (!in) throw DataError("frame ffr: truncated string");
    return s;
}

template <typename T>
void write_array(std::ostream& out, const std::vector<T>& v) {
    out.write(reinterpret_cast<const char*>(v.data()),
              static_cast<std::streamsize>(v.size() * sizeof(T)));
}

template <typename T>
void read_array(std::istream& in, std::vector<T>& v, size_t n) {
    v.resize(n);
    in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(n * sizeof(T)));
    if (!in) throw DataError("frame ffr: truncated array");
}

} // namespace

void write_frame_ffr(std::ostream& out, const FeatureFrame& frame) {
    out.write(kFrameMagic, 4);
    write_pod<uint32_t>(out, 1);
    write_string16(out, frame.symbol);
    write_pod<uint64_t>(out, frame.rows());
    write_pod<uint32_t>(out, static_cast<uint32_t>(frame.names.size()));
    for (const auto& name : frame.names) write_string16(out, name);
    write_pod<uint32_t>(out, static_cast<uint32_t>(frame.targets.size()));
    for (const auto& [k, target] : frame.targets) {
        (void)target;
        write_pod<uint32_t>(out, static_cast<uint32_t>(k));
    }
    write_array(out, frame.bin_index);
    write_array(out, frame.bin_start);
    write_array(out, frame.lwi);
    for (const auto& col : frame.columns) write_array(out, col);
    for (const auto& [k, target] : frame.targets) {
        (void)k;
        write_array(out, target);
    }
    write_array(out, frame.modelable);
}

void write_frame_ffr_file(const std::string& path, const FeatureFrame& frame) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write frame ffr: " + path);
    write_frame_ffr(out, frame);
}

FeatureFrame read_frame_ffr(std::istream& in) {
    char magic[4] = {};
    in.read(magic, 4);
    if (in.gcount() != 4 || std::memcmp(magic, kFrameMagic, 4) != 0)
        throw DataError("frame ffr: bad magic, expected FFR1");
    uint32_t version = read_pod<uint32_t>(in);
    if (version != 1) throw DataError("frame ffr: unsupported version");

    FeatureFrame frame;
    frame.symbol = read_string16(in);
    const size_t n = static_cast<size_t>(read_pod<uint64_t>(in));
    const uint32_t n_features = read_pod<uint32_t>(in);
    for (uint32_t i = 0; i < n_features; ++i) frame.names.push_back(read_string16(in));
    const uint32_t n_targets = read_pod<uint32_t>(in);
    std::vector<int> ks;
    for (uint32_t i = 0; i < n_targets; ++i) ks.push_back(static_cast<int>(read_pod<uint32_t>(in)));

    read_array(in, frame.bin_index, n);
    read_array(in, frame.bin_start, n);
    read_array(in, frame.lwi, n);
    frame.columns.resize(n_features);
    for (auto& col : frame.columns) read_array(in, col, n);
    for (int k : ks) read_array(in, frame.targets[k], n);
    read_array(in, frame.modelable, n);
    return frame;
}

FeatureFrame read_frame_ffr_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open frame ffr: " + path);
    return read_frame_ffr(in);
}

} // namespace lwi
