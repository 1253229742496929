#pragma once

#include "lwi/grid.hpp"

#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace lwi {

// Missing values travel as quiet NaN in every real-valued column.
inline double missing() { return std::nan(""); }
inline bool is_missing(double v) { return std::isnan(v); }

// Aligned per-symbol panel: named feature columns, the LWI base series, and
// one forward-mean target column per horizon. Immutable after construction.
struct FeatureFrame {
    std::string symbol;
    std::vector<int64_t> bin_start;
    std::vector<int64_t> bin_index;
    std::vector<double> lwi;                    // target base, kept beside the features
    std::vector<std::string> names;             // feature column order
    std::vector<std::vector<double>> columns;   // one array per name
    std::map<int, std::vector<double>> targets; // horizon k -> mean LWI over (t, t+k]
    std::vector<uint8_t> modelable;             // 0/1 mask

    size_t rows() const { return bin_index.size(); }
    const std::vector<double>* column(const std::string& name) const;
    bool has_column(const std::string& name) const { return column(name) != nullptr; }
};

struct FeatureSpec {
    std::vector<std::string> features;
    std::vector<int> horizons = {1, 4, 8, 20}; // 250 ms, 1 s, 2 s, 5 s
    double epsilon = 1.0;                      // shares; LWI denominator floor
    int lwi_ma_bins = 4;                       // denominator MA window (1 s)

    // The 16 features selected by the cross-ticker consensus screen.
    static FeatureSpec consensus_default();
    // Every name build_frame understands.
    static const std::vector<std::string>& vocabulary();
};

// LWI_t = cancels_L1(t) / (trailing-mean depth over the previous ma_window
// bins + max(adds_L1(t), epsilon)). The first ma_window entries are missing.
std::vector<double> compute_lwi(const std::vector<GridBin>& bins, double epsilon = 1.0,
                                int ma_window = 4);

// Queue imbalance (bid - ask)/(bid + ask) depth at L1; 0 on an empty book.
std::vector<double> compute_qi(const std::vector<GridBin>& bins);

// Per-bin order flow imbalance under the best-quote event rule: bid adds and
// ask cancels/executions count +size, the mirror events count -size.
std::vector<double> compute_ofi(const std::vector<GridBin>& bins);

enum class RollKind { Mean, Sd };

// Trailing-window statistic ending at t inclusive; missing until the window
// is full (and wherever the window contains a missing value). Sd uses the
// n-1 denominator and needs window >= 2.
std::vector<double> rolling_stat(const std::vector<double>& col, int window, RollKind kind);

struct ActivityRates {
    std::vector<double> adds_rate;
    std::vector<double> canc_rate;
};

// Trailing sums of adds_L1 / cancels_L1 over `window` bins, per second.
ActivityRates activity_rates(const std::vector<GridBin>& bins, int window);

// Builds the aligned panel for one symbol. Unknown feature names throw
// ConfigError listing the vocabulary.
FeatureFrame build_frame(const std::vector<GridBin>& bins, const FeatureSpec& spec,
                         std::string symbol);

// CSV: header row of column names, missing = empty field.
void write_frame_csv(std::ostream& out, const FeatureFrame& frame);
void write_frame_csv_file(const std::string& path, const FeatureFrame& frame);
FeatureFrame read_frame_csv(std::istream& in, std::string symbol);
FeatureFrame read_frame_csv_file(const std::string& path, std::string symbol);

// FFR1 binary: magic, symbol, column directory, then f64 LE arrays with NaN
// as the missing marker.
void write_frame_ffr(std::ostream& out, const FeatureFrame& frame);
void write_frame_ffr_file(const std::string& path, const FeatureFrame& frame);
FeatureFrame read_frame_ffr(std::istream& in);
FeatureFrame read_frame_ffr_file(const std::string& path);

} // namespace lwi
