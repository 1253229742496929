#pragma once

#include "lwi/features.hpp"
#include "lwi/models.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace lwi {

// ---------------------------------------------------------------------------
// Walk-forward plan
// ---------------------------------------------------------------------------

struct FoldPlan {
    size_t train_begin = 0; // always 0: expanding window
    size_t train_end = 0;
    size_t embargo_end = 0; // [train_end, embargo_end) is skipped
    size_t test_begin = 0;
    size_t test_end = 0;
};

struct WalkForwardPlan {
    std::vector<FoldPlan> folds;
    size_t embargo_bins = 0;
    size_t n_rows = 0;
};

// Expanding-window plan: the region after the initial training block splits
// into n_folds equal test blocks (remainder joins the last); each fold trains
// on everything before its embargo. Throws ConfigError naming the violated
// constraint when the sizes do not fit.
WalkForwardPlan make_plan(size_t n, int n_folds, size_t embargo_bins, size_t initial_train);

// ---------------------------------------------------------------------------
// Metrics
// ---------------------------------------------------------------------------

// 1 - SS_res/SS_tot with SS_tot centered on the mean of y_true. Unbounded
// below; throws DataError on constant y_true.
double r2_score(const std::vector<double>& y_true, const std::vector<double>& y_pred);

double rmse(const std::vector<double>& y_true, const std::vector<double>& y_pred);

// Adjusted Fisher-Pearson skewness; needs n >= 3 and nonzero variance.
double skewness(const std::vector<double>& values);

// ---------------------------------------------------------------------------
// Experiment driver
// ---------------------------------------------------------------------------

struct ModelSpec {
    enum class Kind { Ar, Har, Gbt } kind = Kind::Ar;
    std::string name; // report label
    int ar_order = 5;
    std::vector<int> har_windows = {1, 8, 40}; // 250 ms, 2 s, 10 s
    GbtParams gbt;
    std::vector<std::string> gbt_features; // empty = the consensus set

    static ModelSpec ar(int order = 5);
    static ModelSpec har(std::vector<int> windows = {1, 8, 40});
    static ModelSpec gbt_default();
};

struct EvalRow {
    std::string symbol;
    std::string model;
    int horizon = 0; // in bins
    int fold = 0;
    size_t n_test = 0;
    double r2 = 0.0;
    double rmse = 0.0;
    double resid_mean = 0.0;
    double resid_skew = 0.0;
};

struct CellFailure {
    std::string symbol;
    std::string model;
    int horizon = 0;
    std::string reason;
};

struct EvalSummary {
    std::string symbol;
    std::string model;
    int horizon = 0;
    double mean_r2 = 0.0;
    double mean_rmse = 0.0;
    int n_folds = 0;
};

struct EvalReport {
    std::vector<EvalRow> rows;
    std::vector<CellFailure> failures;
    int64_t bin_ns = 250'000'000;

    std::vector<EvalSummary> summaries() const;
};

struct PlanParams {
    int n_folds = 5;
    size_t embargo_bins = 240;       // 60 s: covers the longest rolling lookback
    double initial_train_frac = 0.4; // of the evaluable rows
};

// Per-fold out-of-sample points, for plot dumps.
using ForecastSink = std::function<void(const std::string& symbol, const std::string& model,
                                        int horizon, int fold,
                                        const std::vector<int64_t>& bin_start,
                                        const std::vector<double>& y_true,
                                        const std::vector<double>& y_pred)>;

// Fits every (model, horizon) cell under one shared walk-forward plan built
// on the rows jointly valid for all models. A failing fold aborts only its
// cell, recorded under failures. Deterministic for a fixed seed.
EvalReport run_experiment(const FeatureFrame& frame, const std::vector<ModelSpec>& models,
                          const std::vector<int>& horizons, const PlanParams& plan_params,
                          uint64_t seed, const ForecastSink* sink = nullptr);

void write_report_csv(std::ostream& out, const EvalReport& report);
void write_report_csv_file(const std::string& path, const EvalReport& report);
void write_summary_csv(std::ostream& out, const EvalReport& report);
void write_summary_csv_file(const std::string& path, const EvalReport& report);

} // namespace lwi
