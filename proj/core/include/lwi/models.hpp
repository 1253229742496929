#pragma once

#include "lwi/matrix.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace lwi {

// ---------------------------------------------------------------------------
// Linear estimators
// ---------------------------------------------------------------------------

struct LinearFit {
    std::vector<double> coefficients;   // intercept first, then one per column
    std::vector<std::string> names;     // feature names (no intercept entry)
    size_t n_train = 0;
    bool condition_warning = false;
};

// Least squares with an intercept, QR-based; near-singular designs are
// refitted with a 1e-10 ridge jitter and flagged via condition_warning.
LinearFit ols_fit(const DataMatrix& X, const std::vector<double>& y);

std::vector<double> predict(const LinearFit& fit, const DataMatrix& X);

// Design matrix plus target aligned to it. row_index maps each design row
// back to the source series index, which walk-forward slicing relies on.
struct Design {
    DataMatrix X;
    std::vector<double> y;
    std::vector<size_t> row_index;
};

// AR(p): row t carries lwi[t], lwi[t-1], ..., lwi[t-p+1]; the target is the
// mean of lwi over (t, t+horizon]. Rows touching a missing value are dropped.
Design ar_design(const std::vector<double>& lwi, int p, int horizon);

// HAR: row t carries trailing means of lwi over each window ending at t.
Design har_design(const std::vector<double>& lwi, const std::vector<int>& windows, int horizon);

// ---------------------------------------------------------------------------
// Gradient-boosted regression trees (histogram split search)
// ---------------------------------------------------------------------------

enum class GbtLoss { SquaredError, Huber, Quantile };

struct GbtParams {
    int n_trees = 200;
    int max_depth = 4;
    double learning_rate = 0.05;
    double subsample = 0.8; // row fraction per tree, sampled without replacement
    int min_leaf = 20;
    int histogram_bins = 64;
    GbtLoss loss = GbtLoss::SquaredError;
    double huber_delta = 1.0;
    double quantile_tau = 0.5;
    uint64_t seed = 0;
};

struct GbtNode {
    int feature = -1; // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double leaf_value = 0.0;
    double gain = 0.0;
};

struct GbtTree {
    std::vector<GbtNode> nodes; // nodes[0] is the root
};

struct GbtModel {
    std::vector<GbtTree> trees;
    double base_score = 0.0;
    double learning_rate = 0.05;
    GbtLoss loss = GbtLoss::SquaredError;
    std::vector<std::string> feature_names;
    std::vector<double> train_loss;    // mean training loss after each tree
    std::vector<double> feature_gain;  // split gain summed per feature
};

// Stagewise gradient boosting with per-feature quantile histograms. Split
// gain is GL^2/HL + GR^2/HR - G^2/H with hessians floored at 1e-6; ties break
// to the lowest feature index, then the lowest threshold. Deterministic for a
// fixed params.seed.
GbtModel gbt_fit(const DataMatrix& X, const std::vector<double>& y, const GbtParams& params);

std::vector<double> predict(const GbtModel& model, const DataMatrix& X);

// ---------------------------------------------------------------------------
// Serialization ("model_format": 1 JSON)
// ---------------------------------------------------------------------------

std::string model_to_json(const LinearFit& fit);
std::string model_to_json(const GbtModel& model);
LinearFit linear_from_json(const std::string& text);
GbtModel gbt_from_json(const std::string& text);

} // namespace lwi
