#pragma once

#include "lwi/features.hpp"
#include "lwi/matrix.hpp"
#include "lwi/models.hpp"

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace lwi {

// ---------------------------------------------------------------------------
// Stationarity and dependence diagnostics
// ---------------------------------------------------------------------------

struct AdfResult {
    double statistic = 0.0;
    int lags_used = 0;
    int n_obs = 0; // observations in the final regression
    double crit_1pct = 0.0;
    double crit_5pct = 0.0;
    double crit_10pct = 0.0;
    bool reject_at_5pct = false;
};

// Augmented Dickey-Fuller test with a constant term. The lag order is chosen
// by minimum AIC over 0..max_lags on a common sample trimmed at max_lags,
// then the winning order is refitted on its own maximal sample. Critical
// values come from the MacKinnon (2010) constant-only response surface in n.
AdfResult adf_test(const std::vector<double>& series, int max_lags);

// Schwert's rule, the customary default for max_lags.
int adf_default_max_lags(size_t n);

struct AcfResult {
    std::vector<double> acf;  // acf[0] == 1
    std::vector<double> pacf; // pacf[0] == 1, Durbin-Levinson
    double conf_band = 0.0;   // 1.96 / sqrt(n)
};

AcfResult acf_pacf(const std::vector<double>& series, int max_lag);

// ---------------------------------------------------------------------------
// Feature screening
// ---------------------------------------------------------------------------

// MI in nats from an equal-frequency 2-D histogram with `bins` bins per axis.
// Binning is rank-based, so strictly monotone transforms of either argument
// leave the estimate unchanged. Constant inputs give 0.
double mutual_information(const std::vector<double>& x, const std::vector<double>& y,
                          int bins = 16);

struct LassoPath {
    std::vector<double> lambdas;
    std::vector<std::vector<double>> coefs; // per lambda, original scale
    std::vector<double> intercepts;
    std::vector<int> iterations;
};

// Cyclic coordinate descent on (1/2n)||y - Xb||^2 + lambda*||b||_1 with warm
// starts along a strictly decreasing lambda path. Columns are standardized
// internally; returned coefficients are on the original scale.
LassoPath lasso_path(const DataMatrix& X, const std::vector<double>& y,
                     const std::vector<double>& lambdas);

// max_j |x_j' y| / n on the standardized problem: the smallest lambda with an
// all-zero solution.
double lasso_lambda_max(const DataMatrix& X, const std::vector<double>& y);

std::vector<double> lasso_lambda_grid(double lambda_max, int count = 50, double ratio = 1e-3);

struct MethodRanking {
    std::string method;                                 // "mi", "gbt", "lasso"
    std::vector<std::pair<std::string, double>> ranked; // feature -> score, best first
};

struct ScreenResult {
    std::string symbol;
    int horizon = 0;
    std::vector<MethodRanking> methods;
};

struct ScreenParams {
    int top_k = 15;
    int mi_bins = 16;
    int cv_folds = 5; // for the lasso lambda choice, contiguous blocks
    GbtParams gbt;    // defaults match the modeling defaults
    uint64_t seed = 0;
};

// Ranks every vocabulary feature present in the frame against target k by
// MI, GBT gain importance, and |lasso coefficient| at the CV-chosen lambda.
ScreenResult screen_features(const FeatureFrame& frame, int horizon, const ScreenParams& params);

// ---------------------------------------------------------------------------
// Cross-ticker consensus
// ---------------------------------------------------------------------------

struct ConsensusRow {
    std::string feature;
    int n_symbols = 0;
    double mean_best_rank = 0.0;
    int method_hits = 0;
    bool consensus = false;
};

// A feature is "present" in a symbol when it appears in any method's top-k
// list. Consensus requires presence in at least `threshold` of the symbols.
// Rows are sorted by mean best rank, ties by name.
std::vector<ConsensusRow> consensus(const std::vector<ScreenResult>& per_symbol,
                                    double threshold = 0.6);

void write_consensus_csv(std::ostream& out, const std::vector<ConsensusRow>& rows);
void write_consensus_csv_file(const std::string& path, const std::vector<ConsensusRow>& rows);

} // namespace lwi
