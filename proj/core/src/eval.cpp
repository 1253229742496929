#include "lwi/eval.hpp"

#include "lwi/errors.hpp"
#include "lwi/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <ostream>
#include <set>

namespace lwi {

WalkForwardPlan make_plan(size_t n, int n_folds, size_t embargo_bins, size_t initial_train) {
    if (n_folds < 1) throw ConfigError("make_plan: n_folds must be >= 1");
    if (initial_train < 1) throw ConfigError("make_plan: initial training block is empty");
    if (initial_train >= n) throw ConfigError("make_plan: initial training block covers all rows");

    const size_t block = (n - initial_train) / static_cast<size_t>(n_folds);
    if (block == 0) throw ConfigError("make_plan: test blocks are empty, too few rows per fold");
    if (block <= embargo_bins)
        throw ConfigError("make_plan: embargo swallows the test block, need block > embargo");

    WalkForwardPlan plan;
    plan.embargo_bins = embargo_bins;
    plan.n_rows = n;
    for (int f = 0; f < n_folds; ++f) {
        FoldPlan fold;
        fold.train_begin = 0;
        fold.train_end = initial_train + static_cast<size_t>(f) * block;
        fold.embargo_end = fold.train_end + embargo_bins;
        fold.test_begin = fold.embargo_end;
        fold.test_end = f + 1 == n_folds
                            ? n
                            : std::min(initial_train + static_cast<size_t>(f + 1) * block +
                                           embargo_bins,
                                       n);
        if (fold.test_begin >= fold.test_end)
            throw ConfigError("make_plan: fold " + std::to_string(f) + " has an empty test block");
        plan.folds.push_back(fold);
    }
    return plan;
}

double r2_score(const std::vector<double>& y_true, const std::vector<double>& y_pred) {
    if (y_true.size() != y_pred.size() || y_true.empty())
        throw DataError("r2_score: length mismatch or empty input");
    const double n = static_cast<double>(y_true.size());
    const double mean = std::accumulate(y_true.begin(), y_true.end(), 0.0) / n;
    double ss_tot = 0.0, ss_res = 0.0;
    for (size_t i = 0; i < y_true.size(); ++i) {
        const double dt = y_true[i] - mean;
        const double dr = y_true[i] - y_pred[i];
        ss_tot += dt * dt;
        ss_res += dr * dr;
    }
    if (ss_tot == 0.0) throw DataError("r2_score: constant y_true, undefined");
    return 1.0 - ss_res / ss_tot;
}

double rmse(const std::vector<double>& y_true, const std::vector<double>& y_pred) {
    if (y_true.size() != y_pred.size() || y_true.empty())
        throw DataError("rmse: length mismatch or empty input");
    double acc = 0.0;
    for (size_t i = 0; i < y_true.size(); ++i) {
        const double d = y_true[i] - y_pred[i];
        acc += d * d;
    }
    return std::sqrt(acc / static_cast<double>(y_true.size()));
}

double skewness(const std::vector<double>& values) {
    const size_t n = values.size();
    if (n < 3) throw DataError("skewness: need at least 3 observations");
    const double dn = static_cast<double>(n);
    const double mean = std::accumulate(values.begin(), values.end(), 0.0) / dn;
    double m2 = 0.0, m3 = 0.0;
    for (double v : values) {
        const double d = v - mean;
        m2 += d * d;
        m3 += d * d * d;
    }
    m2 /= dn;
    m3 /= dn;
    if (m2 == 0.0) throw DataError("skewness: zero variance");
    const double g1 = m3 / std::pow(m2, 1.5);
    return g1 * std::sqrt(dn * (dn - 1.0)) / (dn - 2.0);
}

ModelSpec ModelSpec::ar(int order) {
    ModelSpec spec;
    spec.kind = Kind::Ar;
    spec.ar_order = order;
    spec.name = "AR(" + std::to_string(order) + ")";
    return spec;
}

ModelSpec ModelSpec::har(std::vector<int> windows) {
    ModelSpec spec;
    spec.kind = Kind::Har;
    spec.har_windows = std::move(windows);
    spec.name = "HAR";
    return spec;
}

ModelSpec ModelSpec::gbt_default() {
    ModelSpec spec;
    spec.kind = Kind::Gbt;
    spec.name = "GBT";
    return spec;
}

namespace {

// Full-length design: one row per frame row, NaN where undefined; fold
// slicing then works on frame row indices directly.
DataMatrix full_design(const FeatureFrame& frame, const ModelSpec& spec) {
    const size_t n = frame.rows();
    switch (spec.kind) {
        case ModelSpec::Kind::Ar: {
            const int p = spec.ar_order;
            DataMatrix X(n, static_cast<size_t>(p));
            for (int j = 0; j < p; ++j) X.names.push_back("LWI_lag" + std::to_string(j));
            for (size_t t = 0; t < n; ++t)
                for (int j = 0; j < p; ++j)
                    X.at(t, static_cast<size_t>(j)) = t >= static_cast<size_t>(j)
                                                          ? frame.lwi[t - static_cast<size_t>(j)]
                                                          : missing();
            return X;
        }
        case ModelSpec::Kind::Har: {
            DataMatrix X(n, spec.har_windows.size());
            for (size_t w = 0; w < spec.har_windows.size(); ++w) {
                X.names.push_back("LWI_mean_w" + std::to_string(spec.har_windows[w]));
                const auto col = rolling_stat(frame.lwi, spec.har_windows[w], RollKind::Mean);
                for (size_t t = 0; t < n; ++t) X.at(t, w) = col[t];
            }
            return X;
        }
        case ModelSpec::Kind::Gbt: {
            const std::vector<std::string>& wanted =
                spec.gbt_features.empty() ? FeatureSpec::consensus_default().features
                                          : spec.gbt_features;
            DataMatrix X(n, wanted.size());
            X.names = wanted;
            for (size_t c = 0; c < wanted.size(); ++c) {
                const auto* col = frame.column(wanted[c]);
                if (col == nullptr)
                    throw ConfigError("run_experiment: frame lacks feature '" + wanted[c] + "'");
                for (size_t t = 0; t < n; ++t) X.at(t, c) = (*col)[t];
            }
            return X;
        }
    }
    throw InternalError("full_design: unreachable");
}

bool row_complete(const DataMatrix& X, size_t t) {
    const double* row = X.row(t);
    for (size_t c = 0; c < X.n_cols; ++c)
        if (is_missing(row[c])) return false;
    return true;
}

} // namespace

EvalReport run_experiment(const FeatureFrame& frame, const std::vector<ModelSpec>& models,
                          const std::vector<int>& horizons, const PlanParams& plan_params,
                          uint64_t seed, const ForecastSink* sink) {
    if (models.empty()) throw ConfigError("run_experiment: no models requested");
    if (horizons.empty()) throw ConfigError("run_experiment: no horizons requested");

    EvalReport report;
    if (frame.rows() >= 2) report.bin_ns = frame.bin_start[1] - frame.bin_start[0];

    std::vector<DataMatrix> designs;
    designs.reserve(models.size());
    for (const auto& spec : models) designs.push_back(full_design(frame, spec));

    for (int k : horizons) {
        auto target_it = frame.targets.find(k);
        if (target_it == frame.targets.end())
            throw ConfigError("run_experiment: frame has no target for horizon " +
                              std::to_string(k));
        const std::vector<double>& target = target_it->second;

        // One common row set per horizon keeps every model on the same folds.
        std::vector<size_t> rows;
        for (size_t t = 0; t < frame.rows(); ++t) {
            if (!frame.modelable[t] || is_missing(target[t])) continue;
            bool ok = true;
            for (const auto& X : designs)
                if (!row_complete(X, t)) {
                    ok = false;
                    break;
                }
            if (ok) rows.push_back(t);
        }

        WalkForwardPlan plan;
        try {
            const size_t initial =
                static_cast<size_t>(plan_params.initial_train_frac *
                                    static_cast<double>(rows.size()));
            plan = make_plan(rows.size(), plan_params.n_folds, plan_params.embargo_bins,
                             std::max<size_t>(initial, 1));
        } catch (const ConfigError& e) {
            for (const auto& spec : models)
                report.failures.push_back({frame.symbol, spec.name, k, e.what()});
            continue;
        }

        std::vector<double> y(rows.size());
        for (size_t i = 0; i < rows.size(); ++i) y[i] = target[rows[i]];

        for (size_t m = 0; m < models.size(); ++m) {
            const ModelSpec& spec = models[m];
            const DataMatrix X = designs[m].take_rows(rows);
            try {
                for (size_t f = 0; f < plan.folds.size(); ++f) {
                    const FoldPlan& fold = plan.folds[f];

                    std::vector<size_t> train_idx(fold.train_end - fold.train_begin);
                    std::iota(train_idx.begin(), train_idx.end(), fold.train_begin);
                    std::vector<size_t> test_idx(fold.test_end - fold.test_begin);
                    std::iota(test_idx.begin(), test_idx.end(), fold.test_begin);

                    DataMatrix X_train = X.take_rows(train_idx);
                    DataMatrix X_test = X.take_rows(test_idx);
                    std::vector<double> y_train, y_test;
                    y_train.reserve(train_idx.size());
                    y_test.reserve(test_idx.size());
                    for (size_t i : train_idx) y_train.push_back(y[i]);
                    for (size_t i : test_idx) y_test.push_back(y[i]);

                    std::vector<double> y_pred;
                    if (spec.kind == ModelSpec::Kind::Gbt) {
                        GbtParams gp = spec.gbt;
                        gp.seed = derive_seed(seed, (m * 64 + static_cast<size_t>(k)) * 16 + f);
                        y_pred = predict(gbt_fit(X_train, y_train, gp), X_test);
                    } else {
                        y_pred = predict(ols_fit(X_train, y_train), X_test);
                    }

                    std::vector<double> resid(y_test.size());
                    for (size_t i = 0; i < y_test.size(); ++i) resid[i] = y_test[i] - y_pred[i];

                    EvalRow row;
                    row.symbol = frame.symbol;
                    row.model = spec.name;
                    row.horizon = k;
                    row.fold = static_cast<int>(f);
                    row.n_test = y_test.size();
                    row.r2 = r2_score(y_test, y_pred);
                    row.rmse = rmse(y_test, y_pred);
                    row.resid_mean = std::accumulate(resid.begin(), resid.end(), 0.0) /
                                     static_cast<double>(resid.size());
                    row.resid_skew = skewness(resid);
                    report.rows.push_back(std::move(row));

                    if (sink != nullptr) {
                        std::vector<int64_t> ts;
                        ts.reserve(test_idx.size());
                        for (size_t i : test_idx) ts.push_back(frame.bin_start[rows[i]]);
                        (*sink)(frame.symbol, spec.name, k, static_cast<int>(f), ts, y_test,
                                y_pred);
                    }
                }
            } catch (const std::runtime_error& e) {
                // Drop partial fold rows for this cell and record the reason.
                std::erase_if(report.rows, [&](const EvalRow& r) {
                    return r.symbol == frame.symbol && r.model == spec.name && r.horizon == k;
                });
                report.failures.push_back({frame.symbol, spec.name, k, e.what()});
            }
        }
    }
    return report;
}

std::vector<EvalSummary> EvalReport::summaries() const {
    // Preserve first-appearance order of (symbol, model, horizon) cells.
    std::vector<EvalSummary> out;
    std::map<std::tuple<std::string, std::string, int>, size_t> index;
    for (const auto& row : rows) {
        const auto key = std::make_tuple(row.symbol, row.model, row.horizon);
        auto it = index.find(key);
        if (it == index.end()) {
            index.emplace(key, out.size());
            out.push_back({row.symbol, row.model, row.horizon, 0.0, 0.0, 0});
            it = index.find(key);
        }
        EvalSummary& s = out[it->second];
        s.mean_r2 += row.r2;
        s.mean_rmse += row.rmse;
        ++s.n_folds;
    }
    for (auto& s : out) {
        s.mean_r2 /= std::max(1, s.n_folds);
        s.mean_rmse /= std::max(1, s.n_folds);
    }
    return out;
}

namespace {

void append_num(std::string& buf, double v) {
    char tmp[32];
    const int len = std::snprintf(tmp, sizeof(tmp), "%.6f", v);
    buf.append(tmp, static_cast<size_t>(len));
}

} // namespace

void write_report_csv(std::ostream& out, const EvalReport& report) {
    out << "symbol,model,horizon_ms,fold,n_test,r2,rmse,resid_mean,resid_skew\n";
    const int64_t ms = report.bin_ns / 1'000'000;
    std::string buf;
    for (const auto& row : report.rows) {
        buf.clear();
        buf += row.symbol;
        buf += ',';
        buf += row.model;
        buf += ',';
        buf += std::to_string(row.horizon * ms);
        buf += ',';
        buf += std::to_string(row.fold);
        buf += ',';
        buf += std::to_string(row.n_test);
        buf += ',';
        append_num(buf, row.r2);
        buf += ',';
        append_num(buf, row.rmse);
        buf += ',';
        append_num(buf, row.resid_mean);
        buf += ',';
        append_num(buf, row.resid_skew);
        buf += '\n';
        out << buf;
    }
}

void write_report_csv_file(const std::string& path, const EvalReport& report) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write report csv: " + path);
    write_report_csv(out, report);
}

void write_summary_csv(std::ostream& out, const EvalReport& report) {
    const auto sums = report.summaries();
    const int64_t ms = report.bin_ns / 1'000'000;

    std::vector<int> horizons;
    for (const auto& s : sums)
        if (std::find(horizons.begin(), horizons.end(), s.horizon) == horizons.end())
            horizons.push_back(s.horizon);
    std::sort(horizons.begin(), horizons.end());

    out << "symbol,model";
    for (int k : horizons) out << ",r2_" << k * ms << "ms";
    for (int k : horizons) out << ",rmse_" << k * ms << "ms";
    out << '\n';

    // Row per (symbol, model) in first-appearance order.
    std::vector<std::pair<std::string, std::string>> keys;
    for (const auto& s : sums) {
        const auto key = std::make_pair(s.symbol, s.model);
        if (std::find(keys.begin(), keys.end(), key) == keys.end()) keys.push_back(key);
    }
    std::string buf;
    for (const auto& [symbol, model] : keys) {
        buf.clear();
        buf += symbol;
        buf += ',';
        buf += model;
        for (bool want_rmse : {false, true}) {
            for (int k : horizons) {
                buf += ',';
                bool found = false;
                for (const auto& s : sums) {
                    if (s.symbol == symbol && s.model == model && s.horizon == k) {
                        append_num(buf, want_rmse ? s.mean_rmse : s.mean_r2);
                        found = true;
                        break;
                    }
                }
                if (!found) buf += "";
            }
        }
        buf += '\n';
        out << buf;
    }
}

void write_summary_csv_file(const std::string& path, const EvalReport& report) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write summary csv: " + path);
    write_summary_csv(out, report);
}

} // namespace lwi
