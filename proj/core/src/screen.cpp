#include "lwi/errors.hpp"
#include "lwi/rng.hpp"
#include "lwi/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <ostream>
#include <set>

namespace lwi {

namespace {

// Sort scores descending, break ties by column order, truncate to top_k.
MethodRanking rank_by_score(std::string method, const std::vector<std::string>& names,
                            const std::vector<double>& scores, int top_k) {
    std::vector<size_t> order(names.size());
    std::iota(order.begin(), order.end(), size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](size_t a, size_t b) { return scores[a] > scores[b]; });

    MethodRanking ranking;
    ranking.method = std::move(method);
    const size_t keep = std::min(static_cast<size_t>(top_k), order.size());
    for (size_t i = 0; i < keep; ++i)
        ranking.ranked.emplace_back(names[order[i]], scores[order[i]]);
    return ranking;
}

} // namespace

ScreenResult screen_features(const FeatureFrame& frame, int horizon, const ScreenParams& params) {
    if (params.top_k < 1) throw ConfigError("screen_features: top_k must be >= 1");
    auto target_it = frame.targets.find(horizon);
    if (target_it == frame.targets.end())
        throw ConfigError("screen_features: frame has no target for horizon " +
                          std::to_string(horizon));
    const std::vector<double>& target = target_it->second;

    // Complete modelable rows only.
    std::vector<size_t> rows;
    for (size_t t = 0; t < frame.rows(); ++t) {
        if (!frame.modelable[t] || is_missing(target[t])) continue;
        bool ok = true;
        for (const auto& col : frame.columns)
            if (is_missing(col[t])) {
                ok = false;
                break;
            }
        if (ok) rows.push_back(t);
    }
    if (rows.size() < 100) throw DataError("screen_features: too few modelable rows");

    const size_t p = frame.names.size();
    DataMatrix X(rows.size(), p);
    X.names = frame.names;
    std::vector<double> y(rows.size());
    for (size_t i = 0; i < rows.size(); ++i) {
        y[i] = target[rows[i]];
        for (size_t c = 0; c < p; ++c) X.at(i, c) = frame.columns[c][rows[i]];
    }

    ScreenResult result;
    result.symbol = frame.symbol;
    result.horizon = horizon;

    // Mutual information.
    {
        std::vector<double> scores(p, 0.0);
        std::vector<double> col(rows.size());
        for (size_t c = 0; c < p; ++c) {
            for (size_t i = 0; i < rows.size(); ++i) col[i] = X.at(i, c);
            scores[c] = mutual_information(col, y, params.mi_bins);
        }
        result.methods.push_back(rank_by_score("mi", frame.names, scores, params.top_k));
    }

    // GBT gain importance at the modeling defaults.
    {
        GbtParams gp = params.gbt;
        gp.seed = derive_seed(params.seed, 0x67627400);
        GbtModel model = gbt_fit(X, y, gp);
        result.methods.push_back(
            rank_by_score("gbt", frame.names, model.feature_gain, params.top_k));
    }

    // |lasso coefficient| at the lambda chosen by contiguous k-fold CV.
    {
        const double lmax = lasso_lambda_max(X, y);
        if (lmax <= 0.0) {
            // Target is orthogonal to every standardized column; score zeros.
            result.methods.push_back(
                rank_by_score("lasso", frame.names, std::vector<double>(p, 0.0), params.top_k));
        } else {
            const auto grid = lasso_lambda_grid(lmax);
            const int folds = std::max(2, params.cv_folds);
            std::vector<double> cv_mse(grid.size(), 0.0);
            const size_t n = rows.size();
            for (int f = 0; f < folds; ++f) {
                const size_t lo = n * static_cast<size_t>(f) / static_cast<size_t>(folds);
                const size_t hi = n * static_cast<size_t>(f + 1) / static_cast<size_t>(folds);
                if (hi <= lo) continue;
                std::vector<size_t> train_rows;
                train_rows.reserve(n - (hi - lo));
                for (size_t i = 0; i < n; ++i)
                    if (i < lo || i >= hi) train_rows.push_back(i);

                DataMatrix Xt = X.take_rows(train_rows);
                std::vector<double> yt(train_rows.size());
                for (size_t i = 0; i < train_rows.size(); ++i) yt[i] = y[train_rows[i]];

                const LassoPath path = lasso_path(Xt, yt, grid);
                for (size_t g = 0; g < grid.size(); ++g) {
                    double mse = 0.0;
                    for (size_t i = lo; i < hi; ++i) {
                        double pred = path.intercepts[g];
                        for (size_t c = 0; c < p; ++c) pred += path.coefs[g][c] * X.at(i, c);
                        const double e = y[i] - pred;
                        mse += e * e;
                    }
                    cv_mse[g] += mse / static_cast<double>(hi - lo);
                }
            }
            size_t best_g = 0;
            for (size_t g = 1; g < grid.size(); ++g)
                if (cv_mse[g] < cv_mse[best_g]) best_g = g;

            const LassoPath path = lasso_path(X, y, grid);
            std::vector<double> scores(p, 0.0);
            for (size_t c = 0; c < p; ++c) scores[c] = std::abs(path.coefs[best_g][c]);
            result.methods.push_back(rank_by_score("lasso", frame.names, scores, params.top_k));
        }
    }
    return result;
}

std::vector<ConsensusRow> consensus(const std::vector<ScreenResult>& per_symbol,
                                    double threshold) {
    if (per_symbol.empty()) throw ConfigError("consensus: need at least one symbol");
    if (!(threshold > 0.0) || threshold > 1.0)
        throw ConfigError("consensus: threshold must be in (0, 1]");

    struct Tally {
        std::set<std::string> symbols;
        int method_hits = 0;
        std::map<std::string, int> best_rank; // per symbol
    };
    std::map<std::string, Tally> tallies;

    for (const auto& screen : per_symbol) {
        for (const auto& method : screen.methods) {
            for (size_t i = 0; i < method.ranked.size(); ++i) {
                const int rank = static_cast<int>(i) + 1;
                Tally& tally = tallies[method.ranked[i].first];
                tally.symbols.insert(screen.symbol);
                ++tally.method_hits;
                auto [it, inserted] = tally.best_rank.emplace(screen.symbol, rank);
                if (!inserted) it->second = std::min(it->second, rank);
            }
        }
    }

    const double total = static_cast<double>(per_symbol.size());
    std::vector<ConsensusRow> rows;
    rows.reserve(tallies.size());
    for (const auto& [feature, tally] : tallies) {
        ConsensusRow row;
        row.feature = feature;
        row.n_symbols = static_cast<int>(tally.symbols.size());
        row.method_hits = tally.method_hits;
        double sum = 0.0;
        for (const auto& [sym, rank] : tally.best_rank) sum += rank;
        row.mean_best_rank = sum / static_cast<double>(tally.best_rank.size());
        row.consensus = static_cast<double>(row.n_symbols) / total >= threshold - 1e-12;
        rows.push_back(std::move(row));
    }
    std::sort(rows.begin(), rows.end(), [](const ConsensusRow& a, const ConsensusRow& b) {
        if (a.mean_best_rank != b.mean_best_rank) return a.mean_best_rank < b.mean_best_rank;
        return a.feature < b.feature;
    });
    return rows;
}

void write_consensus_csv(std::ostream& out, const std::vector<ConsensusRow>& rows) {
    out << "feature,n_symbols,mean_best_rank,method_hits,consensus\n";
    char buf[64];
    for (const auto& row : rows) {
        std::snprintf(buf, sizeof(buf), "%.2f", row.mean_best_rank);
        out << row.feature << ',' << row.n_symbols << ',' << buf << ',' << row.method_hits << ','
            << (row.consensus ? "Yes" : "No") << '\n';
    }
}

void write_consensus_csv_file(const std::string& path, const std::vector<ConsensusRow>& rows) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write consensus csv: " + path);
    write_consensus_csv(out, rows);
}

} // namespace lwi
