#include "lwi/errors.hpp"
#include "lwi/models.hpp"
#include "lwi/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace lwi {

namespace {

constexpr double kHessFloor = 1e-6;
constexpr double kMinGain = 1e-12;

// Linear-interpolation sample quantile on a scratch copy.
double quantile_of(std::vector<double> v, double tau) {
    if (v.empty()) throw InternalError("gbt: quantile of empty set");
    std::sort(v.begin(), v.end());
    const double pos = tau * static_cast<double>(v.size() - 1);
    const size_t lo = static_cast<size_t>(pos);
    if (lo + 1 >= v.size()) return v.back();
    const double frac = pos - static_cast<double>(lo);
    return v[lo] + frac * (v[lo + 1] - v[lo]);
}

struct LossSpec {
    GbtLoss kind;
    double delta; // Huber
    double tau;   // Quantile

    double base_score(const std::vector<double>& y) const {
        if (kind == GbtLoss::Quantile) return quantile_of(y, tau);
        return std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(y.size());
    }

    // r = y - pred
    double grad(double r) const {
        switch (kind) {
            case GbtLoss::SquaredError: return -r;
            case GbtLoss::Huber: return -std::clamp(r, -delta, delta);
            case GbtLoss::Quantile: return r > 0 ? -tau : (1.0 - tau);
        }
        return 0.0;
    }

    double hess(double r) const {
        switch (kind) {
            case GbtLoss::SquaredError: return 1.0;
            case GbtLoss::Huber: return std::abs(r) <= delta ? 1.0 : 0.0;
            case GbtLoss::Quantile: return 0.0; // floored where used
        }
        return 0.0;
    }

    double loss(double r) const {
        switch (kind) {
            case GbtLoss::SquaredError: return 0.5 * r * r;
            case GbtLoss::Huber:
                return std::abs(r) <= delta ? 0.5 * r * r : delta * (std::abs(r) - 0.5 * delta);
            case GbtLoss::Quantile: return r >= 0 ? tau * r : (tau - 1.0) * r;
        }
        return 0.0;
    }
};

// Quantile candidate thresholds per feature, deduplicated; bin(x) is the
// index of the first threshold >= x, so "bin <= i" and "x <= threshold[i]"
// pick out the same rows.
struct Binning {
    std::vector<std::vector<double>> thresholds; // per feature, ascending
    std::vector<uint16_t> bins;                  // n_rows x n_features
    size_t n_rows = 0, n_features = 0;

    uint16_t bin_of(size_t row, size_t feature) const { return bins[row * n_features + feature]; }
};

Binning make_binning(const DataMatrix& X, int max_bins) {
    Binning b;
    b.n_rows = X.n_rows;
    b.n_features = X.n_cols;
    b.thresholds.resize(X.n_cols);
    b.bins.assign(X.n_rows * X.n_cols, 0);

    std::vector<double> sorted(X.n_rows);
    for (size_t f = 0; f < X.n_cols; ++f) {
        for (size_t r = 0; r < X.n_rows; ++r) sorted[r] = X.at(r, f);
        std::sort(sorted.begin(), sorted.end());

        auto& thr = b.thresholds[f];
        for (int q = 1; q < max_bins; ++q) {
            const size_t pos = static_cast<size_t>(q) * X.n_rows / static_cast<size_t>(max_bins);
            if (pos >= X.n_rows) break;
            const double v = sorted[pos];
            if (thr.empty() || v > thr.back()) thr.push_back(v);
        }
        // Drop a trailing threshold equal to the maximum: it cannot separate.
        if (!thr.empty() && thr.back() >= sorted.back()) thr.pop_back();

        for (size_t r = 0; r < X.n_rows; ++r) {
            const double v = X.at(r, f);
            const auto it = std::lower_bound(thr.begin(), thr.end(), v);
            b.bins[r * X.n_cols + f] = static_cast<uint16_t>(it - thr.begin());
        }
    }
    return b;
}

struct SplitChoice {
    double gain = 0.0;
    int feature = -1;
    int threshold_idx = -1;
};

class TreeGrower {
public:
    TreeGrower(const Binning& binning, const std::vector<double>& grad,
               const std::vector<double>& hess, const GbtParams& params)
        : binning_(binning), grad_(grad), hess_(hess), params_(params) {}

    // rows: workspace of sampled row ids, partitioned in place as the tree
    // grows. Returns the structural tree; leaf values are filled in later.
    GbtTree grow(std::vector<uint32_t>& rows) {
        tree_.nodes.clear();
        build(rows, 0, rows.size(), 0);
        return std::move(tree_);
    }

private:
    int build(std::vector<uint32_t>& rows, size_t begin, size_t end, int depth) {
        const int node_id = static_cast<int>(tree_.nodes.size());
        tree_.nodes.emplace_back();

        const size_t count = end - begin;
        if (depth >= params_.max_depth || count < 2 * static_cast<size_t>(params_.min_leaf))
            return node_id;

        SplitChoice best = find_split(rows, begin, end);
        if (best.feature < 0) return node_id;

        const auto f = static_cast<size_t>(best.feature);
        const auto thr_idx = static_cast<uint16_t>(best.threshold_idx);
        auto mid_it = std::stable_partition(
            rows.begin() + static_cast<std::ptrdiff_t>(begin),
            rows.begin() + static_cast<std::ptrdiff_t>(end),
            [&](uint32_t r) { return binning_.bin_of(r, f) <= thr_idx; });
        const size_t mid = static_cast<size_t>(mid_it - rows.begin());

        tree_.nodes[static_cast<size_t>(node_id)].feature = best.feature;
        tree_.nodes[static_cast<size_t>(node_id)].threshold =
            binning_.thresholds[f][static_cast<size_t>(best.threshold_idx)];
        tree_.nodes[static_cast<size_t>(node_id)].gain = best.gain;

        const int left = build(rows, begin, mid, depth + 1);
        const int right = build(rows, mid, end, depth + 1);
        tree_.nodes[static_cast<size_t>(node_id)].left = left;
        tree_.nodes[static_cast<size_t>(node_id)].right = right;
        return node_id;
    }

    SplitChoice find_split(const std::vector<uint32_t>& rows, size_t begin, size_t end) {
        double g_total = 0.0, h_total = 0.0;
        for (size_t i = begin; i < end; ++i) {
            g_total += grad_[rows[i]];
            h_total += hess_[rows[i]];
        }
        const double parent_score =
            g_total * g_total / std::max(h_total, kHessFloor);
        const size_t count = end - begin;

        SplitChoice best;
        for (size_t f = 0; f < binning_.n_features; ++f) {
            const auto& thr = binning_.thresholds[f];
            if (thr.empty()) continue;
            const size_t n_bins = thr.size() + 1;

            hist_g_.assign(n_bins, 0.0);
            hist_h_.assign(n_bins, 0.0);
            hist_c_.assign(n_bins, 0);
            for (size_t i = begin; i < end; ++i) {
                const uint32_t r = rows[i];
                const uint16_t bn = binning_.bin_of(r, f);
                hist_g_[bn] += grad_[r];
                hist_h_[bn] += hess_[r];
                ++hist_c_[bn];
            }

            double gl = 0.0, hl = 0.0;
            size_t cl = 0;
            // Candidate i sends bins [0, i] left. Strictly-greater comparison
            // keeps the lowest feature and threshold on ties.
            for (size_t i = 0; i + 1 < n_bins; ++i) {
                gl += hist_g_[i];
                hl += hist_h_[i];
                cl += hist_c_[i];
                if (cl < static_cast<size_t>(params_.min_leaf)) continue;
                const size_t cr = count - cl;
                if (cr < static_cast<size_t>(params_.min_leaf)) break;
                const double gr = g_total - gl;
                const double hr = h_total - hl;
                const double gain = gl * gl / std::max(hl, kHessFloor) +
                                    gr * gr / std::max(hr, kHessFloor) - parent_score;
                if (gain > best.gain + kMinGain) {
                    best.gain = gain;
                    best.feature = static_cast<int>(f);
                    best.threshold_idx = static_cast<int>(i);
                }
            }
        }
        return best;
    }

    const Binning& binning_;
    const std::vector<double>& grad_;
    const std::vector<double>& hess_;
    const GbtParams& params_;
    GbtTree tree_;
    std::vector<double> hist_g_, hist_h_;
    std::vector<uint32_t> hist_c_;
};

int route_row(const GbtTree& tree, const Binning& binning, size_t row) {
    int node = 0;
    while (tree.nodes[static_cast<size_t>(node)].feature >= 0) {
        const auto& nd = tree.nodes[static_cast<size_t>(node)];
        const auto f = static_cast<size_t>(nd.feature);
        // Equivalent to X(row, f) <= nd.threshold by construction of bins.
        const auto& thr = binning.thresholds[f];
        const auto it = std::lower_bound(thr.begin(), thr.end(), nd.threshold);
        node = binning.bin_of(row, f) <= static_cast<uint16_t>(it - thr.begin()) ? nd.left
                                                                                 : nd.right;
    }
    return node;
}

} // namespace

GbtModel gbt_fit(const DataMatrix& X, const std::vector<double>& y, const GbtParams& params) {
    if (X.n_rows != y.size()) throw DataError("gbt_fit: X/y length mismatch");
    if (X.n_rows < 2 * static_cast<size_t>(params.min_leaf))
        throw DataError("gbt_fit: need at least 2*min_leaf rows");
    if (params.n_trees < 0 || params.max_depth < 1 || params.min_leaf < 1 ||
        params.histogram_bins < 2 || params.learning_rate <= 0 || params.subsample <= 0 ||
        params.subsample > 1)
        throw ConfigError("gbt_fit: bad hyperparameters");
    for (double v : X.data)
        if (!std::isfinite(v)) throw DataError("gbt_fit: non-finite value in X");
    for (double v : y)
        if (!std::isfinite(v)) throw DataError("gbt_fit: non-finite value in y");

    const LossSpec loss{params.loss, params.huber_delta, params.quantile_tau};
    const size_t n = X.n_rows;

    GbtModel model;
    model.learning_rate = params.learning_rate;
    model.loss = params.loss;
    model.feature_names = X.names;
    model.base_score = loss.base_score(y);
    model.feature_gain.assign(X.n_cols, 0.0);

    std::vector<double> pred(n, model.base_score);
    auto mean_loss = [&] {
        double acc = 0.0;
        for (size_t i = 0; i < n; ++i) acc += loss.loss(y[i] - pred[i]);
        return acc / static_cast<double>(n);
    };
    model.train_loss.push_back(mean_loss()); // loss of the bare base score

    if (params.n_trees == 0) return model;

    const Binning binning = make_binning(X, params.histogram_bins);
    Rng rng(params.seed);

    std::vector<double> grad(n), hess(n);
    std::vector<uint32_t> sample_buf(n);
    const size_t sample_size =
        std::max<size_t>(static_cast<size_t>(params.subsample * static_cast<double>(n)),
                         2 * static_cast<size_t>(params.min_leaf));

    std::vector<double> leaf_resid; // scratch for quantile leaves

    for (int t = 0; t < params.n_trees; ++t) {
        for (size_t i = 0; i < n; ++i) {
            const double r = y[i] - pred[i];
            grad[i] = loss.grad(r);
            hess[i] = loss.hess(r);
        }

        std::iota(sample_buf.begin(), sample_buf.end(), 0u);
        if (sample_size < n) {
            // Partial Fisher-Yates: the first sample_size entries are a
            // uniform draw without replacement.
            for (size_t i = 0; i < sample_size; ++i) {
                const size_t j = i + static_cast<size_t>(rng.uniform_u64(n - i));
                std::swap(sample_buf[i], sample_buf[j]);
            }
        }
        std::vector<uint32_t> rows(sample_buf.begin(),
                                   sample_buf.begin() + static_cast<std::ptrdiff_t>(
                                                            std::min(sample_size, n)));
        std::sort(rows.begin(), rows.end()); // canonical order for reproducible sums

        TreeGrower grower(binning, grad, hess, params);
        GbtTree tree = grower.grow(rows);

        // Leaf values are refitted on the full training set routed through
        // the tree, which keeps each boosting step a true descent step on
        // the training loss regardless of subsampling.
        const size_t n_nodes = tree.nodes.size();
        std::vector<double> leaf_g(n_nodes, 0.0), leaf_h(n_nodes, 0.0);
        std::vector<double> leaf_min(n_nodes, std::numeric_limits<double>::infinity());
        std::vector<double> leaf_max(n_nodes, -std::numeric_limits<double>::infinity());
        std::vector<std::vector<double>> leaf_members;
        if (params.loss == GbtLoss::Quantile) leaf_members.resize(n_nodes);
        std::vector<int> routed(n);
        for (size_t i = 0; i < n; ++i) {
            const int leaf = route_row(tree, binning, i);
            routed[i] = leaf;
            const double r = y[i] - pred[i];
            leaf_g[static_cast<size_t>(leaf)] += grad[i];
            leaf_h[static_cast<size_t>(leaf)] += hess[i];
            leaf_min[static_cast<size_t>(leaf)] = std::min(leaf_min[static_cast<size_t>(leaf)], r);
            leaf_max[static_cast<size_t>(leaf)] = std::max(leaf_max[static_cast<size_t>(leaf)], r);
            if (params.loss == GbtLoss::Quantile)
                leaf_members[static_cast<size_t>(leaf)].push_back(r);
        }
        for (size_t nd = 0; nd < n_nodes; ++nd) {
            GbtNode& node = tree.nodes[nd];
            if (node.feature >= 0) {
                model.feature_gain[static_cast<size_t>(node.feature)] += node.gain;
                continue;
            }
            if (leaf_min[nd] > leaf_max[nd]) {
                node.leaf_value = 0.0; // no training row reached this leaf
                continue;
            }
            if (params.loss == GbtLoss::Quantile) {
                node.leaf_value = quantile_of(std::move(leaf_members[nd]), params.quantile_tau);
            } else {
                // Newton step, clamped into the residual range so a floored
                // hessian cannot produce an escaping leaf.
                const double step = -leaf_g[nd] / std::max(leaf_h[nd], kHessFloor);
                node.leaf_value = std::clamp(step, leaf_min[nd], leaf_max[nd]);
            }
        }

        for (size_t i = 0; i < n; ++i)
            pred[i] += params.learning_rate *
                       tree.nodes[static_cast<size_t>(routed[i])].leaf_value;

        model.trees.push_back(std::move(tree));
        model.train_loss.push_back(mean_loss());
    }
    return model;
}

std::vector<double> predict(const GbtModel& model, const DataMatrix& X) {
    if (!model.feature_names.empty()) {
        if (X.n_cols != model.feature_names.size())
            throw DataError("predict: column count does not match gbt model");
        if (!X.names.empty() && X.names != model.feature_names)
            throw DataError("predict: column names do not match gbt model");
    }
    std::vector<double> out(X.n_rows, model.base_score);
    for (size_t r = 0; r < X.n_rows; ++r) {
        const double* row = X.row(r);
        double acc = model.base_score;
        for (const auto& tree : model.trees) {
            int node = 0;
            while (tree.nodes[static_cast<size_t>(node)].feature >= 0) {
                const auto& nd = tree.nodes[static_cast<size_t>(node)];
                node = row[static_cast<size_t>(nd.feature)] <= nd.threshold ? nd.left : nd.right;
            }
            acc += model.learning_rate * tree.nodes[static_cast<size_t>(node)].leaf_value;
        }
        out[r] = acc;
    }
    return out;
}

} // namespace lwi
