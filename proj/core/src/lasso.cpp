#include "lwi/errors.hpp"
#include "lwi/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace lwi {

namespace {

constexpr double kTol = 1e-8;
constexpr int kMaxSweeps = 100000;

struct Standardized {
    std::vector<double> z;     // n x p, column-major for cache-friendly sweeps
    std::vector<double> mean;  // per column
    std::vector<double> scale; // population sd; 0 marks a constant column
    std::vector<double> yc;    // centered target
    double y_mean = 0.0;
    size_t n = 0, p = 0;
};

Standardized standardize(const DataMatrix& X, const std::vector<double>& y) {
    if (X.n_rows != y.size()) throw DataError("lasso: X/y length mismatch");
    if (X.n_rows == 0 || X.n_cols == 0) throw DataError("lasso: empty problem");
    for (double v : X.data)
        if (!std::isfinite(v)) throw DataError("lasso: non-finite value in X");
    for (double v : y)
        if (!std::isfinite(v)) throw DataError("lasso: non-finite value in y");

    Standardized s;
    s.n = X.n_rows;
    s.p = X.n_cols;
    s.z.assign(s.n * s.p, 0.0);
    s.mean.assign(s.p, 0.0);
    s.scale.assign(s.p, 0.0);

    const double dn = static_cast<double>(s.n);
    s.y_mean = std::accumulate(y.begin(), y.end(), 0.0) / dn;
    s.yc.resize(s.n);
    for (size_t i = 0; i < s.n; ++i) s.yc[i] = y[i] - s.y_mean;

    for (size_t j = 0; j < s.p; ++j) {
        double m = 0.0;
        for (size_t i = 0; i < s.n; ++i) m += X.at(i, j);
        m /= dn;
        double ss = 0.0;
        for (size_t i = 0; i < s.n; ++i) {
            const double d = X.at(i, j) - m;
            ss += d * d;
        }
        const double sd = std::sqrt(ss / dn);
        s.mean[j] = m;
        s.scale[j] = sd;
        if (sd > 0.0) {
            double* col = &s.z[j * s.n];
            for (size_t i = 0; i < s.n; ++i) col[i] = (X.at(i, j) - m) / sd;
        }
    }
    return s;
}

inline double soft_threshold(double v, double lambda) {
    if (v > lambda) return v - lambda;
    if (v < -lambda) return v + lambda;
    return 0.0;
}

} // namespace

double lasso_lambda_max(const DataMatrix& X, const std::vector<double>& y) {
    const Standardized s = standardize(X, y);
    double lmax = 0.0;
    for (size_t j = 0; j < s.p; ++j) {
        if (s.scale[j] == 0.0) continue;
        const double* col = &s.z[j * s.n];
        double dot = 0.0;
        for (size_t i = 0; i < s.n; ++i) dot += col[i] * s.yc[i];
        lmax = std::max(lmax, std::abs(dot) / static_cast<double>(s.n));
    }
    return lmax;
}

std::vector<double> lasso_lambda_grid(double lambda_max, int count, double ratio) {
    if (count < 2 || lambda_max <= 0 || ratio <= 0 || ratio >= 1)
        throw ConfigError("lasso_lambda_grid: bad arguments");
    std::vector<double> grid(static_cast<size_t>(count));
    const double step = std::log(ratio) / (count - 1);
    for (int i = 0; i < count; ++i) grid[static_cast<size_t>(i)] = lambda_max * std::exp(step * i);
    return grid;
}

LassoPath lasso_path(const DataMatrix& X, const std::vector<double>& y,
                     const std::vector<double>& lambdas) {
    if (lambdas.empty()) throw ConfigError("lasso_path: empty lambda path");
    for (size_t i = 1; i < lambdas.size(); ++i)
        if (!(lambdas[i] < lambdas[i - 1]))
            throw ConfigError("lasso_path: lambdas must be strictly decreasing");
    for (double l : lambdas)
        if (!(l >= 0) || !std::isfinite(l)) throw ConfigError("lasso_path: bad lambda");

    const Standardized s = standardize(X, y);
    const double dn = static_cast<double>(s.n);

    // With unit-variance columns, z_j' z_j / n == 1, so each coordinate
    // update is a plain soft threshold of the partial correlation.
    std::vector<double> beta(s.p, 0.0);
    std::vector<double> resid = s.yc;

    LassoPath path;
    path.lambdas = lambdas;
    path.coefs.reserve(lambdas.size());
    path.intercepts.reserve(lambdas.size());

    for (double lambda : lambdas) {
        int sweeps = 0;
        while (true) {
            double max_change = 0.0;
            for (size_t j = 0; j < s.p; ++j) {
                if (s.scale[j] == 0.0) continue;
                const double* col = &s.z[j * s.n];
                double dot = 0.0;
                for (size_t i = 0; i < s.n; ++i) dot += col[i] * resid[i];
                const double rho = dot / dn + beta[j];
                const double next = soft_threshold(rho, lambda);
                const double delta = next - beta[j];
                if (delta != 0.0) {
                    for (size_t i = 0; i < s.n; ++i) resid[i] -= delta * col[i];
                    beta[j] = next;
                    max_change = std::max(max_change, std::abs(delta));
                }
            }
            ++sweeps;
            if (max_change < kTol) break;
            if (sweeps >= kMaxSweeps)
                throw InternalError("lasso_path: coordinate descent failed to converge");
        }

        std::vector<double> orig(s.p, 0.0);
        double intercept = s.y_mean;
        for (size_t j = 0; j < s.p; ++j) {
            if (s.scale[j] == 0.0) continue;
            orig[j] = beta[j] / s.scale[j];
            intercept -= orig[j] * s.mean[j];
        }
        path.coefs.push_back(std::move(orig));
        path.intercepts.push_back(intercept);
        path.iterations.push_back(sweeps);
    }
    return path;
}

} // namespace lwi
