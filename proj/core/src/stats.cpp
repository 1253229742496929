#include "lwi/stats.hpp"

#include "lwi/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace lwi {

namespace {

struct OlsSolve {
    Eigen::VectorXd beta;
    double ssr = 0.0;
    Eigen::MatrixXd xtx_inv;
};

OlsSolve solve_ols(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, bool need_cov) {
    OlsSolve out;
    Eigen::MatrixXd xtx = X.transpose() * X;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(xtx);
    out.beta = ldlt.solve(X.transpose() * y);
    out.ssr = (y - X * out.beta).squaredNorm();
    if (need_cov)
        out.xtx_inv = ldlt.solve(Eigen::MatrixXd::Identity(X.cols(), X.cols()));
    return out;
}

// MacKinnon (2010) response-surface coefficients, constant-only regression,
// one variable: cv = b0 + b1/T + b2/T^2 + b3/T^3.
constexpr double kTauC[3][4] = {
    {-3.43035, -6.5393, -16.786, -79.433}, // 1%
    {-2.86154, -2.8903, -4.234, -40.040},  // 5%
    {-2.56677, -1.5384, -2.809, 0.0},      // 10%
};

double mackinnon_cv(int level, int nobs) {
    const double t = static_cast<double>(nobs);
    const double* b = kTauC[level];
    return b[0] + b[1] / t + b[2] / (t * t) + b[3] / (t * t * t);
}

} // namespace

int adf_default_max_lags(size_t n) {
    // Schwert's rule: ceil(12 * (n/100)^0.25), capped for tiny samples.
    int lag = static_cast<int>(std::ceil(12.0 * std::pow(static_cast<double>(n) / 100.0, 0.25)));
    int cap = static_cast<int>(n) / 2 - 2;
    return std::max(0, std::min(lag, cap));
}

AdfResult adf_test(const std::vector<double>& series, int max_lags) {
    if (max_lags < 0) throw ConfigError("adf_test: max_lags must be >= 0");
    const size_t n = series.size();
    if (n < 20 + static_cast<size_t>(max_lags))
        throw DataError("adf_test: series too short for requested max_lags");
    for (double v : series)
        if (!std::isfinite(v)) throw DataError("adf_test: series contains non-finite values");
    const auto [mn, mx] = std::minmax_element(series.begin(), series.end());
    if (*mn == *mx) throw DataError("adf_test: constant series, regression is singular");

    // Demeaning changes nothing in exact arithmetic (the constant term
    // absorbs it) but keeps the normal equations well conditioned for series
    // living far from zero.
    double mean = 0.0;
    for (double v : series) mean += v;
    mean /= static_cast<double>(n);
    std::vector<double> level(n);
    for (size_t t = 0; t < n; ++t) level[t] = series[t] - mean;

    const size_t m = n - 1; // first differences
    std::vector<double> diff(m);
    for (size_t t = 0; t < m; ++t) diff[t] = level[t + 1] - level[t];

    // Regression rows for lag order p, sample starting at `trim`:
    // endog  d[t]
    // exog   [1, y[t], d[t-1], ..., d[t-p]]   for t in [trim, m)
    auto build = [&](int p, size_t trim, Eigen::MatrixXd& X, Eigen::VectorXd& y) {
        const size_t rows = m - trim;
        X.resize(static_cast<Eigen::Index>(rows), 2 + p);
        y.resize(static_cast<Eigen::Index>(rows));
        for (size_t i = 0; i < rows; ++i) {
            const size_t t = trim + i;
            y(static_cast<Eigen::Index>(i)) = diff[t];
            X(static_cast<Eigen::Index>(i), 0) = 1.0;
            X(static_cast<Eigen::Index>(i), 1) = level[t];
            for (int j = 1; j <= p; ++j)
                X(static_cast<Eigen::Index>(i), 1 + j) = diff[t - static_cast<size_t>(j)];
        }
    };

    // Lag selection by AIC on the common sample trimmed at max_lags, so the
    // candidate fits are comparable. Ties go to the smaller order.
    int best_p = 0;
    {
        const size_t trim = static_cast<size_t>(max_lags);
        const double n_fix = static_cast<double>(m - trim);
        double best_aic = std::numeric_limits<double>::infinity();
        Eigen::MatrixXd X;
        Eigen::VectorXd y;
        build(max_lags, trim, X, y);
        for (int p = 0; p <= max_lags; ++p) {
            auto fit = solve_ols(X.leftCols(2 + p), y, false);
            const double aic = n_fix * std::log(fit.ssr / n_fix) + 2.0 * (p + 2);
            if (aic < best_aic) {
                best_aic = aic;
                best_p = p;
            }
        }
    }

    // Refit the winner on its own maximal sample.
    Eigen::MatrixXd X;
    Eigen::VectorXd y;
    build(best_p, static_cast<size_t>(best_p), X, y);
    auto fit = solve_ols(X, y, true);
    const int n_obs = static_cast<int>(X.rows());
    const int k = static_cast<int>(X.cols());
    const double sigma2 = fit.ssr / static_cast<double>(n_obs - k);
    const double se = std::sqrt(sigma2 * fit.xtx_inv(1, 1));

    AdfResult result;
    result.statistic = fit.beta(1) / se;
    result.lags_used = best_p;
    result.n_obs = n_obs;
    result.crit_1pct = mackinnon_cv(0, n_obs);
    result.crit_5pct = mackinnon_cv(1, n_obs);
    result.crit_10pct = mackinnon_cv(2, n_obs);
    result.reject_at_5pct = result.statistic < result.crit_5pct;
    return result;
}

AcfResult acf_pacf(const std::vector<double>& series, int max_lag) {
    if (max_lag < 1) throw ConfigError("acf_pacf: max_lag must be >= 1");
    const size_t n = series.size();
    if (n <= static_cast<size_t>(max_lag) + 1)
        throw DataError("acf_pacf: series too short for requested max_lag");

    const double mean = std::accumulate(series.begin(), series.end(), 0.0) / static_cast<double>(n);
    double c0 = 0.0;
    for (double v : series) c0 += (v - mean) * (v - mean);
    if (c0 == 0.0) throw DataError("acf_pacf: zero-variance series");

    AcfResult result;
    result.acf.assign(static_cast<size_t>(max_lag) + 1, 0.0);
    result.acf[0] = 1.0;
    for (int k = 1; k <= max_lag; ++k) {
        double ck = 0.0;
        for (size_t t = 0; t + static_cast<size_t>(k) < n; ++t)
            ck += (series[t] - mean) * (series[t + static_cast<size_t>(k)] - mean);
        result.acf[static_cast<size_t>(k)] = ck / c0;
    }

    // Durbin-Levinson recursion on the sample autocorrelations.
    result.pacf.assign(static_cast<size_t>(max_lag) + 1, 0.0);
    result.pacf[0] = 1.0;
    std::vector<double> phi_prev(static_cast<size_t>(max_lag) + 1, 0.0);
    std::vector<double> phi(static_cast<size_t>(max_lag) + 1, 0.0);
    for (int k = 1; k <= max_lag; ++k) {
        double num = result.acf[static_cast<size_t>(k)];
        double den = 1.0;
        for (int j = 1; j < k; ++j) {
            num -= phi_prev[static_cast<size_t>(j)] * result.acf[static_cast<size_t>(k - j)];
            den -= phi_prev[static_cast<size_t>(j)] * result.acf[static_cast<size_t>(j)];
        }
        const double phi_kk = den == 0.0 ? 0.0 : num / den;
        phi[static_cast<size_t>(k)] = phi_kk;
        for (int j = 1; j < k; ++j)
            phi[static_cast<size_t>(j)] = phi_prev[static_cast<size_t>(j)] -
                                          phi_kk * phi_prev[static_cast<size_t>(k - j)];
        result.pacf[static_cast<size_t>(k)] = phi_kk;
        phi_prev = phi;
    }

    result.conf_band = 1.96 / std::sqrt(static_cast<double>(n));
    return result;
}

double mutual_information(const std::vector<double>& x, const std::vector<double>& y, int bins) {
    if (bins < 2) throw ConfigError("mutual_information: bins must be >= 2");
    if (x.size() != y.size()) throw DataError("mutual_information: length mismatch");
    const size_t n = x.size();
    if (n < 100) throw DataError("mutual_information: need at least 100 observations");

    auto constant = [](const std::vector<double>& v) {
        auto [mn, mx] = std::minmax_element(v.begin(), v.end());
        return *mn == *mx;
    };
    if (constant(x) || constant(y)) return 0.0;

    // Rank-based equal-frequency bins: assignments depend only on the order
    // of the values (stable on ties), hence the monotone-transform invariance.
    const size_t b = static_cast<size_t>(bins);
    auto assign_bins = [&](const std::vector<double>& v) {
        std::vector<uint32_t> order(n);
        std::iota(order.begin(), order.end(), 0u);
        std::stable_sort(order.begin(), order.end(),
                         [&](uint32_t a, uint32_t c) { return v[a] < v[c]; });
        std::vector<uint32_t> bin(n);
        for (size_t r = 0; r < n; ++r) bin[order[r]] = static_cast<uint32_t>(r * b / n);
        return bin;
    };
    const auto bx = assign_bins(x);
    const auto by = assign_bins(y);

    std::vector<uint64_t> joint(b * b, 0), mx(b, 0), my(b, 0);
    for (size_t i = 0; i < n; ++i) {
        ++joint[bx[i] * b + by[i]];
        ++mx[bx[i]];
        ++my[by[i]];
    }

    const double dn = static_cast<double>(n);
    auto term = [&](size_t i, size_t j) {
        const uint64_t c = joint[i * b + j];
        if (c == 0) return 0.0;
        const double pij = static_cast<double>(c) / dn;
        const double pi = static_cast<double>(mx[i]) / dn;
        const double pj = static_cast<double>(my[j]) / dn;
        return pij * std::log(pij / (pi * pj));
    };
    // Summing unordered cell pairs keeps MI(x, y) bit-identical to MI(y, x):
    // swapping the arguments transposes the joint table, and IEEE addition
    // commutes within each pair.
    double mi = 0.0;
    for (size_t i = 0; i < b; ++i) {
        mi += term(i, i);
        for (size_t j = i + 1; j < b; ++j) mi += term(i, j) + term(j, i);
    }
    return std::max(mi, 0.0);
}

} // namespace lwi
