#include "lwi/errors.hpp"
#include "lwi/features.hpp"
#include "lwi/models.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

namespace lwi {

LinearFit ols_fit(const DataMatrix& X, const std::vector<double>& y) {
    if (X.n_rows != y.size()) throw DataError("ols_fit: X/y length mismatch");
    if (X.n_rows < X.n_cols + 1) throw DataError("ols_fit: fewer rows than coefficients");
    for (double v : X.data)
        if (!std::isfinite(v)) throw DataError("ols_fit: non-finite value in X");
    for (double v : y)
        if (!std::isfinite(v)) throw DataError("ols_fit: non-finite value in y");

    const Eigen::Index n = static_cast<Eigen::Index>(X.n_rows);
    const Eigen::Index p = static_cast<Eigen::Index>(X.n_cols) + 1;
    Eigen::MatrixXd A(n, p);
    A.col(0).setOnes();
    for (Eigen::Index r = 0; r < n; ++r)
        for (Eigen::Index c = 1; c < p; ++c)
            A(r, c) = X.at(static_cast<size_t>(r), static_cast<size_t>(c - 1));
    Eigen::Map<const Eigen::VectorXd> b(y.data(), n);

    LinearFit fit;
    fit.names = X.names;
    fit.n_train = X.n_rows;

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
    const auto& R = qr.matrixR();
    const double r_max = std::abs(R(0, 0));
    const double r_min = std::abs(R(p - 1, p - 1));
    const bool near_singular = qr.rank() < p || r_min <= 0.0 || r_max / r_min > 1e12;

    Eigen::VectorXd beta;
    if (!near_singular) {
        beta = qr.solve(b);
    } else {
        // Ridge jitter keeps degenerate designs (duplicate columns, constant
        // regressors) finite and deterministic.
        Eigen::MatrixXd ata = A.transpose() * A;
        ata.diagonal().array() += 1e-10;
        beta = Eigen::LDLT<Eigen::MatrixXd>(ata).solve(A.transpose() * b);
        fit.condition_warning = true;
    }

    fit.coefficients.assign(beta.data(), beta.data() + p);
    for (double c : fit.coefficients)
        if (!std::isfinite(c)) throw InternalError("ols_fit: non-finite coefficient");
    return fit;
}

std::vector<double> predict(const LinearFit& fit, const DataMatrix& X) {
    if (X.n_cols + 1 != fit.coefficients.size())
        throw DataError("predict: column count does not match fit");
    if (!fit.names.empty() && !X.names.empty() && fit.names != X.names)
        throw DataError("predict: column names do not match fit");
    std::vector<double> out(X.n_rows, fit.coefficients[0]);
    for (size_t r = 0; r < X.n_rows; ++r) {
        double acc = fit.coefficients[0];
        const double* row = X.row(r);
        for (size_t c = 0; c < X.n_cols; ++c) acc += fit.coefficients[c + 1] * row[c];
        out[r] = acc;
    }
    return out;
}

namespace {

// Mean of lwi over (t, t+k]; missing when the window leaves the series or
// touches a missing value.
std::vector<double> horizon_target(const std::vector<double>& lwi, int k) {
    const size_t n = lwi.size();
    std::vector<double> target(n, missing());
    for (size_t t = 0; t + static_cast<size_t>(k) < n; ++t) {
        long double sum = 0.0L;
        bool ok = true;
        for (int j = 1; j <= k; ++j) {
            const double v = lwi[t + static_cast<size_t>(j)];
            if (is_missing(v)) {
                ok = false;
                break;
            }
            sum += v;
        }
        if (ok) target[t] = static_cast<double>(sum / k);
    }
    return target;
}

Design collect(const DataMatrix& full, const std::vector<double>& target) {
    std::vector<size_t> keep;
    for (size_t t = 0; t < full.n_rows; ++t) {
        if (is_missing(target[t])) continue;
        bool ok = true;
        const double* row = full.row(t);
        for (size_t c = 0; c < full.n_cols; ++c)
            if (is_missing(row[c])) {
                ok = false;
                break;
            }
        if (ok) keep.push_back(t);
    }
    if (keep.empty()) throw DataError("design: no complete rows");

    Design d;
    d.X = full.take_rows(keep);
    d.y.reserve(keep.size());
    for (size_t t : keep) d.y.push_back(target[t]);
    d.row_index = std::move(keep);
    return d;
}

} // namespace

Design ar_design(const std::vector<double>& lwi, int p, int horizon) {
    if (p < 1) throw ConfigError("ar_design: order must be >= 1");
    if (horizon < 1) throw ConfigError("ar_design: horizon must be >= 1");

    DataMatrix full(lwi.size(), static_cast<size_t>(p));
    for (int j = 0; j < p; ++j) full.names.push_back("LWI_lag" + std::to_string(j));
    for (size_t t = 0; t < lwi.size(); ++t)
        for (int j = 0; j < p; ++j)
            full.at(t, static_cast<size_t>(j)) =
                t >= static_cast<size_t>(j) ? lwi[t - static_cast<size_t>(j)] : missing();
    return collect(full, horizon_target(lwi, horizon));
}

Design har_design(const std::vector<double>& lwi, const std::vector<int>& windows, int horizon) {
    if (windows.empty()) throw ConfigError("har_design: need at least one window");
    for (size_t i = 0; i < windows.size(); ++i) {
        if (windows[i] < 1) throw ConfigError("har_design: windows must be >= 1");
        if (i > 0 && windows[i] <= windows[i - 1])
            throw ConfigError("har_design: windows must be strictly increasing");
    }
    if (horizon < 1) throw ConfigError("har_design: horizon must be >= 1");

    DataMatrix full(lwi.size(), windows.size());
    for (size_t w = 0; w < windows.size(); ++w) {
        full.names.push_back("LWI_mean_w" + std::to_string(windows[w]));
        const auto col = rolling_stat(lwi, windows[w], RollKind::Mean);
        for (size_t t = 0; t < lwi.size(); ++t) full.at(t, w) = col[t];
    }
    return collect(full, horizon_target(lwi, horizon));
}

} // namespace lwi
