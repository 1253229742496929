#include "lwi/errors.hpp"
#include "lwi/features.hpp"
#include "lwi/models.hpp"
#include "lwi/rng.hpp"

#include "support.hpp"

#include <doctest.h>

#include <cmath>

using namespace lwi;

TEST_CASE("ols recovers exact linear data") {
    DataMatrix X(50, 1);
    std::vector<double> y(50);
    for (size_t i = 0; i < 50; ++i) {
        X.at(i, 0) = static_cast<double>(i) * 0.1;
        y[i] = 2.0 * X.at(i, 0) + 3.0;
    }
    auto fit = ols_fit(X, y);
    CHECK(fit.coefficients[0] == doctest::Approx(3.0).epsilon(1e-9));
    CHECK(fit.coefficients[1] == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(!fit.condition_warning);
}

TEST_CASE("ols matches the normal-equations oracle on random problems") {
    Rng rng(5);
    for (int trial = 0; trial < 25; ++trial) {
        const size_t n = 60 + rng.uniform_u64(200);
        const size_t p = 1 + rng.uniform_u64(6);
        DataMatrix X(n, p);
        std::vector<double> y(n);
        for (auto& v : X.data) v = rng.normal();
        for (size_t i = 0; i < n; ++i) {
            double acc = rng.normal();
            for (size_t c = 0; c < p; ++c) acc += (static_cast<double>(c) - 1.0) * X.at(i, c);
            y[i] = acc;
        }
        auto fit = ols_fit(X, y);

        // Brute force (A'A)^-1 A'y with Gauss-Jordan, independent of Eigen.
        const size_t m = p + 1;
        std::vector<double> ata(m * m, 0.0), aty(m, 0.0);
        auto a_of = [&](size_t r, size_t c) { return c == 0 ? 1.0 : X.at(r, c - 1); };
        for (size_t r = 0; r < n; ++r)
            for (size_t i = 0; i < m; ++i) {
                aty[i] += a_of(r, i) * y[r];
                for (size_t j = 0; j < m; ++j) ata[i * m + j] += a_of(r, i) * a_of(r, j);
            }
        // solve ata * beta = aty
        std::vector<double> aug(ata);
        std::vector<double> beta(aty);
        for (size_t col = 0; col < m; ++col) {
            size_t piv = col;
            for (size_t r = col + 1; r < m; ++r)
                if (std::abs(aug[r * m + col]) > std::abs(aug[piv * m + col])) piv = r;
            for (size_t c = 0; c < m; ++c) std::swap(aug[col * m + c], aug[piv * m + c]);
            std::swap(beta[col], beta[piv]);
            const double d = aug[col * m + col];
            for (size_t c = 0; c < m; ++c) aug[col * m + c] /= d;
            beta[col] /= d;
            for (size_t r = 0; r < m; ++r) {
                if (r == col) continue;
                const double f = aug[r * m + col];
                if (f == 0.0) continue;
                for (size_t c = 0; c < m; ++c) aug[r * m + c] -= f * aug[col * m + c];
                beta[r] -= f * beta[col];
            }
        }
        for (size_t i = 0; i < m; ++i)
            REQUIRE(fit.coefficients[i] == doctest::Approx(beta[i]).epsilon(0.0).scale(1.0).epsilon(1e-8));
    }
}

TEST_CASE("duplicate columns trip the condition warning but stay finite") {
    Rng rng(9);
    DataMatrix X(100, 2);
    std::vector<double> y(100);
    for (size_t i = 0; i < 100; ++i) {
        X.at(i, 0) = rng.normal();
        X.at(i, 1) = X.at(i, 0); // exact duplicate
        y[i] = X.at(i, 0) + 0.1 * rng.normal();
    }
    auto fit = ols_fit(X, y);
    CHECK(fit.condition_warning);
    auto pred = predict(fit, X);
    for (double v : pred) REQUIRE(std::isfinite(v));
}

TEST_CASE("ols error paths") {
    DataMatrix X(3, 4);
    CHECK_THROWS_AS(ols_fit(X, std::vector<double>(3, 0.0)), DataError); // n < p+1
    DataMatrix ok(10, 1);
    std::vector<double> y(10, 1.0);
    y[5] = std::nan("");
    CHECK_THROWS_AS(ols_fit(ok, y), DataError);
}

TEST_CASE("predict honors the linear schema") {
    LinearFit fit;
    fit.coefficients = {4.5};
    auto out = predict(fit, DataMatrix(7, 0));
    for (double v : out) REQUIRE(v == 4.5);

    LinearFit named;
    named.coefficients = {0.0, 1.0};
    named.names = {"a"};
    DataMatrix bad(3, 1);
    bad.names = {"b"};
    CHECK_THROWS_AS(predict(named, bad), DataError);
    CHECK_THROWS_AS(predict(named, DataMatrix(3, 2)), DataError);
}

TEST_CASE("ar design has the documented shape and fixed point") {
    std::vector<double> lwi(200, 0.37);
    auto design = ar_design(lwi, 5, 1);
    CHECK(design.X.n_cols == 5);
    CHECK(design.X.names.size() == 5);
    // constant series: fitted model reproduces the constant
    auto fit = ols_fit(design.X, design.y);
    auto pred = predict(fit, design.X);
    for (double v : pred) REQUIRE(v == doctest::Approx(0.37).epsilon(1e-9));
}

TEST_CASE("ar(1) coefficient is consistent on simulated data") {
    auto y = testing::ar1_series(77, 0.6, 50000);
    auto design = ar_design(y, 1, 1);
    auto fit = ols_fit(design.X, design.y);
    CHECK(fit.coefficients[1] == doctest::Approx(0.6).epsilon(0.0).scale(1.0).epsilon(0.05));
}

TEST_CASE("ar design drops rows that touch missing values") {
    std::vector<double> lwi(100, 0.5);
    lwi[50] = missing();
    auto design = ar_design(lwi, 3, 2);
    for (size_t i = 0; i < design.row_index.size(); ++i) {
        const size_t t = design.row_index[i];
        REQUIRE(t >= 2);
        // neither the lags nor the target window may straddle index 50
        REQUIRE(!(t >= 50 && t - 2 <= 50));
        REQUIRE(!(t + 1 <= 50 && 50 <= t + 2));
    }
    CHECK_THROWS_AS(ar_design(std::vector<double>(10, missing()), 2, 1), DataError);
}

TEST_CASE("har design windows and degenerate forms") {
    std::vector<double> lwi;
    Rng rng(81);
    for (int i = 0; i < 500; ++i) lwi.push_back(rng.uniform());

    SUBCASE("har with a single window of 1 equals ar(1)") {
        auto har = har_design(lwi, {1}, 4);
        auto ar = ar_design(lwi, 1, 4);
        REQUIRE(har.y.size() == ar.y.size());
        for (size_t i = 0; i < har.y.size(); ++i) {
            REQUIRE(har.X.at(i, 0) == doctest::Approx(ar.X.at(i, 0)).epsilon(1e-12));
            REQUIRE(har.y[i] == ar.y[i]);
        }
    }

    SUBCASE("window means match rolling_stat at every row") {
        auto design = har_design(lwi, {1, 8, 40}, 1);
        auto m8 = rolling_stat(lwi, 8, RollKind::Mean);
        auto m40 = rolling_stat(lwi, 40, RollKind::Mean);
        for (size_t i = 0; i < design.row_index.size(); ++i) {
            const size_t t = design.row_index[i];
            REQUIRE(design.X.at(i, 1) == doctest::Approx(m8[t]).epsilon(1e-12));
            REQUIRE(design.X.at(i, 2) == doctest::Approx(m40[t]).epsilon(1e-12));
        }
    }

    SUBCASE("constant series predicts the constant, warning tolerated") {
        std::vector<double> flat(300, 0.2);
        auto design = har_design(flat, {1, 8, 40}, 4);
        auto fit = ols_fit(design.X, design.y);
        auto pred = predict(fit, design.X);
        for (double v : pred) REQUIRE(v == doctest::Approx(0.2).epsilon(1e-7));
    }

    SUBCASE("windows must increase strictly") {
        CHECK_THROWS_AS(har_design(lwi, {8, 8}, 1), ConfigError);
        CHECK_THROWS_AS(har_design(lwi, {}, 1), ConfigError);
    }
}

TEST_CASE("ar(5) predictions are equivariant under affine target maps") {
    auto y = testing::ar1_series(83, 0.5, 4000);
    auto design = ar_design(y, 5, 4);
    auto fit = ols_fit(design.X, design.y);
    auto pred = predict(fit, design.X);

    const double a = 2.5, b = -1.25;
    std::vector<double> mapped(y.size());
    for (size_t i = 0; i < y.size(); ++i) mapped[i] = a * y[i] + b;
    auto design2 = ar_design(mapped, 5, 4);
    auto fit2 = ols_fit(design2.X, design2.y);
    auto pred2 = predict(fit2, design2.X);

    REQUIRE(pred.size() == pred2.size());
    for (size_t i = 0; i < pred.size(); ++i)
        REQUIRE(pred2[i] == doctest::Approx(a * pred[i] + b).epsilon(0.0).scale(1.0).epsilon(1e-8));
}

TEST_CASE("linear model json round-trips") {
    LinearFit fit;
    fit.names = {"x1", "x2"};
    fit.coefficients = {0.125, -3.75, 2.625};
    fit.n_train = 123;
    fit.condition_warning = true;
    auto text = model_to_json(fit);
    auto loaded = linear_from_json(text);
    CHECK(loaded.names == fit.names);
    CHECK(loaded.coefficients == fit.coefficients);
    CHECK(loaded.n_train == fit.n_train);
    CHECK(loaded.condition_warning == fit.condition_warning);
    CHECK(text.find("\"model_format\": 1") != std::string::npos);
    CHECK_THROWS_AS(linear_from_json("{}"), DataError);
    CHECK_THROWS_AS(gbt_from_json(text), DataError); // wrong kind
}
