#include "lwi/errors.hpp"
#include "lwi/models.hpp"
#include "lwi/rng.hpp"

#include <doctest.h>

#include <cmath>
#include <set>

using namespace lwi;

namespace {

struct Problem {
    DataMatrix X;
    std::vector<double> y;
};

Problem step_problem(uint64_t seed, size_t n, double noise = 0.0) {
    Rng rng(seed);
    Problem prob;
    prob.X = DataMatrix(n, 3);
    prob.y.resize(n);
    for (size_t i = 0; i < n; ++i) {
        for (size_t c = 0; c < 3; ++c) prob.X.at(i, c) = rng.uniform(-1.0, 1.0);
        prob.y[i] = (prob.X.at(i, 0) > 0 ? 1.0 : 0.0) + noise * rng.normal();
    }
    return prob;
}

double in_sample_r2(const GbtModel& model, const Problem& prob) {
    auto pred = predict(model, prob.X);
    double mean = 0;
    for (double v : prob.y) mean += v;
    mean /= static_cast<double>(prob.y.size());
    double ss_res = 0, ss_tot = 0;
    for (size_t i = 0; i < prob.y.size(); ++i) {
        ss_res += (prob.y[i] - pred[i]) * (prob.y[i] - pred[i]);
        ss_tot += (prob.y[i] - mean) * (prob.y[i] - mean);
    }
    return 1.0 - ss_res / ss_tot;
}

} // namespace

TEST_CASE("an empty ensemble predicts the training mean") {
    auto prob = step_problem(1, 500);
    GbtParams params;
    params.n_trees = 0;
    auto model = gbt_fit(prob.X, prob.y, params);
    double mean = 0;
    for (double v : prob.y) mean += v;
    mean /= static_cast<double>(prob.y.size());
    CHECK(model.base_score == doctest::Approx(mean).epsilon(1e-12));
    auto pred = predict(model, prob.X);
    for (double v : pred) REQUIRE(v == model.base_score);
}

TEST_CASE("a separable step function is learned nearly perfectly") {
    auto prob = step_problem(2, 2000);
    GbtParams params;
    params.n_trees = 50;
    params.max_depth = 2;
    params.learning_rate = 0.3;
    params.subsample = 1.0;
    auto model = gbt_fit(prob.X, prob.y, params);
    CHECK(in_sample_r2(model, prob) > 0.99);
}

TEST_CASE("training loss is non-increasing") {
    for (uint64_t seed : {3u, 4u, 5u}) {
        auto prob = step_problem(seed, 1200, 0.3);
        GbtParams params;
        params.seed = seed;
        auto model = gbt_fit(prob.X, prob.y, params);
        REQUIRE(model.train_loss.size() == static_cast<size_t>(params.n_trees) + 1);
        for (size_t i = 1; i < model.train_loss.size(); ++i)
            REQUIRE(model.train_loss[i] <= model.train_loss[i - 1] + 1e-12);
    }
}

TEST_CASE("fits are deterministic for a fixed seed") {
    auto prob = step_problem(6, 800, 0.5);
    GbtParams params;
    params.seed = 42;
    auto a = gbt_fit(prob.X, prob.y, params);
    auto b = gbt_fit(prob.X, prob.y, params);
    auto pa = predict(a, prob.X);
    auto pb = predict(b, prob.X);
    REQUIRE(pa == pb);
    params.seed = 43;
    auto c = gbt_fit(prob.X, prob.y, params);
    CHECK(predict(c, prob.X) != pa); // different subsamples move something
}

TEST_CASE("a single depth-1 tree yields exactly two output values") {
    auto prob = step_problem(7, 600);
    GbtParams params;
    params.n_trees = 1;
    params.max_depth = 1;
    params.subsample = 1.0;
    auto model = gbt_fit(prob.X, prob.y, params);
    auto pred = predict(model, prob.X);
    std::set<double> distinct(pred.begin(), pred.end());
    CHECK(distinct.size() == 2);
}

TEST_CASE("huber with a huge delta matches squared error") {
    auto prob = step_problem(8, 1500, 0.4);
    GbtParams sq;
    sq.seed = 11;
    GbtParams hu = sq;
    hu.loss = GbtLoss::Huber;
    hu.huber_delta = 1e9;
    auto pred_sq = predict(gbt_fit(prob.X, prob.y, sq), prob.X);
    auto pred_hu = predict(gbt_fit(prob.X, prob.y, hu), prob.X);
    REQUIRE(pred_sq.size() == pred_hu.size());
    for (size_t i = 0; i < pred_sq.size(); ++i)
        REQUIRE(std::abs(pred_sq[i] - pred_hu[i]) < 1e-6);
}

TEST_CASE("median quantile loss tracks the median on symmetric noise") {
    Rng rng(13);
    const size_t n = 50000;
    DataMatrix X(n, 2);
    std::vector<double> y(n);
    for (size_t i = 0; i < n; ++i) {
        X.at(i, 0) = rng.uniform(-1.0, 1.0);
        X.at(i, 1) = rng.uniform(-1.0, 1.0);
        y[i] = 0.5 * X.at(i, 0) + rng.normal(); // symmetric noise
    }
    GbtParams params;
    params.loss = GbtLoss::Quantile;
    params.quantile_tau = 0.5;
    params.n_trees = 100;
    params.seed = 17;
    auto model = gbt_fit(X, y, params);
    auto pred = predict(model, X);
    double sign_sum = 0;
    for (size_t i = 0; i < n; ++i) sign_sum += (y[i] - pred[i]) > 0 ? 1.0 : -1.0;
    CHECK(std::abs(sign_sum / static_cast<double>(n)) < 0.02);
}

TEST_CASE("upper quantiles shift predictions upward") {
    Rng rng(19);
    const size_t n = 20000;
    DataMatrix X(n, 1);
    std::vector<double> y(n);
    for (size_t i = 0; i < n; ++i) {
        X.at(i, 0) = rng.uniform(-1.0, 1.0);
        y[i] = rng.normal();
    }
    GbtParams q9;
    q9.loss = GbtLoss::Quantile;
    q9.quantile_tau = 0.9;
    q9.n_trees = 60;
    auto model = gbt_fit(X, y, q9);
    auto pred = predict(model, X);
    size_t below = 0;
    for (size_t i = 0; i < n; ++i)
        if (y[i] <= pred[i]) ++below;
    const double frac = static_cast<double>(below) / static_cast<double>(n);
    CHECK(frac == doctest::Approx(0.9).epsilon(0.05));
}

TEST_CASE("leaf assignments are invariant under monotone feature transforms") {
    auto prob = step_problem(21, 1000, 0.2);
    GbtParams params;
    params.seed = 23;
    params.n_trees = 20;
    auto base = gbt_fit(prob.X, prob.y, params);
    auto base_pred = predict(base, prob.X);

    // exp() every value of feature 1, train and predict consistently
    Problem warped = prob;
    for (size_t i = 0; i < warped.X.n_rows; ++i)
        warped.X.at(i, 1) = std::exp(warped.X.at(i, 1));
    auto warped_model = gbt_fit(warped.X, warped.y, params);
    auto warped_pred = predict(warped_model, warped.X);
    for (size_t i = 0; i < base_pred.size(); ++i)
        REQUIRE(base_pred[i] == doctest::Approx(warped_pred[i]).epsilon(1e-12));
}

TEST_CASE("gbt rejects bad input") {
    auto prob = step_problem(25, 30);
    GbtParams params; // min_leaf 20 -> needs 40 rows
    CHECK_THROWS_AS(gbt_fit(prob.X, prob.y, params), DataError);
    auto ok = step_problem(26, 100);
    ok.y[3] = std::nan("");
    CHECK_THROWS_AS(gbt_fit(ok.X, ok.y, params), DataError);
    GbtParams bad;
    bad.learning_rate = 0.0;
    auto fine = step_problem(27, 100);
    CHECK_THROWS_AS(gbt_fit(fine.X, fine.y, bad), ConfigError);
}

TEST_CASE("gbt model json round-trips with identical predictions") {
    auto prob = step_problem(29, 700, 0.3);
    GbtParams params;
    params.n_trees = 25;
    params.seed = 31;
    auto model = gbt_fit(prob.X, prob.y, params);
    auto text = model_to_json(model);
    auto loaded = gbt_from_json(text);
    CHECK(loaded.trees.size() == model.trees.size());
    CHECK(loaded.base_score == model.base_score);
    CHECK(loaded.train_loss == model.train_loss);
    auto a = predict(model, prob.X);
    auto b = predict(loaded, prob.X);
    REQUIRE(a == b);
}

TEST_CASE("gain importance concentrates on the informative feature") {
    auto prob = step_problem(33, 3000, 0.2);
    GbtParams params;
    params.n_trees = 40;
    auto model = gbt_fit(prob.X, prob.y, params);
    REQUIRE(model.feature_gain.size() == 3);
    CHECK(model.feature_gain[0] > 10.0 * model.feature_gain[1]);
    CHECK(model.feature_gain[0] > 10.0 * model.feature_gain[2]);
}
