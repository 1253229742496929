#include "lwi/errors.hpp"
#include "lwi/features.hpp"
#include "lwi/rng.hpp"
#include "lwi/stats.hpp"

#include "support.hpp"

#include <doctest.h>

#include <algorithm>
#include <sstream>

using namespace lwi;

namespace {

// Frame with independent noise columns whose target we can plant; enough
// structure for the three screening methods to have something to chew on.
FeatureFrame planted_frame(uint64_t seed, size_t n, const std::string& symbol,
                           const std::vector<std::pair<std::string, double>>& signal,
                           double noise = 0.05) {
    Rng rng(seed);
    FeatureFrame frame;
    frame.symbol = symbol;
    frame.names = {"LWI_ma1s", "LWI_lag1",  "LWI_sd1s", "dLWI_1s",    "QI_sd1s",
                   "QI_lag1s", "spread_sd1s", "adds_rate1s", "canc_rate1s", "OFI"};
    frame.columns.assign(frame.names.size(), std::vector<double>(n));
    for (auto& col : frame.columns)
        for (auto& v : col) v = rng.uniform();
    frame.bin_index.resize(n);
    frame.bin_start.resize(n);
    frame.lwi.assign(n, 0.0);
    frame.modelable.assign(n, 1);
    for (size_t t = 0; t < n; ++t) {
        frame.bin_index[t] = static_cast<int64_t>(t);
        frame.bin_start[t] = static_cast<int64_t>(t) * 250'000'000;
    }

    std::vector<double> target(n, 0.0);
    for (size_t t = 0; t < n; ++t) {
        double v = noise * rng.normal();
        for (const auto& [name, weight] : signal) {
            const auto* col = frame.column(name);
            REQUIRE(col != nullptr);
            v += weight * (*col)[t];
        }
        target[t] = v;
    }
    frame.targets[4] = std::move(target);
    return frame;
}

bool contains(const MethodRanking& ranking, const std::string& feature, int within = -1) {
    const size_t limit = within < 0 ? ranking.ranked.size()
                                    : std::min(ranking.ranked.size(), static_cast<size_t>(within));
    for (size_t i = 0; i < limit; ++i)
        if (ranking.ranked[i].first == feature) return true;
    return false;
}

} // namespace

TEST_CASE("a perfect predictor is ranked first by all three methods") {
    auto frame = planted_frame(1, 4000, "S", {{"LWI_lag1", 1.0}}, 0.0);
    ScreenParams params;
    params.top_k = 5;
    auto result = screen_features(frame, 4, params);
    REQUIRE(result.methods.size() == 3);
    for (const auto& method : result.methods) {
        REQUIRE(!method.ranked.empty());
        CHECK(method.ranked[0].first == "LWI_lag1");
    }
}

TEST_CASE("an unrelated target still yields three full rankings") {
    auto frame = planted_frame(2, 2000, "S", {}, 1.0);
    ScreenParams params;
    params.top_k = 4;
    auto result = screen_features(frame, 4, params);
    REQUIRE(result.methods.size() == 3);
    for (const auto& method : result.methods) CHECK(method.ranked.size() == 4);
}

TEST_CASE("a planted signal is recovered near the top by every method") {
    auto frame = planted_frame(3, 6000, "S", {{"LWI_ma1s", 0.8}}, 0.25);
    ScreenParams params;
    params.top_k = 10;
    auto result = screen_features(frame, 4, params);
    for (const auto& method : result.methods) {
        INFO(method.method);
        CHECK(contains(method, "LWI_ma1s", 3));
    }
}

TEST_CASE("screening validates its inputs") {
    auto frame = planted_frame(4, 500, "S", {});
    ScreenParams params;
    CHECK_THROWS_AS(screen_features(frame, 99, params), ConfigError); // no such horizon
    params.top_k = 0;
    CHECK_THROWS_AS(screen_features(frame, 4, params), ConfigError);
}

TEST_CASE("consensus mechanics over hand-built rankings") {
    auto ranked = [](std::vector<std::string> names) {
        MethodRanking r;
        r.method = "mi";
        for (size_t i = 0; i < names.size(); ++i)
            r.ranked.emplace_back(names[i], 1.0 / static_cast<double>(i + 1));
        return r;
    };

    // Four symbols; feature A everywhere at rank 1 in all 3 methods, feature B
    // in three symbols, feature C in two.
    std::vector<ScreenResult> screens;
    for (int s = 0; s < 4; ++s) {
        ScreenResult sr;
        sr.symbol = "SYM" + std::to_string(s);
        sr.horizon = 4;
        std::vector<std::string> names = {"A", "X" + std::to_string(s)};
        if (s < 3) names.push_back("B");
        if (s < 2) names.push_back("C");
        sr.methods = {ranked(names), ranked(names), ranked(names)};
        screens.push_back(std::move(sr));
    }

    auto table = consensus(screens, 0.6);
    auto row_of = [&](const std::string& f) {
        auto it = std::find_if(table.begin(), table.end(),
                               [&](const ConsensusRow& r) { return r.feature == f; });
        REQUIRE(it != table.end());
        return *it;
    };

    const auto a = row_of("A");
    CHECK(a.n_symbols == 4);
    CHECK(a.mean_best_rank == doctest::Approx(1.0));
    CHECK(a.method_hits == 12);
    CHECK(a.consensus);

    const auto b = row_of("B");
    CHECK(b.n_symbols == 3);
    CHECK(b.consensus); // 0.75 >= 0.6

    const auto c = row_of("C");
    CHECK(c.n_symbols == 2);
    CHECK(!c.consensus); // 0.5 < 0.6

    // sorted by mean best rank ascending
    for (size_t i = 1; i < table.size(); ++i)
        REQUIRE(table[i - 1].mean_best_rank <= table[i].mean_best_rank);
}

TEST_CASE("consensus with one symbol treats presence as consensus") {
    ScreenResult sr;
    sr.symbol = "ONLY";
    MethodRanking r;
    r.method = "mi";
    r.ranked = {{"F", 1.0}};
    sr.methods = {r};
    auto table = consensus({sr}, 0.6);
    REQUIRE(table.size() == 1);
    CHECK(table[0].n_symbols == 1);
    CHECK(table[0].consensus); // 1/1 >= 0.6
}

TEST_CASE("threshold 1.0 requires presence everywhere") {
    MethodRanking with_f;
    with_f.method = "mi";
    with_f.ranked = {{"F", 1.0}, {"G", 0.5}};
    MethodRanking without_f;
    without_f.method = "mi";
    without_f.ranked = {{"G", 0.7}};

    ScreenResult s1{"A", 4, {with_f}};
    ScreenResult s2{"B", 4, {without_f}};
    auto table = consensus({s1, s2}, 1.0);
    for (const auto& row : table) {
        if (row.feature == "F") CHECK(!row.consensus);
        if (row.feature == "G") CHECK(row.consensus);
    }
}

TEST_CASE("consensus is a pure function of its input") {
    auto frame_a = planted_frame(5, 1500, "A", {{"QI_sd1s", 0.9}}, 0.2);
    auto frame_b = planted_frame(6, 1500, "B", {{"QI_sd1s", 0.9}}, 0.2);
    ScreenParams params;
    params.top_k = 6;
    std::vector<ScreenResult> screens = {screen_features(frame_a, 4, params),
                                         screen_features(frame_b, 4, params)};
    auto t1 = consensus(screens, 0.6);
    auto t2 = consensus(screens, 0.6);
    REQUIRE(t1.size() == t2.size());
    for (size_t i = 0; i < t1.size(); ++i) {
        REQUIRE(t1[i].feature == t2[i].feature);
        REQUIRE(t1[i].mean_best_rank == t2[i].mean_best_rank);
        REQUIRE(t1[i].method_hits == t2[i].method_hits);
    }
}

TEST_CASE("consensus csv matches the documented columns") {
    std::vector<ConsensusRow> rows = {{"LWI_ma1s", 4, 1.0, 12, true},
                                      {"spread_sd1s", 3, 8.0, 5, true},
                                      {"OFI", 2, 9.5, 3, false}};
    std::ostringstream os;
    write_consensus_csv(os, rows);
    CHECK(os.str() ==
          "feature,n_symbols,mean_best_rank,method_hits,consensus\n"
          "LWI_ma1s,4,1.00,12,Yes\n"
          "spread_sd1s,3,8.00,5,Yes\n"
          "OFI,2,9.50,3,No\n");
}
