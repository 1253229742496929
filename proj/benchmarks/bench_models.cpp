#include "lwi/models.hpp"
#include "lwi/rng.hpp"
#include "lwi/stats.hpp"

#include <benchmark/benchmark.h>

namespace {

struct Problem {
    lwi::DataMatrix X;
    std::vector<double> y;
};

Problem make_problem(size_t n, size_t p) {
    lwi::Rng rng(3);
    Problem prob;
    prob.X = lwi::DataMatrix(n, p);
    for (auto& v : prob.X.data) v = rng.normal();
    prob.y.resize(n);
    for (size_t i = 0; i < n; ++i)
        prob.y[i] = prob.X.at(i, 0) - 0.5 * prob.X.at(i, 1) +
                    (prob.X.at(i, 2) > 0 ? 1.0 : 0.0) + 0.3 * rng.normal();
    return prob;
}

void BM_GbtFit(benchmark::State& state) {
    const auto prob = make_problem(static_cast<size_t>(state.range(0)), 16);
    lwi::GbtParams params;
    params.n_trees = 50;
    for (auto _ : state) {
        auto model = lwi::gbt_fit(prob.X, prob.y, params);
        benchmark::DoNotOptimize(model.trees.size());
    }
}
BENCHMARK(BM_GbtFit)->Arg(2000)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_LassoPath(benchmark::State& state) {
    const auto prob = make_problem(static_cast<size_t>(state.range(0)), 16);
    const double lmax = lwi::lasso_lambda_max(prob.X, prob.y);
    const auto grid = lwi::lasso_lambda_grid(lmax);
    for (auto _ : state) {
        auto path = lwi::lasso_path(prob.X, prob.y, grid);
        benchmark::DoNotOptimize(path.coefs.size());
    }
}
BENCHMARK(BM_LassoPath)->Arg(2000)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_OlsFit(benchmark::State& state) {
    const auto prob = make_problem(static_cast<size_t>(state.range(0)), 5);
    for (auto _ : state) {
        auto fit = lwi::ols_fit(prob.X, prob.y);
        benchmark::DoNotOptimize(fit.coefficients.data());
    }
}
BENCHMARK(BM_OlsFit)->Arg(10000)->Unit(benchmark::kMicrosecond);

} // namespace
