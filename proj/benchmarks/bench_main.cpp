#include <benchmark/benchmark.h>

#include <cmath>

#include "cvhar/evaluate.hpp"
#include "cvhar/realized.hpp"
#include "cvhar/synthetic.hpp"
#include "cvhar/vine.hpp"

using namespace cvhar;

namespace {

std::vector<double> log_path(std::size_t n) {
  synthetic::Rng rng(1);
  std::vector<double> x{std::log(100.0)};
  for (std::size_t i = 1; i < n; ++i) x.push_back(x.back() + 2e-4 * synthetic::standard_normal(rng));
  return x;
}

realized::RkComponentSeries markov_rows(std::size_t days) {
  synthetic::Rng rng(1);
  const auto rk = synthetic::copula_markov_series(rng, days, copula::PairCopula::make(copula::Family::clayton, 3.0),
                                                  margins::Margin::inverse_gaussian(1.0, 1.0));
  const auto dates =
      synthetic::business_days({std::chrono::year{2012}, std::chrono::month{1}, std::chrono::day{2}}, rk.size());
  return realized::build_components(rk, dates);
}

}  // namespace

static void BM_RealizedKernel(benchmark::State& state) {
  const auto x = log_path(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(realized::realized_kernel(x, 20));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_RealizedKernel)->Arg(1000)->Arg(10000)->Arg(50000);

static void BM_FitModels(benchmark::State& state) {
  const auto rows = markov_rows(600);
  eval::SchemeConfig cfg;
  cfg.window = 500;
  cfg.margin = static_cast<margins::MarginKind>(state.range(0));
  cfg.family_set = state.range(1) ? copula::FamilySet::AGT : copula::FamilySet::A;
  const std::span<const realized::ComponentRow> w(rows.data(), 500);
  for (auto _ : state) benchmark::DoNotOptimize(eval::fit_models(w, cfg));
}
BENCHMARK(BM_FitModels)->Args({0, 0})->Args({0, 1})->Args({2, 0})->Unit(benchmark::kMillisecond);

static void BM_ConditionalExpectation(benchmark::State& state) {
  const auto rows = markov_rows(600);
  eval::SchemeConfig cfg;
  cfg.window = 500;
  cfg.margin = static_cast<margins::MarginKind>(state.range(0));
  cfg.family_set = state.range(1) ? copula::FamilySet::AGT : copula::FamilySet::A;
  const auto m = eval::fit_models(std::span<const realized::ComponentRow>(rows.data(), 500), cfg);
  const auto& r = rows[550];
  for (auto _ : state) {
    benchmark::DoNotOptimize(vine::conditional_expectation(m.vine, m.margins, {r.rk_m, r.rk_w, r.rk_d}));
  }
}
// margin kinds: 0 ecdf, 1 kernel, 2 inverse Gaussian
BENCHMARK(BM_ConditionalExpectation)
    ->Args({0, 0})
    ->Args({1, 0})
    ->Args({2, 0})
    ->Args({2, 1})
    ->Unit(benchmark::kMicrosecond);
BENCHMARK_MAIN();
