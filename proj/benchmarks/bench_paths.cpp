#include <wsens/wsens.hpp>

#include <benchmark/benchmark.h>

using namespace wsens;

static void BM_GeneratePath(benchmark::State& state) {
  const PathEnsemble e(TimeGrid(1.0, static_cast<int>(state.range(0))), static_cast<int>(state.range(1)), 1 << 20, 1);
  Path p;
  std::size_t i = 0;
  for (auto _ : state) {
    e.generate(i++, p);
    benchmark::DoNotOptimize(p.levels.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(1));
}
BENCHMARK(BM_GeneratePath)->Args({200, 1})->Args({2000, 1})->Args({200, 4});

static void BM_ItoIntegralIndicator(benchmark::State& state) {
  const PathEnsemble e(TimeGrid(1.0, 500), 1, static_cast<std::size_t>(state.range(0)), 3);
  const auto f = VectorField::from_process(
      CoefficientProcess::indicator(0, 0.0, SmallMatrix::Zero(1, 1), SmallMatrix::Ones(1, 1)));
  for (auto _ : state) benchmark::DoNotOptimize(ito_integral(f, e).sum());
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ItoIntegralIndicator)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

static void BM_MaterializedVsLazy(benchmark::State& state) {
  PathEnsemble e(TimeGrid(1.0, 200), 2, 5000, 4);
  if (state.range(0)) e.materialize();
  for (auto _ : state)
    benchmark::DoNotOptimize(e.map_scalar([](const Path& p) { return p.levels(200, 0); }).sum());
}
BENCHMARK(BM_MaterializedVsLazy)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
