#include <wsens/wsens.hpp>

#include <benchmark/benchmark.h>

#include <random>

using namespace wsens;

static void BM_Example1(benchmark::State& state) {
  for (auto _ : state)
    benchmark::DoNotOptimize(example1_report(1.0, static_cast<std::size_t>(state.range(0)), 2000, 7).weak.mean);
}
BENCHMARK(BM_Example1)->Arg(10000)->Unit(benchmark::kMillisecond);

static void BM_StaticSolver(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  std::mt19937_64 rng(1);
  std::lognormal_distribution<double> ln(0.0, 0.5);
  Eigen::VectorXd w(m), z(m);
  for (int i = 0; i < m; ++i) {
    w[i] = ln(rng);
    z[i] = ln(rng);
  }
  SolverOptions o;
  o.force_bisection = state.range(1) != 0;
  for (auto _ : state) benchmark::DoNotOptimize(solve_static_budget(Utility::power(3.0), 1.0, w, z, o).multiplier);
}
BENCHMARK(BM_StaticSolver)->Args({100000, 0})->Args({100000, 1})->Unit(benchmark::kMillisecond);

static void BM_WeakReport(benchmark::State& state) {
  const MarketModel m(1, 1, CoefficientProcess::parse("ind:j=1;c=0;lo=[0.3];hi=[0.6]", 1, 1),
                      CoefficientProcess::constant(1.0), std::nullopt, 1.0);
  const PathEnsemble e(TimeGrid(1.0, 100), 1, 5000, 2);
  PerturbationSpec p;
  p.drift = CoefficientProcess::constant(0.5);
  for (auto _ : state) benchmark::DoNotOptimize(weak_report(m, Utility::sqrt(), p, e, "mu").gap);
}
BENCHMARK(BM_WeakReport)->Unit(benchmark::kMillisecond);

static void BM_Support(benchmark::State& state) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n01;
  Eigen::MatrixXd cloud(state.range(0), 5);
  for (Eigen::Index i = 0; i < cloud.size(); ++i) cloud.data()[i] = n01(rng);
  Eigen::VectorXd d = Eigen::VectorXd::Ones(5), delta = Eigen::VectorXd::LinSpaced(5, -1, 1);
  for (auto _ : state) benchmark::DoNotOptimize(directional_derivative(d, delta, cloud));
}
BENCHMARK(BM_Support)->Arg(20)->Arg(10000);
