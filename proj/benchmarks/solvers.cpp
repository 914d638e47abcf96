#include <numbers>

#include <benchmark/benchmark.h>

#include "mmliq/analysis.hpp"
#include "mmliq/fdsolver.hpp"
#include "mmliq/nplayer.hpp"

namespace {

using namespace mmliq;

TargetStrategy cosine() { return TargetStrategy(10.0, Cosine{10.0, 10, 0.5 / std::numbers::pi}); }

void BM_Equilibrium(benchmark::State& state) {
  const Grid g(10.0, static_cast<int>(state.range(0)));
  const TargetStrategy target = cosine();
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_equilibrium(MarketParams::reference(), {10.0, 0.0}, target, g));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Equilibrium)->RangeMultiplier(4)->Range(1000, 64000)->Complexity(benchmark::oN);

void BM_PeriodicRelaxation(benchmark::State& state) {
  const PeriodicResidual r = periodic_residual(TargetStrategy(10.0, TwapStep{10.0, 10}));
  const Grid period(1.0, static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_periodic(MarketParams::reference(), r, period, SolveOptions{}));
  }
}
BENCHMARK(BM_PeriodicRelaxation)->Arg(100)->Arg(1000);

void BM_Oracle(benchmark::State& state) {
  const PeriodicResidual r = periodic_residual(cosine());
  SolveOptions opts;
  opts.oracle_quadrature_steps = static_cast<int>(state.range(0));
  for (auto _ : state) {
    const auto oracle = periodic_oracle_matrix(MarketParams::reference(), r, opts);
    benchmark::DoNotOptimize(oracle.evaluate(Grid(1.0, 100)));
  }
}
BENCHMARK(BM_Oracle)->Arg(2000)->Arg(20000);

void BM_Costs(benchmark::State& state) {
  const auto sol = solve_equilibrium(MarketParams::reference(), {10.0, 0.0}, cosine(), Grid(10.0, 10000));
  for (auto _ : state) benchmark::DoNotOptimize(evaluate_costs(sol, cosine(), MarketParams::reference()));
}
BENCHMARK(BM_Costs);

void BM_BestResponse(benchmark::State& state) {
  const Grid g(10.0, static_cast<int>(state.range(0)));
  const auto sol = solve_equilibrium(MarketParams::reference(), {10.0, 0.0}, cosine(), g);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        best_response_rates(sol, cosine(), MarketParams::reference(), {10.0, 0.0}, Player::minor, 10));
  }
}
BENCHMARK(BM_BestResponse)->Arg(250)->Arg(500)->Arg(1000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
