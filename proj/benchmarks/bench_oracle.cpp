#include <benchmark/benchmark.h>

#include "evcoop/oracle.hpp"

using namespace evcoop;

static void BM_SimulateShares(benchmark::State& state) {
  ModelParams p;
  p.w_l = 1.0;
  p.w_p = 1.0;
  const QosVector q{2.5, 2.0};
  const PriceProfile price{1.5, 1.3};
  const auto cells = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(oracle::simulate_shares(price, q, p, cells));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SimulateShares)->Arg(1000)->Arg(100000);

static void BM_BestResponseDynamics(benchmark::State& state) {
  ModelParams p;
  p.w_l = 1.0;
  p.w_p = 1.0;
  const QosVector q{2.5, 2.0};
  const oracle::GridSpec grid =
      oracle::default_grid(q, p, static_cast<std::size_t>(state.range(0)), 1'000'000);
  for (auto _ : state) benchmark::DoNotOptimize(oracle::best_response_dynamics(p.o, q, p, grid));
}
BENCHMARK(BM_BestResponseDynamics)->Arg(401)->Arg(4001)->Unit(benchmark::kMillisecond);
