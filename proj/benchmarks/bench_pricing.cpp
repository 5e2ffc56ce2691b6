#include <benchmark/benchmark.h>

#include "evcoop/market.hpp"
#include "evcoop/participation.hpp"
#include "evcoop/pricing.hpp"

using namespace evcoop;

static void BM_PricingEquilibrium(benchmark::State& state) {
  const ModelParams p;
  QosVector q{34.0, 33.0};
  for (auto _ : state) {
    benchmark::DoNotOptimize(pricing_equilibrium(q, p));
    q.a() += 1e-9;
  }
}
BENCHMARK(BM_PricingEquilibrium);

static void BM_MarketPartition(benchmark::State& state) {
  const ModelParams p;
  const QosVector q{34.0, 33.0};
  PriceProfile price{1.2, 1.1};
  for (auto _ : state) {
    benchmark::DoNotOptimize(market_partition(price, q, p));
    price.a() += 1e-12;
  }
}
BENCHMARK(BM_MarketPartition);

static void BM_ProfitMatrixAndNash(benchmark::State& state) {
  const ModelParams p;
  const QosProfile q{{34.0, 33.0}, {36.0, 35.0}};
  for (auto _ : state) {
    const ProfitMatrix m = build_profit_matrix(q, p);
    benchmark::DoNotOptimize(pure_nash(m));
  }
}
BENCHMARK(BM_ProfitMatrixAndNash);
