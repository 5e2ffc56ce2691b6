#include <benchmark/benchmark.h>

#include "evcoop/flsim.hpp"

using namespace evcoop;

static void BM_GenerateData(benchmark::State& state) {
  flsim::HeterogeneityConfig c;
  c.n_per_station = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(flsim::generate_partitioned_data(c));
    ++c.seed;
  }
}
BENCHMARK(BM_GenerateData)->Arg(3000);

static void BM_FedAvg(benchmark::State& state) {
  flsim::HeterogeneityConfig c;
  c.n_per_station = static_cast<std::size_t>(state.range(0));
  const flsim::PartitionedData d = flsim::generate_partitioned_data(c);
  const flsim::TrainConfig t;
  for (auto _ : state) {
    benchmark::DoNotOptimize(flsim::train_fedavg(d.stations.a().data.train, d.stations.b().data.train,
                                                 t.rounds, t.local_epochs, t.lr, t.personalize_epochs));
  }
}
BENCHMARK(BM_FedAvg)->Arg(3000)->Unit(benchmark::kMillisecond);

static void BM_RunExperiment(benchmark::State& state) {
  const flsim::PartitionedData d = flsim::generate_partitioned_data({});
  const ModelParams p;
  for (auto _ : state) benchmark::DoNotOptimize(flsim::run_experiment(d, {}, p));
}
BENCHMARK(BM_RunExperiment)->Unit(benchmark::kMillisecond);
