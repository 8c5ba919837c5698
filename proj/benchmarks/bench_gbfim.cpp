#include <benchmark/benchmark.h>

#include <vector>

#include "gbfim/gbfim.hpp"

namespace {

gbfim::Graph sensor(int n) {
  gbfim::SensorOptions options;
  options.count = n;
  return gbfim::generate_sensor_graph(options);
}

void BM_Eigendecompose(benchmark::State& state) {
  const auto L = gbfim::laplacian(sensor(static_cast<int>(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(gbfim::eigendecompose(L));
}
BENCHMARK(BM_Eigendecompose)->Arg(79)->Arg(200)->Arg(500)->Unit(benchmark::kMillisecond);

void BM_PGreedy(benchmark::State& state) {
  const auto s = gbfim::eigendecompose(gbfim::laplacian(sensor(static_cast<int>(state.range(0)))));
  const gbfim::GbfKernel kernel(gbfim::Diffusion{1.0}, s.values);
  gbfim::SelectorConfig cfg;
  cfg.budget = static_cast<int>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(gbfim::select_nodes(s, kernel, cfg));
}
BENCHMARK(BM_PGreedy)->Args({79, 10})->Args({200, 20})->Args({500, 50})->Unit(benchmark::kMillisecond);

void BM_IcSpread(benchmark::State& state) {
  const auto g = sensor(200);
  gbfim::ICConfig cfg;
  cfg.p = 0.2;
  cfg.runs = static_cast<int>(state.range(0));
  const std::vector<gbfim::NodeId> seeds{0, 10, 20, 30, 40};
  for (auto _ : state) benchmark::DoNotOptimize(gbfim::ic_spread(g, seeds, cfg));
}
BENCHMARK(BM_IcSpread)->Arg(500)->Arg(5000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
