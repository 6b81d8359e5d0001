#include <benchmark/benchmark.h>

#include "hybridbn/approx_engine.hpp"
#include "hybridbn/benchmark_nets.hpp"
#include "hybridbn/density_tree.hpp"
#include "hybridbn/exact_engine.hpp"
#include "hybridbn/gmm.hpp"
#include "hybridbn/sampler.hpp"
#include "hybridbn/table_factor.hpp"

namespace {

using namespace hbn;

void BM_FactorProduct(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::vector<int> sa, sb, ca, cb;
  for (int i = 0; i < n; ++i) {
    sa.push_back(i);
    ca.push_back(2);
    sb.push_back(i + n / 2);
    cb.push_back(2);
  }
  TableFactor a(sa, ca), b(sb, cb);
  for (std::size_t i = 0; i < a.values.size(); ++i) a.values[i] = 1.0 + i;
  for (std::size_t i = 0; i < b.values.size(); ++i) b.values[i] = 2.0 + i;
  for (auto _ : state) {
    benchmark::DoNotOptimize(a.product(b));
  }
}
BENCHMARK(BM_FactorProduct)->Arg(8)->Arg(12)->Arg(16);

void BM_ExactPropagate(benchmark::State& state) {
  RandomStream rng(7);
  HybridNetwork net = random_discrete_network(static_cast<int>(state.range(0)), 3, rng);
  Evidence ev = random_discrete_evidence(net, 3, rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(exact_propagate(net, ev));
  }
}
BENCHMARK(BM_ExactPropagate)->Arg(20)->Arg(40);

WeightedSampleSet gaussian_blobs(std::size_t rows, int dims, uint64_t seed) {
  WeightedSampleSet s;
  for (int i = 0; i < dims; ++i) s.scope.push_back(i);
  s.values.resize(rows * dims);
  s.weights.assign(rows, 1.0);
  RandomStream rng(seed);
  for (std::size_t r = 0; r < rows; ++r) {
    const double center = rng.uniform01() < 0.5 ? -3.0 : 3.0;
    for (int i = 0; i < dims; ++i) s.values[r * dims + i] = center + rng.normal();
  }
  return s;
}

void BM_GmmFit(benchmark::State& state) {
  auto s = gaussian_blobs(static_cast<std::size_t>(state.range(0)), 3, 11);
  EmConfig cfg;
  cfg.components = 5;
  for (auto _ : state) {
    benchmark::DoNotOptimize(fit_gmm(s.values, 3, s.weights, cfg));
  }
}
BENCHMARK(BM_GmmFit)->Arg(500)->Arg(2000);

void BM_DensityTreeLearn(benchmark::State& state) {
  HybridNetwork net = thermostat_network();
  RandomStream rng(3);
  WeightedSampleSet s = prior_sample(net, static_cast<std::size_t>(state.range(0)), rng);
  DtConfig cfg;
  for (auto _ : state) {
    benchmark::DoNotOptimize(dt_learn(s, net, cfg));
  }
}
BENCHMARK(BM_DensityTreeLearn)->Arg(1000)->Arg(3000);

void BM_ApproxPass(benchmark::State& state) {
  HybridNetwork net = thermostat_network();
  Scenario sc = thermostat_easy(net);
  ApproxConfig cfg;
  cfg.samples_per_clique = static_cast<std::size_t>(state.range(0));
  cfg.early_stop_tv = 0.0;
  for (auto _ : state) {
    state.PauseTiming();
    ApproxState st = approx_init(net, sc.evidence, cfg);
    state.ResumeTiming();
    approx_run(st, 2);
    benchmark::DoNotOptimize(st.potentials.size());
  }
}
BENCHMARK(BM_ApproxPass)->Unit(benchmark::kMillisecond)->Arg(500)->Arg(1000);

}  // namespace

BENCHMARK_MAIN();
