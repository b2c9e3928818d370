#include <benchmark/benchmark.h>

#include "blocklab/cycles.hpp"
#include "blocklab/harness.hpp"
#include "blocklab/limit_law.hpp"
#include "blocklab/sampler.hpp"
#include "blocklab/spectral.hpp"

using namespace blocklab;

static void BM_SampleER(benchmark::State& state) {
  long n = state.range(0);
  uint64_t i = 0;
  for (auto _ : state) {
    Rng rng(Seed{1, i++});
    benchmark::DoNotOptimize(sample_er_hypergraph(n, 3.0, 2, rng));
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_SampleER)->Arg(1000)->Arg(10000)->Arg(100000);

static void BM_SampleHsbm(benchmark::State& state) {
  long n = state.range(0);
  HsbmSpec h = symmetric_sbm(2, 5, 1);
  uint64_t i = 0;
  for (auto _ : state) {
    Rng rng(Seed{2, i++});
    benchmark::DoNotOptimize(sample_hsbm(h, n, rng));
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_SampleHsbm)->Arg(1000)->Arg(10000)->Arg(100000);

static void BM_CycleCensus(benchmark::State& state) {
  long n = state.range(0);
  int K = static_cast<int>(state.range(1));
  Rng rng(Seed{3, 0});
  FactorGraph g = sample_er_hypergraph(n, 3.0, 2, rng);
  for (auto _ : state) benchmark::DoNotOptimize(count_hyper_cycles(g, K));
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_CycleCensus)->Args({1000, 5})->Args({10000, 6})->Args({100000, 6});

static void BM_TestStatistic(benchmark::State& state) {
  long n = state.range(0);
  HsbmSpec h = symmetric_sbm(2, 5, 1);
  int K = default_kn(n);
  auto alphas = hsbm_alphas(h, K);
  Rng rng(Seed{4, 0});
  FactorGraph g = sample_er_hypergraph(n, h.d, h.k, rng);
  for (auto _ : state) benchmark::DoNotOptimize(test_statistic(g, alphas, K));
}
BENCHMARK(BM_TestStatistic)->Arg(1000)->Arg(10000);

static void BM_LimitLawDraw(benchmark::State& state) {
  LimitLawConfig cfg = make_limit_law(symmetric_sbm(2, 3, 2));
  uint64_t i = 0;
  for (auto _ : state) {
    Rng rng(Seed{5, i++});
    benchmark::DoNotOptimize(sample_L_infinity(cfg, rng));
  }
}
BENCHMARK(BM_LimitLawDraw);

static void BM_KsThreshold(benchmark::State& state) {
  int q = static_cast<int>(state.range(0));
  ModelSpec spec = hsbm_to_factor_spec(symmetric_sbm(q, 5, 1));
  for (auto _ : state) benchmark::DoNotOptimize(ks_threshold(spec));
}
BENCHMARK(BM_KsThreshold)->Arg(2)->Arg(4)->Arg(8);

BENCHMARK_MAIN();
