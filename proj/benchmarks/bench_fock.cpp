#include <benchmark/benchmark.h>

#include <vector>

#include "quditfuse/fock.hpp"
#include "quditfuse/haar.hpp"

using namespace quditfuse;

// Arrangement sum for M photons spread over K = M * 3 modes.
static void BM_CoeffMulti(benchmark::State& state) {
  const int photons = static_cast<int>(state.range(0));
  const int modes = 3 * photons;
  HaarSampler sampler(7);
  const Interferometer u = haar_sample(sampler, modes);
  const RowLayout layout(std::vector<int>(static_cast<std::size_t>(photons), 3), 0);
  const std::vector<int> in(static_cast<std::size_t>(photons), 1);
  std::vector<int> clicks;
  for (int m = 0; m < photons; ++m) clicks.push_back(m / 2);  // pairs collide
  const DetectionPattern p(clicks);
  for (auto _ : state) benchmark::DoNotOptimize(coeff_multi(u, layout, in, p));
}
BENCHMARK(BM_CoeffMulti)->DenseRange(2, 5);

static void BM_OracleExpand(benchmark::State& state) {
  const int photons = static_cast<int>(state.range(0));
  HaarSampler sampler(8);
  const Interferometer u = haar_sample(sampler, 2 * photons);
  const RowLayout layout(std::vector<int>(static_cast<std::size_t>(photons), 2), 0);
  const std::vector<int> in(static_cast<std::size_t>(photons), 0);
  for (auto _ : state) benchmark::DoNotOptimize(oracle_expand(u, layout, in));
}
BENCHMARK(BM_OracleExpand)->DenseRange(2, 4);

static void BM_EnumeratePatterns(benchmark::State& state) {
  const int modes = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(enumerate_patterns(modes, 3));
}
BENCHMARK(BM_EnumeratePatterns)->Arg(8)->Arg(12)->Arg(16);

BENCHMARK_MAIN();
