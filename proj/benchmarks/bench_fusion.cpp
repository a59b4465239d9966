#include <benchmark/benchmark.h>

#include <vector>

#include "quditfuse/analysis.hpp"
#include "quditfuse/fusion.hpp"
#include "quditfuse/graphstate.hpp"
#include "quditfuse/haar.hpp"

using namespace quditfuse;

namespace {

ClusterInput pair_cluster(int d) {
  const QuditGraph g(QuditDim(d), {"r", "leg"}, {{"r", "leg"}});
  return ClusterInput(build_graph_state(g), "leg");
}

std::vector<FusionInput> inputs_for(int d, int ancillae) {
  std::vector<FusionInput> in{pair_cluster(d), pair_cluster(d)};
  for (int a = 0; a < ancillae; ++a) in.push_back(AncillaInput::basis(d));
  return in;
}

}  // namespace

// Full outcome table for two clusters plus ancillas on physical modes.
static void BM_FusePhysical(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const int ancillae = static_cast<int>(state.range(1));
  const auto inputs = inputs_for(d, ancillae);
  HaarSampler sampler(3);
  const Interferometer u = haar_sample(sampler, d * (2 + ancillae));
  for (auto _ : state) benchmark::DoNotOptimize(fuse_physical(inputs, u, 0));
}
BENCHMARK(BM_FusePhysical)->Args({2, 0})->Args({3, 0})->Args({4, 0})->Args({4, 1})->Args({5, 1});

static void BM_ReducedDensityAndEntropy(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const auto inputs = inputs_for(d, 0);
  HaarSampler sampler(4);
  const auto outs = fuse_physical(inputs, haar_sample(sampler, 2 * d), 0);
  for (auto _ : state) {
    double s = 0.0;
    for (const auto& o : outs) {
      if (o.heralded_state) s += entropy(reduced_density(*o.heralded_state, "V1"));
    }
    benchmark::DoNotOptimize(s);
  }
}
BENCHMARK(BM_ReducedDensityAndEntropy)->DenseRange(2, 5);

static void BM_HaarSample(benchmark::State& state) {
  HaarSampler sampler(5);
  const int modes = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(haar_sample(sampler, modes));
}
BENCHMARK(BM_HaarSample)->Arg(4)->Arg(8)->Arg(16);

BENCHMARK_MAIN();
