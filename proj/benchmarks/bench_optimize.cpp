#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "quditfuse/graphstate.hpp"
#include "quditfuse/haar.hpp"
#include "quditfuse/optimize.hpp"

using namespace quditfuse;

namespace {

Scenario pair_scenario(int d, int ancillae) {
  const QuditGraph g(QuditDim(d), {"r", "leg"}, {{"r", "leg"}});
  Scenario s;
  s.inputs = {ClusterInput(build_graph_state(g), "leg"), ClusterInput(build_graph_state(g), "leg")};
  for (int a = 0; a < ancillae; ++a) s.inputs.push_back(AncillaInput::basis(d));
  return s;
}

}  // namespace

// One objective evaluation: parameters to unitary, fusion, analysis.
static void BM_ObjectiveEvaluation(benchmark::State& state) {
  const Scenario s = pair_scenario(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  Objective obj;
  obj.mode = ObjectiveMode::EntropyThreshold;
  obj.entropy_threshold = 0.5;
  HaarSampler sampler(11);
  const int k = s.physical_modes();
  std::mt19937_64 rng(12);
  std::normal_distribution<double> n(0.0, 0.1);
  std::vector<double> x(static_cast<std::size_t>(k * k));
  for (auto& v : x) v = n(rng);
  const CMatrix base = haar_sample(sampler, k).matrix();
  for (auto _ : state) {
    const CMatrix u = base * UnitaryParams(k, x).unitary();
    benchmark::DoNotOptimize(evaluate(Interferometer(u), s, obj).value);
  }
}
BENCHMARK(BM_ObjectiveEvaluation)->Args({2, 0})->Args({3, 0})->Args({3, 1})->Args({4, 1})->Unit(benchmark::kMicrosecond);

static void BM_OptimizeSmallBudget(benchmark::State& state) {
  const Scenario s = pair_scenario(2, 0);
  Objective obj;
  OptimizerConfig cfg;
  cfg.budget = state.range(0);
  cfg.restarts = 1;
  cfg.threads = 1;
  for (auto _ : state) benchmark::DoNotOptimize(optimize(s, obj, cfg).best_value);
}
BENCHMARK(BM_OptimizeSmallBudget)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
