#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "evkit/eval.hpp"
#include "oracles.hpp"

namespace {

struct Workload {
  std::vector<evkit::Annotation> gts;
  std::vector<evkit::Detection> dets;
};

// Concatenates random scenes on disjoint timestamps.
Workload workload(int scenes) {
  std::mt19937_64 rng(3);
  Workload w;
  for (int i = 0; i < scenes; ++i) {
    auto scene = oracle::random_scene(rng, 50);
    const evkit::Timestamp shift = static_cast<evkit::Timestamp>(i) * 100'000;
    for (auto& g : scene.gts) g.t += shift;
    for (auto& d : scene.dets) d.t += shift;
    w.gts.insert(w.gts.end(), scene.gts.begin(), scene.gts.end());
    w.dets.insert(w.dets.end(), scene.dets.begin(), scene.dets.end());
  }
  return w;
}

void BM_EvaluateCoco(benchmark::State& state) {
  const auto w = workload(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    auto report = evkit::evaluate(w.gts, w.dets);
    benchmark::DoNotOptimize(report.map);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(w.dets.size()));
}

}  // namespace

BENCHMARK(BM_EvaluateCoco)->Arg(10)->Arg(1000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
