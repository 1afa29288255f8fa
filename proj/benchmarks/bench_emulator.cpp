#include <benchmark/benchmark.h>

#include <random>
#include <thread>

#include "evkit/emulator.hpp"
#include "generators.hpp"

namespace {

// 320x240, 10 frames of uniform noise, so most pixels fire on most frames.
void BM_Emulate(benchmark::State& state) {
  std::mt19937_64 rng(2);
  const auto frames = gen::random_frames(rng, 320, 240, 10);
  evkit::EmulatorParams params;
  params.sigma_pos = params.sigma_neg = 0.02;
  const auto tiles = static_cast<std::size_t>(state.range(0));
  const evkit::EmulateOptions options{tiles, tiles};
  std::size_t events = 0;
  for (auto _ : state) {
    const auto out = evkit::emulate(frames, params, options);
    events += out.size();
    benchmark::DoNotOptimize(out.events().data());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(events));
  state.counters["pixel_frames/s"] = benchmark::Counter(
      static_cast<double>(state.iterations()) * 320 * 240 * 10, benchmark::Counter::kIsRate);
}

}  // namespace

BENCHMARK(BM_Emulate)->Arg(1)->Arg(2)->Arg(8)->UseRealTime()->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
