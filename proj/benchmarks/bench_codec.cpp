#include <benchmark/benchmark.h>

#include <random>

#include "evkit/codec.hpp"
#include "generators.hpp"

namespace {

evkit::EventStream stream_of(std::int64_t n) {
  std::mt19937_64 rng(1);
  return gen::random_stream(rng, {1280, 720}, static_cast<std::size_t>(n), 60'000'000);
}

void encode(benchmark::State& state, evkit::EventFormat format) {
  const auto stream = stream_of(state.range(0));
  for (auto _ : state) {
    auto bytes = evkit::encode_events(stream, format);
    benchmark::DoNotOptimize(bytes.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void decode(benchmark::State& state, evkit::EventFormat format) {
  const auto bytes = evkit::encode_events(stream_of(state.range(0)), format);
  for (auto _ : state) {
    auto result = evkit::decode_events(bytes, format);
    benchmark::DoNotOptimize(result);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
  state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(bytes.size()));
}

void BM_EncodeEvb(benchmark::State& state) { encode(state, evkit::EventFormat::evb); }
void BM_DecodeEvb(benchmark::State& state) { decode(state, evkit::EventFormat::evb); }
void BM_EncodeCsv(benchmark::State& state) { encode(state, evkit::EventFormat::csv); }
void BM_DecodeCsv(benchmark::State& state) { decode(state, evkit::EventFormat::csv); }

}  // namespace

BENCHMARK(BM_EncodeEvb)->Arg(1 << 14)->Arg(1 << 20);
BENCHMARK(BM_DecodeEvb)->Arg(1 << 14)->Arg(1 << 20);
BENCHMARK(BM_EncodeCsv)->Arg(1 << 14)->Arg(1 << 20);
BENCHMARK(BM_DecodeCsv)->Arg(1 << 14)->Arg(1 << 20);

BENCHMARK_MAIN();
