#include <benchmark/benchmark.h>

#include <map>

#include "ccchain/simnet.hpp"

namespace {

ccchain::BinaryGraph& graph(std::uint64_t n) {
  static std::map<std::uint64_t, ccchain::BinaryGraph> cache;
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, ccchain::build_binary_graph(n)).first;
  return it->second;
}

void BM_Trace(benchmark::State& state) {
  auto& g = graph(static_cast<std::uint64_t>(state.range(0)));
  ccchain::TraceBench last;
  for (auto _ : state) {
    last = ccchain::bench_trace(g, false);
    state.SetIterationTime(last.elapsed_ms / 1000.0);
  }
  state.counters["bytes"] = static_cast<double>(last.bytes);
  state.counters["requests"] = static_cast<double>(last.requests);
}

void BM_Track(benchmark::State& state) {
  auto& g = graph(static_cast<std::uint64_t>(state.range(0)));
  ccchain::TraceBench last;
  for (auto _ : state) {
    last = ccchain::bench_trace(g, true);
    state.SetIterationTime(last.elapsed_ms / 1000.0);
  }
  state.counters["bytes"] = static_cast<double>(last.bytes);
  state.counters["requests"] = static_cast<double>(last.requests);
}

}  // namespace

BENCHMARK(BM_Trace)->Arg(1)->Arg(3)->Arg(7)->Arg(15)->Arg(31)->Arg(63)->UseManualTime();
BENCHMARK(BM_Track)->Arg(1)->Arg(3)->Arg(7)->Arg(15)->Arg(31)->Arg(63)->UseManualTime();

BENCHMARK_MAIN();
