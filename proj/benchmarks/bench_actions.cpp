#include <benchmark/benchmark.h>

#include "ccchain/simnet.hpp"

namespace {

using ccchain::ActionType;

// Each iteration records a batch on a fresh node; only the recording loop is
// timed, so the fixture setup inside bench_actions stays out of the figure.
void BM_Record(benchmark::State& state, ActionType type) {
  const auto batch = static_cast<std::size_t>(state.range(0));
  std::size_t done = 0;
  for (auto _ : state) {
    const auto b = ccchain::bench_actions(type, batch);
    state.SetIterationTime(b.seconds);
    done += b.count;
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(done));
}

}  // namespace

BENCHMARK_CAPTURE(BM_Record, create, ActionType::Create)->Arg(1000)->UseManualTime();
BENCHMARK_CAPTURE(BM_Record, produce, ActionType::Produce)->Arg(1000)->UseManualTime();
BENCHMARK_CAPTURE(BM_Record, buy, ActionType::Buy)->Arg(1000)->UseManualTime();
BENCHMARK_CAPTURE(BM_Record, sell, ActionType::Sell)->Arg(1000)->UseManualTime();
BENCHMARK_CAPTURE(BM_Record, export, ActionType::Export)->Arg(200)->UseManualTime();
BENCHMARK_CAPTURE(BM_Record, import, ActionType::Import)->Arg(200)->UseManualTime();

BENCHMARK_MAIN();
