#include <benchmark/benchmark.h>

#include <string>
#include <vector>

#include "ccchain/merkle.hpp"

namespace {

std::vector<ccchain::Hash32> leaves(std::size_t n) {
  std::vector<ccchain::Hash32> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(ccchain::sha256("leaf" + std::to_string(i)));
  return out;
}

void BM_Build(benchmark::State& state) {
  const auto l = leaves(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(ccchain::MerkleTree::build(l).root());
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_ProveVerify(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto tree = ccchain::MerkleTree::build(leaves(n));
  std::size_t i = 0;
  for (auto _ : state) {
    const auto proof = tree.prove(i++ % n);
    benchmark::DoNotOptimize(ccchain::verify_against(proof, tree.root(), n));
  }
}

}  // namespace

BENCHMARK(BM_Build)->RangeMultiplier(8)->Range(8, 32768);
BENCHMARK(BM_ProveVerify)->RangeMultiplier(8)->Range(8, 32768);

BENCHMARK_MAIN();
