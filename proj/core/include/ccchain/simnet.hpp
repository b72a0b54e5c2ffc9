#pragma once

// Multi-node harness: companies, one shared ledger and an in-process channel,
// plus the binary production-graph workload and the benchmarks built on it.

#include <chrono>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "ccchain/channel.hpp"
#include "ccchain/company_node.hpp"
#include "ccchain/public_ledger.hpp"
#include "ccchain/trace.hpp"
#include "ccchain/transfer.hpp"

namespace ccchain {

struct SimConfig {
  std::uint64_t epoch_length_ticks = 1;
  std::uint64_t dispute_deadline_ticks = 2;
  std::uint64_t rng_seed = 1;
  std::size_t action_payload_bytes = 200;
  // Seeded nonces and serialized tracing. Off: OS randomness and parallel
  // trace levels.
  bool deterministic = true;
  std::chrono::microseconds channel_latency{0};
};

// A product spec padded with a "filler" detail so that its canonical
// encoding is at least target_bytes long.
ProductSpec padded_spec(std::string name, std::vector<Detail> details, std::size_t target_bytes);

struct TransferOutcome {
  SessionPair sessions;
  ActionId export_id;
  ActionId import_id;
};

class Network {
 public:
  explicit Network(SimConfig config = {});

  Network(const Network&) = delete;
  Network& operator=(const Network&) = delete;

  // Company ids derive from the name, so equal names give equal ids across runs.
  CompanyNode& add_company(const std::string& name, NodeOptions options = {},
                           TracePolicy policy = allow_all());
  void set_policy(const CompanyId& company, TracePolicy policy);

  CompanyNode& node(const CompanyId& id);
  const CompanyNode& node(const CompanyId& id) const;
  CompanyNode& node(const std::string& name);
  const std::vector<CompanyId>& companies() const { return order_; }
  std::string name_of(const CompanyId& id) const;

  PublicLedger& ledger() { return ledger_; }
  const PublicLedger& ledger() const { return ledger_; }
  Channel& channel() { return channel_; }
  const SimConfig& config() const { return config_; }

  Hash32 next_secret();
  Nonce16 next_nonce();
  TransferTiming timing() const;

  // Cuts an epoch at every node with pending records.
  void cut_all();

  // Honest export/import round trip including epoch cuts and the JSON
  // exchange of claim and confirmation.
  TransferOutcome transfer(const CompanyId& from, const CompanyId& to,
                           std::vector<ProductId> products);

  Tracer tracer(std::string requester = "auditor") const;

 private:
  SimConfig config_;
  PublicLedger ledger_;
  mutable Channel channel_;
  std::shared_ptr<NonceSource> nonces_;
  std::mt19937_64 rng_;
  std::vector<CompanyId> order_;
  std::map<CompanyId, std::unique_ptr<CompanyNode>> nodes_;
  std::map<CompanyId, std::string> names_;
};

// Oracle: every action and supplier -> successor edge, recorded while the
// graph is built.
struct GroundTruth {
  std::map<ActionId, CompanyId> actions;
  std::set<TraceEdge> edges;

  // The action itself plus everything it transitively depends on.
  std::set<ActionId> ancestors_of(const ActionId& id) const;
  // Forward from `start` while there is exactly one successor.
  std::vector<ActionId> forward_path(const ActionId& start) const;
};

struct GraphLeaf {
  ProductId product;
  CompanyId company;
  ActionId create_id;
};

struct BinaryGraph {
  std::unique_ptr<Network> network;
  GroundTruth truth;
  ProductId root_product;
  CompanyId root_company;
  ActionId root_action;
  std::vector<GraphLeaf> leaves;
};

struct GraphOptions {
  // This produce step gets a node that does not enforce single consumption.
  std::optional<std::uint64_t> lenient_step;
};

// Heap-indexed tree of produce_node_count produce steps (children of node i
// are 2i+1 and 2i+2; indices past the last produce node are raw materials).
// Every step and every raw material has its own company; every edge is a full
// export/import transfer; all records end up witnessed.
BinaryGraph build_binary_graph(std::uint64_t produce_node_count, SimConfig config = {},
                               GraphOptions options = {});

struct TraceBench {
  std::uint64_t produce_node_count = 0;
  bool track = false;
  std::size_t action_count = 0;
  double elapsed_ms = 0;
  std::uint64_t bytes = 0;
  std::uint64_t requests = 0;
  std::uint64_t witness_fetches = 0;
};

// Builds the graph (not timed) and traces from the root product, or tracks
// from a seeded-random raw material.
TraceBench bench_trace(std::uint64_t produce_node_count, bool track, SimConfig config = {});
TraceBench bench_trace(BinaryGraph& graph, bool track);

struct ActionBench {
  ActionType type = ActionType::Create;
  std::size_t count = 0;
  double seconds = 0;
  double per_second = 0;
};

// Times `count` recordings of `type` on a fresh node, excluding fixture
// setup. Export and Import are timed as full two-node round trips.
ActionBench bench_actions(ActionType type, std::size_t count, SimConfig config = {});

}  // namespace ccchain
