#pragma once

// Cross-company tracing (backward to raw materials), tracking (forward along
// one path to a final product) and double-consumption audits.
//
// Wire request:  {productId, direction, actionId?, requester}
// Wire response: {action, records, proof, epochIndex, hints, unresolved}
//              | {refusal}
//              | {error: "not-found" | "not-yet-witnessed", message}
//
// Without actionId the responder answers with the record currently supplying
// the product. Hints name the next action to ask for, so each action is
// requested at most once per trace.

#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ccchain/channel.hpp"
#include "ccchain/codec.hpp"
#include "ccchain/company_node.hpp"
#include "ccchain/public_ledger.hpp"

namespace ccchain {

enum class Direction { Backward, Forward };

std::string_view direction_name(Direction d);
std::optional<Direction> parse_direction(std::string_view name);

struct TraceRequest {
  ProductId product_id;
  Direction direction = Direction::Backward;
  std::optional<ActionId> action_id;
  std::string requester;
};

json trace_request_to_json(const TraceRequest& r);
TraceRequest trace_request_from_json(const json& j);

struct TraceHint {
  CompanyId company;
  ProductId product;
  ActionId action_id;

  bool operator==(const TraceHint&) const = default;
};

// Branch ends the responder reports instead of a hint.
struct Unresolved {
  ProductId product;
  std::string reason;  // "external-source", "held", "sold", "unconfirmed-export", "unlinked-import"

  bool operator==(const Unresolved&) const = default;
};

// Decides per request whether the record may be disclosed.
using TracePolicy = std::function<bool(const std::string& requester, const Record& record)>;

inline TracePolicy allow_all() {
  return [](const std::string&, const Record&) { return true; };
}

json serve_trace(const CompanyNode& node, const TraceRequest& request,
                 const TracePolicy& policy = allow_all());

// Wraps serve_trace as a channel handler. Malformed requests get
// {error: "bad-request"}.
Handler make_trace_handler(const CompanyNode& node, TracePolicy policy = allow_all());

struct TraceNode {
  CompanyId company;
  Record record;
  std::uint64_t epoch_index = 0;
  bool verified = false;
  std::vector<ProductRecord> products;
};

// supplier -> successor on one product. A consumption edge when the
// successor lists the product among its inputs; otherwise a custody edge
// (export -> import, export -> retract).
struct TraceEdge {
  ActionId from;
  ActionId to;
  ProductId product;

  bool operator==(const TraceEdge&) const = default;
  auto operator<=>(const TraceEdge&) const = default;
};

struct FrontierEntry {
  CompanyId company;
  ProductId product;
  std::optional<ActionId> action_id;
  std::string reason;  // "withheld", "unverified", "unreachable", "not-found", "not-yet-witnessed", or a responder reason
};

struct TraceStats {
  std::uint64_t requests = 0;
  std::uint64_t witness_fetches = 0;
  std::uint64_t bytes = 0;
  double elapsed_ms = 0;
};

struct TraceResult {
  Direction direction = Direction::Backward;
  bool single_path = false;
  ProductId start_product;
  CompanyId start_company;
  std::map<ActionId, TraceNode> nodes;
  std::vector<TraceEdge> edges;
  std::vector<FrontierEntry> frontier;
  // Track only: the visited records from the start to the terminal.
  std::vector<ActionId> path;
  TraceStats stats;

  std::vector<ActionId> verified_ids() const;
};

struct TraceOptions {
  std::string requester = "anonymous";
  // Issue each breadth-first level concurrently.
  bool parallel = false;
};

class Tracer {
 public:
  Tracer(Channel& channel, const LedgerBackend& ledger, TraceOptions options = {})
      : channel_(channel), ledger_(ledger), options_(std::move(options)) {}

  // Full provenance: every ancestor (Backward) or every descendant (Forward).
  // Throws Error(NotFound) or Error(NotYetWitnessed) if the start company
  // cannot answer for the product at all.
  TraceResult trace(const ProductId& product, const CompanyId& start_company,
                    Direction direction = Direction::Backward);

  // Forward along a single path to a terminal product.
  TraceResult track(const ProductId& product, const CompanyId& start_company);

 private:
  TraceResult run(const ProductId& product, const CompanyId& start_company, Direction direction,
                  bool single_path);

  Channel& channel_;
  const LedgerBackend& ledger_;
  TraceOptions options_;
};

bool is_consumption_edge(const TraceResult& result, const TraceEdge& edge);

struct DoubleConsumption {
  ProductId product;
  std::vector<ActionId> consumers;

  bool operator==(const DoubleConsumption&) const = default;
};

// Products consumed more than once out of the same supplying record among
// verified nodes. An export cancelled by a RetractExport whose referenced
// complaint is on the ledger, matches the export, and has no valid response
// within the window does not count.
std::vector<DoubleConsumption> audit_double_consumption(
    const TraceResult& result, const LedgerBackend& ledger,
    std::uint64_t response_window_ticks = 2);

// Union of several traces over the same network (e.g. one per raw material).
TraceResult merge_results(const std::vector<TraceResult>& results);

json trace_result_to_json(const TraceResult& result);
std::string trace_report(const TraceResult& result);

}  // namespace ccchain
