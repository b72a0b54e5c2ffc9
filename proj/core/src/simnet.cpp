#include "ccchain/simnet.hpp"

#include <algorithm>
#include <functional>

#include "ccchain/encoding.hpp"
#include "ccchain/error.hpp"

namespace ccchain {

ProductSpec padded_spec(std::string name, std::vector<Detail> details, std::size_t target_bytes) {
  const auto base = canonical_encode(ProductRecord::make(name, details, Nonce16{})).size();
  constexpr std::size_t kFillerOverhead = 4 + 6 + 4;  // key length, "filler", value length
  if (base + kFillerOverhead < target_bytes) {
    details.push_back({"filler", std::string(target_bytes - base - kFillerOverhead, 'x')});
  }
  return {std::move(name), std::move(details)};
}

Network::Network(SimConfig config)
    : config_(config),
      channel_(config.channel_latency),
      nonces_(config.deterministic
                  ? std::shared_ptr<NonceSource>(std::make_shared<SeededNonceSource>(config.rng_seed))
                  : std::shared_ptr<NonceSource>(std::make_shared<SystemNonceSource>())),
      rng_(config.rng_seed ^ 0x9e3779b97f4a7c15ULL) {}

CompanyNode& Network::add_company(const std::string& name, NodeOptions options,
                                  TracePolicy policy) {
  const auto id = CompanyId::from_seed(name);
  if (nodes_.contains(id)) throw Error(ErrorCode::InvalidArgument, "duplicate company " + name);
  options.epoch_length_ticks = config_.epoch_length_ticks;
  auto node = std::make_unique<CompanyNode>(id, ledger_, nonces_, options);
  channel_.attach(id, make_trace_handler(*node, std::move(policy)));
  order_.push_back(id);
  names_[id] = name;
  return *nodes_.emplace(id, std::move(node)).first->second;
}

void Network::set_policy(const CompanyId& company, TracePolicy policy) {
  channel_.attach(company, make_trace_handler(node(company), std::move(policy)));
}

CompanyNode& Network::node(const CompanyId& id) {
  auto it = nodes_.find(id);
  if (it == nodes_.end()) throw Error(ErrorCode::NotFound, "unknown company " + id.hex());
  return *it->second;
}

const CompanyNode& Network::node(const CompanyId& id) const {
  auto it = nodes_.find(id);
  if (it == nodes_.end()) throw Error(ErrorCode::NotFound, "unknown company " + id.hex());
  return *it->second;
}

CompanyNode& Network::node(const std::string& name) { return node(CompanyId::from_seed(name)); }

std::string Network::name_of(const CompanyId& id) const {
  auto it = names_.find(id);
  return it == names_.end() ? id.hex() : it->second;
}

Hash32 Network::next_secret() {
  Hash32 h;
  if (config_.deterministic) {
    for (std::size_t i = 0; i < h.size(); i += 8) {
      const auto word = rng_();
      for (std::size_t b = 0; b < 8; ++b) h.bytes[i + b] = static_cast<Byte>(word >> (8 * b));
    }
    return h;
  }
  const auto a = nonces_->next();
  const auto b = nonces_->next();
  std::copy(a.bytes.begin(), a.bytes.end(), h.bytes.begin());
  std::copy(b.bytes.begin(), b.bytes.end(), h.bytes.begin() + 16);
  return h;
}

Nonce16 Network::next_nonce() {
  if (!config_.deterministic) return nonces_->next();
  Nonce16 n;
  for (std::size_t i = 0; i < n.size(); i += 8) {
    const auto word = rng_();
    for (std::size_t b = 0; b < 8; ++b) n.bytes[i + b] = static_cast<Byte>(word >> (8 * b));
  }
  return n;
}

TransferTiming Network::timing() const {
  return {config_.dispute_deadline_ticks, config_.dispute_deadline_ticks};
}

void Network::cut_all() {
  for (const auto& id : order_) {
    auto& n = *nodes_.at(id);
    if (n.pending_count() > 0) n.cut_epoch();
  }
}

TransferOutcome Network::transfer(const CompanyId& from, const CompanyId& to,
                                  std::vector<ProductId> products) {
  auto& exporter = node(from);
  auto& importer = node(to);
  TransferOutcome out{open_session(from, to, next_secret(), next_nonce(), std::move(products),
                                   timing()),
                      {},
                      {}};
  out.export_id = initiate_export(exporter, out.sessions.exporter).id;
  exporter.cut_epoch();
  const auto claim_wire = export_claim_to_json(share_export(exporter, out.sessions.exporter)).dump();
  out.import_id =
      confirm_import(importer, out.sessions.importer, export_claim_from_json(parse_json(claim_wire)))
          .id;
  importer.cut_epoch();
  const auto confirmation_wire =
      import_confirmation_to_json(import_confirmation(importer, out.sessions.importer)).dump();
  accept_import_confirmation(exporter, out.sessions.exporter,
                             import_confirmation_from_json(parse_json(confirmation_wire)));
  return out;
}

Tracer Network::tracer(std::string requester) const {
  return Tracer(channel_, ledger_, {std::move(requester), !config_.deterministic});
}

std::set<ActionId> GroundTruth::ancestors_of(const ActionId& id) const {
  std::map<ActionId, std::vector<ActionId>> preds;
  for (const auto& e : edges) preds[e.to].push_back(e.from);
  std::set<ActionId> seen{id};
  std::vector<ActionId> stack{id};
  while (!stack.empty()) {
    const auto cur = stack.back();
    stack.pop_back();
    for (const auto& p : preds[cur]) {
      if (seen.insert(p).second) stack.push_back(p);
    }
  }
  return seen;
}

std::vector<ActionId> GroundTruth::forward_path(const ActionId& start) const {
  std::map<ActionId, std::set<ActionId>> succ;
  for (const auto& e : edges) succ[e.from].insert(e.to);
  std::vector<ActionId> path{start};
  std::set<ActionId> seen{start};
  for (;;) {
    auto it = succ.find(path.back());
    if (it == succ.end() || it->second.size() != 1) break;
    const auto next = *it->second.begin();
    if (!seen.insert(next).second) break;
    path.push_back(next);
  }
  return path;
}

BinaryGraph build_binary_graph(std::uint64_t produce_node_count, SimConfig config,
                               GraphOptions options) {
  if (produce_node_count == 0) {
    throw Error(ErrorCode::InvalidArgument, "binary graph needs at least one produce node");
  }
  BinaryGraph g;
  g.network = std::make_unique<Network>(config);
  auto& net = *g.network;
  const auto n = produce_node_count;
  const auto pad = config.action_payload_bytes;

  struct Built {
    CompanyId company;
    ProductId product;
    ActionId supplier;
  };

  std::function<Built(std::uint64_t)> build = [&](std::uint64_t i) -> Built {
    if (i >= n) {
      auto& leaf = net.add_company("leaf-" + std::to_string(i));
      auto made = leaf.record_create(padded_spec("raw-" + std::to_string(i), {}, pad));
      g.truth.actions.emplace(made.action.id, leaf.id());
      g.leaves.push_back({made.products.front().id, leaf.id(), made.action.id});
      return {leaf.id(), made.products.front().id, made.action.id};
    }
    const auto left = build(2 * i + 1);
    const auto right = build(2 * i + 2);
    NodeOptions node_options;
    node_options.enforce_single_consumption = options.lenient_step != i;
    auto& self = net.add_company("step-" + std::to_string(i), node_options);
    std::vector<ProductId> inputs;
    std::vector<ActionId> imports;
    for (const auto& child : {left, right}) {
      const auto t = net.transfer(child.company, self.id(), {child.product});
      g.truth.actions.emplace(t.export_id, child.company);
      g.truth.actions.emplace(t.import_id, self.id());
      g.truth.edges.insert({child.supplier, t.export_id, child.product});
      g.truth.edges.insert({t.export_id, t.import_id, child.product});
      inputs.push_back(child.product);
      imports.push_back(t.import_id);
    }
    auto made = self.record_produce(inputs, {padded_spec("part-" + std::to_string(i), {}, pad)});
    g.truth.actions.emplace(made.action.id, self.id());
    for (std::size_t k = 0; k < inputs.size(); ++k) {
      g.truth.edges.insert({imports[k], made.action.id, inputs[k]});
    }
    net.ledger().advance_tick(1);
    return {self.id(), made.products.front().id, made.action.id};
  };

  const auto root = build(0);
  net.cut_all();
  g.root_company = root.company;
  g.root_product = root.product;
  g.root_action = root.supplier;
  return g;
}

TraceBench bench_trace(BinaryGraph& graph, bool track) {
  auto& net = *graph.network;
  auto tracer = net.tracer();
  TraceResult r;
  if (track) {
    std::mt19937_64 rng(net.config().rng_seed);
    const auto& leaf = graph.leaves.at(rng() % graph.leaves.size());
    r = tracer.track(leaf.product, leaf.company);
  } else {
    r = tracer.trace(graph.root_product, graph.root_company);
  }
  TraceBench out;
  out.track = track;
  out.action_count = r.nodes.size();
  out.elapsed_ms = r.stats.elapsed_ms;
  out.bytes = r.stats.bytes;
  out.requests = r.stats.requests;
  out.witness_fetches = r.stats.witness_fetches;
  return out;
}

TraceBench bench_trace(std::uint64_t produce_node_count, bool track, SimConfig config) {
  auto graph = build_binary_graph(produce_node_count, config);
  auto out = bench_trace(graph, track);
  out.produce_node_count = produce_node_count;
  return out;
}

ActionBench bench_actions(ActionType type, std::size_t count, SimConfig config) {
  if (count == 0) throw Error(ErrorCode::InvalidArgument, "benchmark count must be positive");
  Network net(config);
  auto& a = net.add_company("bench-a");
  const auto pad = config.action_payload_bytes;

  std::vector<ProductId> stock;
  const bool consuming = type != ActionType::Create && type != ActionType::Buy;
  if (consuming) {
    const std::size_t per = type == ActionType::Produce || type == ActionType::Sell ? 2 : 1;
    for (std::size_t i = 0; i < count * per; ++i) {
      auto made = a.record_create(padded_spec("stock-" + std::to_string(i), {}, pad));
      stock.push_back(made.products.front().id);
    }
    a.cut_epoch();
  }
  CompanyNode* b = nullptr;
  if (type == ActionType::Export || type == ActionType::Import) b = &net.add_company("bench-b");

  const auto started = std::chrono::steady_clock::now();
  for (std::size_t i = 0; i < count; ++i) {
    switch (type) {
      case ActionType::Create:
        a.record_create(padded_spec("item", {}, pad));
        break;
      case ActionType::Buy: {
        // A purchase carries its external provenance on top of the usual payload.
        auto spec = padded_spec("item", {}, pad);
        spec.details.push_back({"source", "external-supplier"});
        spec.details.push_back({"invoice", "INV-" + std::to_string(i)});
        a.record_buy({std::move(spec)});
        break;
      }
      case ActionType::Produce: {
        const ProductId in[2] = {stock[2 * i], stock[2 * i + 1]};
        a.record_produce(in, {padded_spec("item", {}, pad)});
        break;
      }
      case ActionType::Sell: {
        const ProductId in[2] = {stock[2 * i], stock[2 * i + 1]};
        a.record_sell(in);
        break;
      }
      case ActionType::Export:
      case ActionType::Import:
        net.transfer(a.id(), b->id(), {stock[i]});
        break;
    }
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return {type, count, seconds, seconds > 0 ? static_cast<double>(count) / seconds : 0};
}

}  // namespace ccchain
