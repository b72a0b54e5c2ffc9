#include "ccchain/trace.hpp"

#include <algorithm>
#include <deque>
#include <future>
#include <set>
#include <sstream>

#include "ccchain/encoding.hpp"
#include "ccchain/error.hpp"
#include "ccchain/transfer.hpp"

namespace ccchain {

namespace {

bool has(std::span<const ProductId> ids, const ProductId& p) {
  return std::find(ids.begin(), ids.end(), p) != ids.end();
}

json error_reply(std::string_view code, const std::string& message) {
  return {{"error", code}, {"message", message}};
}

json hint_json(const CompanyId& company, const ProductId& product, const ActionId& action) {
  return {{"company", company}, {"productId", product}, {"actionId", action}};
}

json unresolved_json(const ProductId& product, std::string_view reason) {
  return {{"productId", product}, {"reason", reason}};
}

void backward_hints(const CompanyNode& node, const Record& rec, const ProductId& p, json& hints,
                    json& unresolved) {
  const ActionId& id = record_id(rec);
  if (const auto* r = as_retract(rec)) {
    hints.push_back(hint_json(node.id(), p, r->export_action_id));
    return;
  }
  const auto& a = std::get<Action>(rec);
  const auto suppliers = node.suppliers_of(id);
  auto supplier_hint = [&](std::size_t i) {
    if (i < suppliers.size() && !suppliers[i].is_zero()) {
      hints.push_back(hint_json(node.id(), a.inputs[i], suppliers[i]));
    } else {
      unresolved.push_back(unresolved_json(a.inputs[i], "unknown-supplier"));
    }
  };
  if (has(a.outputs, p)) {
    switch (a.type) {
      case ActionType::Create:
        break;
      case ActionType::Buy:
        unresolved.push_back(unresolved_json(p, "external-source"));
        break;
      case ActionType::Import:
        if (auto link = node.import_link(id)) {
          hints.push_back(hint_json(link->counterparty, p, link->action_id));
        } else {
          unresolved.push_back(unresolved_json(p, "unlinked-import"));
        }
        break;
      default:
        for (std::size_t i = 0; i < a.inputs.size(); ++i) supplier_hint(i);
    }
    return;
  }
  for (std::size_t i = 0; i < a.inputs.size(); ++i) {
    if (a.inputs[i] == p) supplier_hint(i);
  }
}

void consumer_hints(const CompanyNode& node, const ActionId& supplier, const ProductId& q,
                    json& hints, json& unresolved) {
  const auto consumers = node.consumers_after(supplier, q);
  if (consumers.empty()) unresolved.push_back(unresolved_json(q, "held"));
  for (const auto& c : consumers) hints.push_back(hint_json(node.id(), q, c));
}

void forward_hints(const CompanyNode& node, const Record& rec, const ProductId& p, json& hints,
                   json& unresolved) {
  const ActionId& id = record_id(rec);
  const auto* a = as_action(rec);
  if (!a || !has(a->inputs, p)) {
    consumer_hints(node, id, p, hints, unresolved);
    return;
  }
  switch (a->type) {
    case ActionType::Export: {
      auto link = node.export_link(id);
      auto retract = node.retracted_by(id);
      if (link) hints.push_back(hint_json(link->counterparty, p, link->action_id));
      if (retract) hints.push_back(hint_json(node.id(), p, *retract));
      if (!link && !retract) unresolved.push_back(unresolved_json(p, "unconfirmed-export"));
      break;
    }
    case ActionType::Sell:
      unresolved.push_back(unresolved_json(p, "sold"));
      break;
    default:
      for (const auto& q : a->outputs) consumer_hints(node, id, q, hints, unresolved);
  }
}

ErrorCode reply_error_code(const std::string& code) {
  if (code == "not-yet-witnessed") return ErrorCode::NotYetWitnessed;
  if (code == "not-found") return ErrorCode::NotFound;
  return ErrorCode::InvalidArgument;
}

}  // namespace

std::string_view direction_name(Direction d) {
  return d == Direction::Backward ? "backward" : "forward";
}

std::optional<Direction> parse_direction(std::string_view name) {
  if (name == "backward") return Direction::Backward;
  if (name == "forward") return Direction::Forward;
  return std::nullopt;
}

json trace_request_to_json(const TraceRequest& r) {
  json j{{"productId", r.product_id},
         {"direction", direction_name(r.direction)},
         {"requester", r.requester}};
  if (r.action_id) j["actionId"] = *r.action_id;
  return j;
}

TraceRequest trace_request_from_json(const json& j) {
  try {
    TraceRequest r;
    r.product_id = j.at("productId").get<ProductId>();
    auto d = parse_direction(j.at("direction").get<std::string>());
    if (!d) throw Error(ErrorCode::Parse, "unknown direction");
    r.direction = *d;
    if (j.contains("actionId") && !j.at("actionId").is_null()) {
      r.action_id = j.at("actionId").get<ActionId>();
    }
    r.requester = j.value("requester", std::string{});
    return r;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Parse, std::string("trace request: ") + e.what());
  }
}

json serve_trace(const CompanyNode& node, const TraceRequest& request, const TracePolicy& policy) {
  const ProductId& p = request.product_id;
  std::optional<Record> rec;
  if (request.action_id) {
    rec = node.find_record(*request.action_id);
    if (!rec || !record_involves(*rec, p)) {
      return error_reply("not-found", "no record " + to_hex(*request.action_id) +
                                          " involving product " + to_hex(p));
    }
  } else {
    auto supplier = node.current_supplier(p);
    if (!supplier) return error_reply("not-found", "unknown product " + to_hex(p));
    rec = node.find_record(*supplier);
  }
  const ActionId id = record_id(*rec);
  if (!node.is_witnessed(id)) {
    return error_reply("not-yet-witnessed", "record " + to_hex(id) + " not yet witnessed");
  }
  if (policy && !policy(request.requester, *rec)) return {{"refusal", "withheld"}};

  auto [proof, epoch] = node.proof_for(id);
  json hints = json::array();
  json unresolved = json::array();
  if (request.direction == Direction::Backward) {
    backward_hints(node, *rec, p, hints, unresolved);
  } else {
    forward_hints(node, *rec, p, hints, unresolved);
  }
  // Only the queried product's record is disclosed in full.
  json records = json::array();
  if (auto pr = node.product(p)) records.push_back(*pr);
  return {{"action", record_to_json(*rec)}, {"records", std::move(records)},
          {"proof", proof},                 {"epochIndex", epoch},
          {"hints", std::move(hints)},      {"unresolved", std::move(unresolved)}};
}

Handler make_trace_handler(const CompanyNode& node, TracePolicy policy) {
  return [&node, policy = std::move(policy)](const std::string& raw) {
    try {
      return serve_trace(node, trace_request_from_json(parse_json(raw)), policy).dump();
    } catch (const Error& e) {
      return error_reply("bad-request", e.what()).dump();
    }
  };
}

std::vector<ActionId> TraceResult::verified_ids() const {
  std::vector<ActionId> out;
  for (const auto& [id, n] : nodes) {
    if (n.verified) out.push_back(id);
  }
  return out;
}

TraceResult Tracer::trace(const ProductId& product, const CompanyId& start_company,
                          Direction direction) {
  return run(product, start_company, direction, false);
}

TraceResult Tracer::track(const ProductId& product, const CompanyId& start_company) {
  return run(product, start_company, Direction::Forward, true);
}

TraceResult Tracer::run(const ProductId& product, const CompanyId& start_company,
                        Direction direction, bool single_path) {
  struct Pending {
    CompanyId company;
    ProductId product;
    std::optional<ActionId> action;
  };

  const auto started = std::chrono::steady_clock::now();
  TraceResult result;
  result.direction = direction;
  result.single_path = single_path;
  result.start_product = product;
  result.start_company = start_company;

  std::set<ActionId> requested;
  std::set<TraceEdge> edges;
  std::map<std::pair<CompanyId, std::uint64_t>, std::optional<EpochWitness>> witnesses;

  auto witness = [&](const CompanyId& c, std::uint64_t epoch) -> const std::optional<EpochWitness>& {
    auto key = std::make_pair(c, epoch);
    auto it = witnesses.find(key);
    if (it == witnesses.end()) {
      ++result.stats.witness_fetches;
      it = witnesses.emplace(key, ledger_.get_witness(c, epoch)).first;
    }
    return it->second;
  };

  auto request_text = [&](const Pending& p) {
    return trace_request_to_json({p.product, direction, p.action, options_.requester}).dump();
  };

  auto call = [this](const CompanyId& to, const std::string& req) -> std::optional<std::string> {
    try {
      return channel_.call(to, req);
    } catch (const Error&) {
      return std::nullopt;
    }
  };

  std::vector<Pending> level{{start_company, product, std::nullopt}};
  bool first = true;
  while (!level.empty()) {
    std::vector<std::string> reqs;
    for (const auto& p : level) reqs.push_back(request_text(p));
    std::vector<std::optional<std::string>> replies(level.size());
    if (options_.parallel && level.size() > 1) {
      std::vector<std::future<std::optional<std::string>>> futures;
      for (std::size_t i = 0; i < level.size(); ++i) {
        futures.push_back(std::async(std::launch::async, call, level[i].company, reqs[i]));
      }
      for (std::size_t i = 0; i < level.size(); ++i) replies[i] = futures[i].get();
    } else {
      for (std::size_t i = 0; i < level.size(); ++i) replies[i] = call(level[i].company, reqs[i]);
    }

    std::vector<Pending> next;
    for (std::size_t i = 0; i < level.size(); ++i) {
      const auto& pend = level[i];
      auto frontier = [&](std::string reason) {
        result.frontier.push_back({pend.company, pend.product, pend.action, std::move(reason)});
      };
      ++result.stats.requests;
      result.stats.bytes += reqs[i].size();
      if (!replies[i]) {
        if (first) throw Error(ErrorCode::NotFound, "company " + pend.company.hex() + " unreachable");
        frontier("unreachable");
        continue;
      }
      result.stats.bytes += replies[i]->size();

      json reply;
      try {
        reply = parse_json(*replies[i]);
      } catch (const Error&) {
        frontier("unverified");
        continue;
      }
      if (reply.contains("error")) {
        const auto code = reply.at("error").get<std::string>();
        if (first) throw Error(reply_error_code(code), reply.value("message", code));
        frontier(code);
        continue;
      }
      if (reply.contains("refusal")) {
        frontier("withheld");
        continue;
      }

      TraceNode node;
      node.company = pend.company;
      bool verified = false;
      bool parsed = false;
      std::vector<json> hints;
      try {
        node.record = record_from_json(reply.at("action"));
        parsed = true;
        node.epoch_index = reply.at("epochIndex").get<std::uint64_t>();
        node.products = reply.at("records").get<std::vector<ProductRecord>>();
        const auto proof = reply.at("proof").get<MerkleProof>();
        const ActionId& id = record_id(node.record);
        verified = compute_id(node.record) == id && record_author(node.record) == pend.company &&
                   (!pend.action || *pend.action == id) &&
                   record_involves(node.record, pend.product) && proof.leaf == id;
        for (const auto& pr : node.products) {
          verified = verified && compute_id(pr) == pr.id && record_involves(node.record, pr.id);
        }
        if (verified) {
          const auto& w = witness(pend.company, node.epoch_index);
          verified = w && !w->is_sentinel() && verify_against(proof, w->root, w->action_count);
        }
        if (verified) {
          for (const auto& u : reply.at("unresolved")) {
            result.frontier.push_back({pend.company, u.at("productId").get<ProductId>(), id,
                                       u.at("reason").get<std::string>()});
          }
          for (const auto& h : reply.at("hints")) hints.push_back(h);
        }
      } catch (const Error&) {
        verified = false;
      } catch (const json::exception&) {
        verified = false;
      }
      if (!parsed) {
        frontier("unverified");
        continue;
      }

      const ActionId id = record_id(node.record);
      node.verified = verified;
      requested.insert(id);
      if (single_path) result.path.push_back(id);
      auto [it, inserted] = result.nodes.emplace(id, std::move(node));
      if (!inserted && verified) it->second.verified = true;
      if (!verified) {
        frontier("unverified");
        continue;
      }

      for (const auto& h : hints) {
        TraceHint hint;
        try {
          hint = {h.at("company").get<CompanyId>(), h.at("productId").get<ProductId>(),
                  h.at("actionId").get<ActionId>()};
        } catch (const std::exception&) {
          frontier("bad-hint");
          continue;
        }
        if (direction == Direction::Backward) {
          edges.insert({hint.action_id, id, hint.product});
        } else {
          edges.insert({id, hint.action_id, hint.product});
        }
        if (requested.insert(hint.action_id).second) {
          next.push_back({hint.company, hint.product, hint.action_id});
        }
        if (single_path) break;
      }
    }
    first = false;
    level = std::move(next);
  }

  for (const auto& e : edges) {
    auto from = result.nodes.find(e.from);
    auto to = result.nodes.find(e.to);
    if (from != result.nodes.end() && to != result.nodes.end() && from->second.verified &&
        to->second.verified) {
      result.edges.push_back(e);
    }
  }
  result.stats.elapsed_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
  return result;
}

bool is_consumption_edge(const TraceResult& result, const TraceEdge& edge) {
  auto it = result.nodes.find(edge.to);
  if (it == result.nodes.end()) return false;
  const auto* a = as_action(it->second.record);
  return a && has(a->inputs, edge.product);
}

namespace {

bool sanctioned_retract(const LedgerBackend& ledger, const RetractExport& r,
                        std::uint64_t response_window_ticks) {
  auto e = ledger.entry(r.complaint_seq);
  const auto* c = e ? std::get_if<Complaint>(&e->payload) : nullptr;
  if (!c || c->complainant != r.author || c->export_action_id != r.export_action_id) return false;
  for (const auto& p : r.products) {
    if (!has(c->product_ids, p)) return false;
  }
  if (r.timestamp < e->tick + response_window_ticks) return false;
  return !find_valid_complaint_response(ledger, r.complaint_seq, response_window_ticks);
}

}  // namespace

std::vector<DoubleConsumption> audit_double_consumption(const TraceResult& result,
                                                        const LedgerBackend& ledger,
                                                        std::uint64_t response_window_ticks) {
  std::set<ActionId> cancelled;
  for (const auto& [id, n] : result.nodes) {
    const auto* r = as_retract(n.record);
    if (n.verified && r && sanctioned_retract(ledger, *r, response_window_ticks)) {
      cancelled.insert(r->export_action_id);
    }
  }

  // A retract hands products back to whoever supplied the export, so
  // consumption after a retract counts against that original supplier.
  auto origin = [&](ActionId supplier, const ProductId& p) {
    for (int guard = 0; guard < 64; ++guard) {
      auto it = result.nodes.find(supplier);
      const auto* r = it == result.nodes.end() ? nullptr : as_retract(it->second.record);
      if (!r) break;
      auto e = std::find_if(result.edges.begin(), result.edges.end(), [&](const TraceEdge& x) {
        return x.to == r->export_action_id && x.product == p;
      });
      if (e == result.edges.end()) return r->export_action_id;
      supplier = e->from;
    }
    return supplier;
  };

  std::map<std::pair<ActionId, ProductId>, std::set<ActionId>> consumers;
  for (const auto& e : result.edges) {
    if (!is_consumption_edge(result, e)) continue;
    consumers[{origin(e.from, e.product), e.product}].insert(e.to);
  }
  std::map<ProductId, std::set<ActionId>> flagged;
  for (auto& [key, set] : consumers) {
    std::erase_if(set, [&](const ActionId& c) { return cancelled.contains(c); });
    if (set.size() > 1) flagged[key.second].insert(set.begin(), set.end());
  }
  std::vector<DoubleConsumption> out;
  for (auto& [p, set] : flagged) out.push_back({p, {set.begin(), set.end()}});
  return out;
}

TraceResult merge_results(const std::vector<TraceResult>& results) {
  TraceResult out;
  if (results.empty()) return out;
  out.direction = results.front().direction;
  out.start_product = results.front().start_product;
  out.start_company = results.front().start_company;
  std::set<TraceEdge> edges;
  for (const auto& r : results) {
    for (const auto& [id, n] : r.nodes) {
      auto [it, inserted] = out.nodes.emplace(id, n);
      if (!inserted && n.verified) it->second.verified = true;
    }
    edges.insert(r.edges.begin(), r.edges.end());
    out.frontier.insert(out.frontier.end(), r.frontier.begin(), r.frontier.end());
    out.stats.requests += r.stats.requests;
    out.stats.witness_fetches += r.stats.witness_fetches;
    out.stats.bytes += r.stats.bytes;
    out.stats.elapsed_ms += r.stats.elapsed_ms;
  }
  out.edges.assign(edges.begin(), edges.end());
  return out;
}

json trace_result_to_json(const TraceResult& result) {
  json nodes = json::array();
  for (const auto& [id, n] : result.nodes) {
    nodes.push_back({{"id", id},
                     {"company", n.company},
                     {"verified", n.verified},
                     {"epochIndex", n.epoch_index},
                     {"record", record_to_json(n.record)},
                     {"products", n.products}});
  }
  json edges = json::array();
  for (const auto& e : result.edges) {
    edges.push_back({{"from", e.from},
                     {"to", e.to},
                     {"productId", e.product},
                     {"kind", is_consumption_edge(result, e) ? "consumption" : "custody"}});
  }
  json frontier = json::array();
  for (const auto& f : result.frontier) {
    frontier.push_back({{"company", f.company},
                        {"productId", f.product},
                        {"actionId", f.action_id ? json(*f.action_id) : json(nullptr)},
                        {"reason", f.reason}});
  }
  json j{{"direction", direction_name(result.direction)},
         {"mode", result.single_path ? "track" : "trace"},
         {"start", {{"productId", result.start_product}, {"company", result.start_company}}},
         {"nodes", std::move(nodes)},
         {"edges", std::move(edges)},
         {"frontier", std::move(frontier)},
         {"stats",
          {{"requests", result.stats.requests},
           {"witnessFetches", result.stats.witness_fetches},
           {"bytes", result.stats.bytes},
           {"elapsedMs", result.stats.elapsed_ms}}}};
  if (result.single_path) j["path"] = result.path;
  return j;
}

std::string trace_report(const TraceResult& result) {
  std::ostringstream out;
  const auto verified = result.verified_ids().size();
  out << (result.single_path ? "track" : "trace") << " of " << to_hex(result.start_product)
      << " from " << result.start_company.hex() << " (" << direction_name(result.direction)
      << ")\n";
  out << verified << " verified, " << result.nodes.size() - verified << " unverified, "
      << result.edges.size() << " edges, " << result.frontier.size() << " open ends\n";

  auto line = [&](const ActionId& id) {
    const auto& n = result.nodes.at(id);
    std::string kind = as_retract(n.record)
                           ? "retractExport"
                           : std::string(action_type_name(std::get<Action>(n.record).type));
    out << "  " << (n.verified ? "[ok] " : "[!!] ") << kind << ' ' << to_hex(id).substr(0, 16)
        << " @ " << n.company.hex().substr(0, 16) << " epoch " << n.epoch_index;
    for (const auto& p : n.products) out << ' ' << p.name;
    out << '\n';
  };
  if (result.single_path) {
    for (const auto& id : result.path) line(id);
  } else {
    for (const auto& [id, n] : result.nodes) line(id);
  }
  for (const auto& f : result.frontier) {
    out << "  open: " << to_hex(f.product).substr(0, 16) << " at " << f.company.hex().substr(0, 16)
        << " (" << f.reason << ")\n";
  }
  out << "requests " << result.stats.requests << ", witness fetches "
      << result.stats.witness_fetches << ", bytes " << result.stats.bytes << '\n';
  return out.str();
}

}  // namespace ccchain
