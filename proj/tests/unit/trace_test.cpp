#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "ccchain/simnet.hpp"
#include "ccchain/trace.hpp"
#include "support.hpp"

using namespace ccchain;

namespace {

std::set<ActionId> ids(const std::vector<ActionId>& v) { return {v.begin(), v.end()}; }

bool has_reason(const TraceResult& r, const std::string& reason) {
  return std::any_of(r.frontier.begin(), r.frontier.end(),
                     [&](const FrontierEntry& f) { return f.reason == reason; });
}

// forest --log--> mill (plank) --plank--> shop, shop sells the plank.
struct Chain {
  Network net;
  ProductId log, plank;
  ActionId create, produce, sell;
  TransferOutcome t1, t2;

  Chain() {
    auto& forest = net.add_company("forest");
    auto& mill = net.add_company("mill");
    auto& shop = net.add_company("shop");
    auto made = forest.record_create(ProductSpec{"log", {}});
    create = made.action.id;
    log = made.products[0].id;
    forest.cut_epoch();
    t1 = net.transfer(forest.id(), mill.id(), {log});
    const ProductId in[1] = {log};
    auto p = mill.record_produce(in, {{"plank", {}}});
    produce = p.action.id;
    plank = p.products[0].id;
    mill.cut_epoch();
    t2 = net.transfer(mill.id(), shop.id(), {plank});
    const ProductId out[1] = {plank};
    sell = shop.record_sell(out).id;
    net.cut_all();
  }
};

}  // namespace

TEST(TraceWire, RequestRoundTrip) {
  TraceRequest r{sha256("p"), Direction::Forward, sha256("a"), "auditor"};
  auto back = trace_request_from_json(trace_request_to_json(r));
  EXPECT_EQ(back.product_id, r.product_id);
  EXPECT_EQ(back.direction, r.direction);
  EXPECT_EQ(back.action_id, r.action_id);
  EXPECT_EQ(back.requester, r.requester);
  EXPECT_FALSE(trace_request_from_json(trace_request_to_json({sha256("p"), {}, {}, ""}))
                   .action_id.has_value());
  EXPECT_CODE(trace_request_from_json(json{{"productId", "zz"}, {"direction", "backward"}}),
              ErrorCode::Parse);
  EXPECT_FALSE(parse_direction("sideways").has_value());
}

TEST(TraceWire, HandlerAnswersBadRequests) {
  Chain c;
  auto handler = make_trace_handler(c.net.node("mill"));
  EXPECT_EQ(parse_json(handler("not json")).at("error"), "bad-request");
  EXPECT_EQ(parse_json(handler("{}")).at("error"), "bad-request");
  auto reply = parse_json(handler(
      trace_request_to_json({sha256("unknown"), Direction::Backward, {}, "x"}).dump()));
  EXPECT_EQ(reply.at("error"), "not-found");
}

TEST(TraceWire, ResponseDisclosesOnlyTheQueriedProduct) {
  Network net;
  auto& a = net.add_company("a");
  auto made = a.record_create(std::vector<ProductSpec>{{"one", {}}, {"two", {}}});
  a.cut_epoch();
  auto reply = serve_trace(a, {made.products[1].id, Direction::Backward, {}, "x"});
  ASSERT_EQ(reply.at("records").size(), 1u);
  EXPECT_EQ(reply.at("records")[0].at("name"), "two");
  EXPECT_TRUE(reply.at("hints").empty());
}

TEST(Trace, BackwardFromShopReachesTheForest) {
  Chain c;
  auto tracer = c.net.tracer();
  auto r = tracer.trace(c.plank, c.net.node("shop").id());
  const std::set<ActionId> expected{c.create, c.t1.export_id, c.t1.import_id, c.produce,
                                    c.t2.export_id, c.t2.import_id};
  EXPECT_EQ(ids(r.verified_ids()), expected);
  EXPECT_TRUE(r.frontier.empty());
  EXPECT_EQ(r.stats.requests, 6u);
  EXPECT_EQ(r.edges.size(), 5u);
  EXPECT_GT(r.stats.bytes, 0u);
  const auto edge_count = std::count_if(r.edges.begin(), r.edges.end(), [&](const TraceEdge& e) {
    return is_consumption_edge(r, e);
  });
  EXPECT_EQ(edge_count, 3);  // create->export, import->produce, produce->export
}

TEST(Trace, ForwardFromTheForestReachesTheSale) {
  Chain c;
  auto r = c.net.tracer().trace(c.log, c.net.node("forest").id(), Direction::Forward);
  EXPECT_TRUE(ids(r.verified_ids()).contains(c.sell));
  EXPECT_EQ(r.verified_ids().size(), 7u);
  EXPECT_TRUE(has_reason(r, "sold"));
  auto t = c.net.tracer().track(c.log, c.net.node("forest").id());
  EXPECT_EQ(t.path, (std::vector<ActionId>{c.create, c.t1.export_id, c.t1.import_id, c.produce,
                                           c.t2.export_id, c.t2.import_id, c.sell}));
  EXPECT_TRUE(t.single_path);
  const auto j = trace_result_to_json(t);
  EXPECT_EQ(j.at("mode"), "track");
  EXPECT_EQ(j.at("path").size(), 7u);
  EXPECT_NE(trace_report(t).find("track"), std::string::npos);
}

TEST(Trace, StartErrors) {
  Chain c;
  auto& mill = c.net.node("mill");
  auto pending = mill.record_create(ProductSpec{"offcut", {}});
  auto tracer = c.net.tracer();
  EXPECT_CODE(tracer.trace(pending.products[0].id, mill.id()), ErrorCode::NotYetWitnessed);
  EXPECT_CODE(tracer.trace(sha256("nothing"), mill.id()), ErrorCode::NotFound);
  EXPECT_CODE(tracer.trace(c.log, CompanyId::from_seed("nobody")), ErrorCode::NotFound);
}

TEST(Trace, TamperedResponseIsUnverified) {
  Chain c;
  const auto forest = c.net.node("forest").id();
  auto honest = make_trace_handler(c.net.node("forest"));
  c.net.channel().attach(forest, [honest](const std::string& req) {
    auto reply = parse_json(honest(req));
    if (reply.contains("action")) reply["action"]["timestamp"] = 12345;
    return reply.dump();
  });
  auto r = c.net.tracer().trace(c.plank, c.net.node("shop").id());
  EXPECT_FALSE(ids(r.verified_ids()).contains(c.t1.export_id));
  EXPECT_FALSE(ids(r.verified_ids()).contains(c.create));
  EXPECT_TRUE(has_reason(r, "unverified"));
  EXPECT_EQ(r.verified_ids().size(), 4u);
}

TEST(Trace, SwappedRecordIsUnverified) {
  Chain c;
  const auto mill = c.net.node("mill").id();
  auto honest = make_trace_handler(c.net.node("mill"));
  const auto decoy = serve_trace(c.net.node("mill"), {c.plank, Direction::Backward, c.produce, "x"});
  c.net.channel().attach(mill, [honest, decoy](const std::string& req) {
    auto reply = parse_json(honest(req));
    if (reply.contains("action") && reply.at("action") != decoy.at("action")) {
      reply["action"] = decoy.at("action");  // answer with a different, genuine record
    }
    return reply.dump();
  });
  auto r = c.net.tracer().trace(c.plank, c.net.node("shop").id());
  EXPECT_FALSE(ids(r.verified_ids()).contains(c.t1.import_id));
  EXPECT_TRUE(has_reason(r, "unverified"));
}

TEST(Trace, MalformedHintsEndTheBranch) {
  Chain c;
  const auto shop = c.net.node("shop").id();
  auto honest = make_trace_handler(c.net.node("shop"));
  c.net.channel().attach(shop, [honest](const std::string& req) {
    auto reply = parse_json(honest(req));
    if (reply.contains("hints")) {
      for (auto& h : reply["hints"]) h["actionId"] = 7;
    }
    return reply.dump();
  });
  auto r = c.net.tracer().trace(c.plank, shop);
  EXPECT_EQ(r.verified_ids().size(), 1u);
  EXPECT_TRUE(has_reason(r, "bad-hint"));
}

TEST(Trace, UnreachableCompanyIsFrontier) {
  Chain c;
  c.net.channel().detach(c.net.node("forest").id());
  auto r = c.net.tracer().trace(c.plank, c.net.node("shop").id());
  EXPECT_TRUE(has_reason(r, "unreachable"));
  EXPECT_EQ(r.verified_ids().size(), 4u);
}

TEST(Trace, ExternalSourcesAreReported) {
  Network net;
  auto& a = net.add_company("trader");
  auto bought = a.record_buy({{"bolt", {{"source", "market"}}}});
  a.cut_epoch();
  auto r = net.tracer().trace(bought.products[0].id, a.id());
  ASSERT_EQ(r.frontier.size(), 1u);
  EXPECT_EQ(r.frontier[0].reason, "external-source");
}

TEST(Trace, WithheldRecordsDegradeMonotonically) {
  auto g = build_binary_graph(7);
  auto& net = *g.network;
  std::vector<CompanyId> steps;
  // Deepest first, so each extra refusal hides records still reachable before.
  for (int i = 6; i >= 1; --i) steps.push_back(CompanyId::from_seed("step-" + std::to_string(i)));
  std::set<ActionId> previous;
  for (std::size_t k = 0; k <= steps.size(); ++k) {
    for (std::size_t i = 0; i < steps.size(); ++i) {
      net.set_policy(steps[i], i < k ? TracePolicy([](const std::string&, const Record&) {
        return false;
      })
                                     : allow_all());
    }
    auto r = net.tracer().trace(g.root_product, g.root_company);
    const auto now = ids(r.verified_ids());
    if (k == 0) {
      EXPECT_EQ(now, g.truth.ancestors_of(g.root_action));
    } else {
      EXPECT_TRUE(std::includes(previous.begin(), previous.end(), now.begin(), now.end()));
      EXPECT_LT(now.size(), previous.size());
      EXPECT_TRUE(has_reason(r, "withheld"));
    }
    for (const auto& id : now) EXPECT_TRUE(g.truth.actions.contains(id));
    previous = now;
  }
}

TEST(Trace, PolicySeesTheRequester) {
  Chain c;
  const auto forest = c.net.node("forest").id();
  c.net.set_policy(forest, [](const std::string& who, const Record&) { return who == "regulator"; });
  auto denied = c.net.tracer("public").trace(c.plank, c.net.node("shop").id());
  auto allowed = c.net.tracer("regulator").trace(c.plank, c.net.node("shop").id());
  EXPECT_EQ(denied.verified_ids().size(), 4u);
  EXPECT_EQ(allowed.verified_ids().size(), 6u);
}

TEST(Trace, ParallelMatchesSerial) {
  auto g = build_binary_graph(15);
  auto serial = g.network->tracer().trace(g.root_product, g.root_company);
  Tracer parallel(g.network->channel(), g.network->ledger(), {"auditor", true});
  auto par = parallel.trace(g.root_product, g.root_company);
  EXPECT_EQ(serial.verified_ids(), par.verified_ids());
  EXPECT_EQ(serial.edges, par.edges);
  EXPECT_EQ(serial.stats.requests, par.stats.requests);
}

TEST(Trace, RequestsAndWitnessFetchesPerGraph) {
  for (std::uint64_t n : {1u, 3u, 7u}) {
    auto g = build_binary_graph(n);
    auto r = g.network->tracer().trace(g.root_product, g.root_company);
    EXPECT_EQ(r.stats.requests, 6 * n + 1) << n;
    EXPECT_EQ(r.verified_ids().size(), 6 * n + 1);
    EXPECT_EQ(ids(r.verified_ids()), g.truth.ancestors_of(g.root_action));
    EXPECT_EQ(std::set<TraceEdge>(r.edges.begin(), r.edges.end()), g.truth.edges);
    // One witness per (company, epoch) touched, never more than the requests.
    EXPECT_LE(r.stats.witness_fetches, r.stats.requests);
  }
}

TEST(Trace, TrackFollowsGroundTruthPath) {
  auto g = build_binary_graph(7);
  for (const auto& leaf : g.leaves) {
    auto t = g.network->tracer().track(leaf.product, leaf.company);
    EXPECT_EQ(t.path, g.truth.forward_path(leaf.create_id));
    EXPECT_EQ(t.path.back(), g.root_action);
  }
}

TEST(Audit, HonestGraphHasNoDoubleConsumption) {
  auto g = build_binary_graph(7);
  std::vector<TraceResult> all;
  for (const auto& leaf : g.leaves) {
    all.push_back(g.network->tracer().trace(leaf.product, leaf.company, Direction::Forward));
  }
  EXPECT_TRUE(audit_double_consumption(merge_results(all), g.network->ledger()).empty());
}

TEST(Audit, RogueNodeIsCaught) {
  Network net;
  auto& forest = net.add_company("forest");
  NodeOptions rogue_opts;
  rogue_opts.enforce_single_consumption = false;
  auto& rogue = net.add_company("rogue", rogue_opts);
  auto& buyer = net.add_company("buyer");
  auto log = forest.record_create(ProductSpec{"log", {}}).products[0].id;
  forest.cut_epoch();
  auto t1 = net.transfer(forest.id(), rogue.id(), {log});
  auto t2 = net.transfer(rogue.id(), buyer.id(), {log});
  const ProductId in[1] = {log};
  auto sold = rogue.record_sell(in);
  net.cut_all();

  auto r = net.tracer().trace(log, forest.id(), Direction::Forward);
  auto reports = audit_double_consumption(r, net.ledger());
  ASSERT_EQ(reports.size(), 1u);
  EXPECT_EQ(reports[0].product, log);
  EXPECT_EQ(ids(reports[0].consumers), (std::set<ActionId>{t2.export_id, sold.id}));
  (void)t1;
}

TEST(Audit, SanctionedRetractIsNotDoubleConsumption) {
  Network net;
  auto& forest = net.add_company("forest");
  auto& mill = net.add_company("mill");
  auto log = forest.record_create(ProductSpec{"log", {}}).products[0].id;
  forest.cut_epoch();
  auto s = open_session(forest.id(), mill.id(), net.next_secret(), net.next_nonce(), {log},
                        net.timing());
  initiate_export(forest, s.exporter);
  forest.cut_epoch();
  share_export(forest, s.exporter);
  net.ledger().advance_tick(2);
  file_complaint(forest, s.exporter, ComplaintIndicator::ConvertToSell);
  net.ledger().advance_tick(2);
  resolve_expired_complaint(forest, s.exporter);
  net.cut_all();

  // The log's current supplier is the retract: look both ways from there.
  auto r = merge_results({net.tracer().trace(log, forest.id(), Direction::Backward),
                          net.tracer().trace(log, forest.id(), Direction::Forward)});
  EXPECT_EQ(r.verified_ids().size(), 4u);  // create, export, retract, sell
  EXPECT_TRUE(audit_double_consumption(r, net.ledger()).empty());
}

TEST(Audit, UnsanctionedRetractIsDoubleConsumption) {
  Network net;
  auto& forest = net.add_company("forest");
  auto& mill = net.add_company("mill");
  auto log = forest.record_create(ProductSpec{"log", {}}).products[0].id;
  forest.cut_epoch();
  auto s = open_session(forest.id(), mill.id(), net.next_secret(), net.next_nonce(), {log},
                        net.timing());
  auto exp = initiate_export(forest, s.exporter);
  forest.cut_epoch();
  // No complaint on the ledger at all.
  forest.record_retract(exp.id, 0);
  const ProductId in[1] = {log};
  auto sold = forest.record_sell(in);
  net.cut_all();
  auto r = merge_results({net.tracer().trace(log, forest.id(), Direction::Backward),
                          net.tracer().trace(log, forest.id(), Direction::Forward)});
  auto reports = audit_double_consumption(r, net.ledger());
  ASSERT_EQ(reports.size(), 1u);
  EXPECT_EQ(ids(reports[0].consumers), (std::set<ActionId>{exp.id, sold.id}));
}

TEST(Audit, MergeUnionsNodesAndStats) {
  Chain c;
  auto a = c.net.tracer().trace(c.plank, c.net.node("shop").id());
  auto b = c.net.tracer().trace(c.log, c.net.node("forest").id(), Direction::Forward);
  auto m = merge_results({a, b});
  EXPECT_EQ(m.verified_ids().size(), 7u);
  EXPECT_EQ(m.stats.requests, a.stats.requests + b.stats.requests);
  EXPECT_TRUE(merge_results({}).nodes.empty());
}
