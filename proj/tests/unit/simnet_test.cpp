#include <gtest/gtest.h>

#include <set>

#include "ccchain/encoding.hpp"
#include "ccchain/simnet.hpp"
#include "support.hpp"

using namespace ccchain;

TEST(Simnet, PaddedSpecHitsTarget) {
  for (std::size_t target : {100u, 200u, 1000u}) {
    auto spec = padded_spec("item", {{"source", "external-supplier"}}, target);
    auto rec = ProductRecord::make(spec.name, spec.details, Nonce16{});
    EXPECT_EQ(canonical_encode(rec).size(), target) << target;
  }
  // Already larger than the target: left alone.
  auto spec = padded_spec(std::string(300, 'n'), {}, 100);
  EXPECT_TRUE(spec.details.empty());
}

TEST(Simnet, BinaryGraphShape) {
  for (std::uint64_t n : {1u, 2u, 3u, 7u, 10u}) {
    auto g = build_binary_graph(n);
    EXPECT_EQ(g.truth.actions.size(), 6 * n + 1) << n;
    EXPECT_EQ(g.leaves.size(), n + 1);
    EXPECT_EQ(g.network->companies().size(), 2 * n + 1);
    EXPECT_EQ(g.truth.ancestors_of(g.root_action).size(), 6 * n + 1);
    for (const auto& c : g.network->companies()) {
      EXPECT_EQ(g.network->node(c).pending_count(), 0u);
    }
  }
  EXPECT_CODE(build_binary_graph(0), ErrorCode::InvalidArgument);
}

TEST(Simnet, DeterministicRunsAgree) {
  auto a = build_binary_graph(7);
  auto b = build_binary_graph(7);
  EXPECT_EQ(a.root_product, b.root_product);
  EXPECT_EQ(a.truth.edges, b.truth.edges);
  SimConfig other;
  other.rng_seed = 2;
  EXPECT_NE(build_binary_graph(7, other).root_product, a.root_product);
  SimConfig random;
  random.deterministic = false;
  EXPECT_NE(build_binary_graph(7, random).root_product, a.root_product);
}

TEST(Simnet, NetworkBasics) {
  Network net;
  auto& a = net.add_company("alpha");
  EXPECT_EQ(net.name_of(a.id()), "alpha");
  EXPECT_EQ(&net.node("alpha"), &a);
  EXPECT_CODE(net.add_company("alpha"), ErrorCode::InvalidArgument);
  EXPECT_CODE(net.node(CompanyId::from_seed("ghost")), ErrorCode::NotFound);
  EXPECT_EQ(net.name_of(CompanyId::from_seed("ghost")), CompanyId::from_seed("ghost").hex());
  EXPECT_TRUE(net.channel().reachable(a.id()));
  EXPECT_NE(net.next_secret(), net.next_secret());
}

TEST(Simnet, TransferMovesCustody) {
  Network net;
  auto& a = net.add_company("a");
  auto& b = net.add_company("b");
  auto p = a.record_create(ProductSpec{"x", {}}).products[0].id;
  a.cut_epoch();
  auto t = net.transfer(a.id(), b.id(), {p});
  EXPECT_FALSE(a.is_consumable(p));
  EXPECT_TRUE(b.is_consumable(p));
  EXPECT_EQ(t.sessions.exporter.state, TransferState::ImportConfirmed);
  EXPECT_EQ(a.export_link(t.export_id)->action_id, t.import_id);
}

TEST(Simnet, ChannelCountsBytes) {
  Channel ch;
  const auto id = CompanyId::from_seed("echo");
  ch.attach(id, [](const std::string& r) { return r + r; });
  EXPECT_EQ(ch.call(id, "abc"), "abcabc");
  EXPECT_EQ(ch.stats().requests, 1u);
  EXPECT_EQ(ch.stats().total_bytes(), 9u);
  ch.reset_stats();
  EXPECT_EQ(ch.stats().requests, 0u);
  ch.detach(id);
  EXPECT_CODE(ch.call(id, "x"), ErrorCode::NotFound);
}

TEST(Simnet, TraceBenchCounts) {
  auto b = bench_trace(7, false);
  EXPECT_EQ(b.requests, 43u);
  EXPECT_EQ(b.action_count, 43u);
  auto t = bench_trace(7, true);
  EXPECT_LT(t.requests, b.requests);
  EXPECT_GE(t.requests, 4u);
}

TEST(Simnet, ActionBenchRuns) {
  for (auto type : {ActionType::Create, ActionType::Produce, ActionType::Export, ActionType::Buy,
                    ActionType::Sell, ActionType::Import}) {
    auto b = bench_actions(type, 20);
    EXPECT_EQ(b.count, 20u);
    EXPECT_GT(b.per_second, 0);
  }
  EXPECT_CODE(bench_actions(ActionType::Create, 0), ErrorCode::InvalidArgument);
}
