#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <unistd.h>

#include "ccchain/codec.hpp"
#include "ccchain/company_node.hpp"
#include "ccchain/encoding.hpp"
#include "support.hpp"

using namespace ccchain;

namespace {

// Ledger whose appends can be made to fail, for retry behaviour.
class FlakyLedger final : public LedgerBackend {
 public:
  bool fail = false;
  std::uint64_t append(Payload payload) override {
    if (fail) throw std::runtime_error("network partition");
    return inner.append(std::move(payload));
  }
  std::vector<LedgerEntry> read_since(std::optional<std::uint64_t> after) const override {
    return inner.read_since(after);
  }
  std::optional<LedgerEntry> entry(std::uint64_t seq) const override { return inner.entry(seq); }
  std::optional<EpochWitness> get_witness(const CompanyId& c, std::uint64_t e) const override {
    return inner.get_witness(c, e);
  }
  std::uint64_t current_tick() const override { return inner.current_tick(); }
  std::uint64_t advance_tick(std::uint64_t n) override { return inner.advance_tick(n); }

  PublicLedger inner;
};

struct Fixture {
  PublicLedger ledger;
  std::shared_ptr<NonceSource> nonces = std::make_shared<SeededNonceSource>(3);
  CompanyNode node{CompanyId::from_seed("mill"), ledger, nonces};
};

TransferMeta meta() { return {sha256("counterparty"), Nonce16{}}; }

std::filesystem::path temp_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() /
             ("ccchain-node-" + std::to_string(::getpid())) / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST(CompanyNode, CreateProduceSellFlow) {
  Fixture f;
  auto logs = f.node.record_create(std::vector<ProductSpec>{{"log", {}}, {"log", {{"grade", "A"}}}});
  ASSERT_EQ(logs.products.size(), 2u);
  EXPECT_EQ(logs.action.type, ActionType::Create);
  EXPECT_EQ(compute_id(logs.action), logs.action.id);
  EXPECT_EQ(logs.products[0].id, compute_id(logs.products[0]));
  EXPECT_NE(logs.products[0].id, logs.products[1].id);

  const ProductId in[2] = {logs.products[0].id, logs.products[1].id};
  auto plank = f.node.record_produce(in, {{"plank", {}}});
  EXPECT_FALSE(f.node.is_consumable(in[0]));
  EXPECT_TRUE(f.node.is_consumable(plank.products[0].id));
  EXPECT_EQ(f.node.suppliers_of(plank.action.id),
            (std::vector<ActionId>{logs.action.id, logs.action.id}));
  EXPECT_EQ(f.node.consumer_after(logs.action.id, in[1]), plank.action.id);

  const ProductId out[1] = {plank.products[0].id};
  auto sold = f.node.record_sell(out);
  EXPECT_TRUE(sold.outputs.empty());
  EXPECT_TRUE(f.node.consumable_products().empty());
  EXPECT_EQ(f.node.log_size(), 3u);
  EXPECT_EQ(f.node.pending_count(), 3u);
}

TEST(CompanyNode, RejectsBadConsumption) {
  Fixture f;
  auto a = f.node.record_create(ProductSpec{"a", {}});
  const ProductId once[1] = {a.products[0].id};
  const ProductId twice[2] = {a.products[0].id, a.products[0].id};
  const ProductId unknown[1] = {sha256("nope")};
  EXPECT_CODE(f.node.record_sell(twice), ErrorCode::DoubleConsumption);
  EXPECT_CODE(f.node.record_sell(unknown), ErrorCode::UnknownProduct);
  f.node.record_sell(once);
  EXPECT_CODE(f.node.record_sell(once), ErrorCode::DoubleConsumption);
  EXPECT_CODE(f.node.record_produce(once, {{"x", {}}}), ErrorCode::DoubleConsumption);
  EXPECT_CODE(f.node.record_export(once, meta()), ErrorCode::DoubleConsumption);
  EXPECT_EQ(f.node.log_size(), 2u);
}

TEST(CompanyNode, EmptyArgumentsRejected) {
  Fixture f;
  const ProductId none[1] = {};
  EXPECT_CODE(f.node.record_create(std::vector<ProductSpec>{}), ErrorCode::InvalidArgument);
  EXPECT_CODE(f.node.record_buy({}), ErrorCode::InvalidArgument);
  EXPECT_CODE(f.node.record_sell(std::span<const ProductId>{}), ErrorCode::InvalidArgument);
  EXPECT_CODE(f.node.record_produce(std::span<const ProductId>{}, {{"x", {}}}),
              ErrorCode::InvalidArgument);
  EXPECT_CODE(f.node.record_produce(none, {}), ErrorCode::InvalidArgument);
  EXPECT_CODE(f.node.record_import({}, meta()), ErrorCode::InvalidArgument);
  EXPECT_CODE(f.node.record_create(ProductSpec{"dup", {{"k", "1"}, {"k", "2"}}}), ErrorCode::Encoding);
}

TEST(CompanyNode, ZeroEpochLengthIsConfigError) {
  PublicLedger l;
  NodeOptions o;
  o.epoch_length_ticks = 0;
  EXPECT_CODE(CompanyNode(CompanyId::from_seed("x"), l, nullptr, o), ErrorCode::Config);
}

TEST(CompanyNode, ExportRetractRestoresProducts) {
  Fixture f;
  auto a = f.node.record_create(ProductSpec{"a", {}});
  const ProductId in[1] = {a.products[0].id};
  auto exp = f.node.record_export(in, meta());
  EXPECT_FALSE(f.node.is_consumable(in[0]));
  auto r = f.node.record_retract(exp.id, 4);
  EXPECT_EQ(r.products, std::vector<ProductId>{in[0]});
  EXPECT_TRUE(f.node.is_consumable(in[0]));
  EXPECT_EQ(f.node.retracted_by(exp.id), r.id);
  EXPECT_EQ(f.node.current_supplier(in[0]), r.id);
  EXPECT_CODE(f.node.record_retract(exp.id, 4), ErrorCode::InvalidState);
  EXPECT_CODE(f.node.record_retract(a.action.id, 4), ErrorCode::NotFound);
  EXPECT_CODE(f.node.record_retract(sha256("missing"), 4), ErrorCode::NotFound);
}

TEST(CompanyNode, ImportOfHeldProductRejected) {
  Fixture f;
  auto a = f.node.record_create(ProductSpec{"a", {}});
  EXPECT_CODE(f.node.record_import({a.products[0]}, meta()), ErrorCode::InvalidState);
}

TEST(CompanyNode, WitnessAndProofs) {
  Fixture f;
  auto a = f.node.record_create(ProductSpec{"a", {}});
  EXPECT_CODE(f.node.proof_for(a.action.id), ErrorCode::NotYetWitnessed);
  EXPECT_CODE(f.node.proof_for(sha256("x")), ErrorCode::NotFound);
  auto b = f.node.record_create(ProductSpec{"b", {}});
  auto w = f.node.cut_epoch();
  EXPECT_EQ(w.epoch_index, 0u);
  EXPECT_EQ(w.action_count, 2u);
  EXPECT_EQ(f.ledger.get_witness(f.node.id(), 0), w);
  auto [proof, epoch] = f.node.proof_for(b.action.id);
  EXPECT_EQ(epoch, 0u);
  EXPECT_EQ(proof.leaf, b.action.id);
  EXPECT_TRUE(verify_against(proof, w.root, w.action_count));
  EXPECT_TRUE(f.node.is_witnessed(a.action.id));
  EXPECT_EQ(f.node.pending_count(), 0u);
}

TEST(CompanyNode, EmptyEpochPublishesSentinel) {
  Fixture f;
  auto w = f.node.cut_epoch();
  EXPECT_TRUE(w.is_sentinel());
  EXPECT_TRUE(w.root.is_zero());
  EXPECT_EQ(f.node.epoch_index(), 1u);
  EXPECT_EQ(f.node.local_witness(0), w);
  EXPECT_FALSE(f.node.local_witness(1).has_value());
}

TEST(CompanyNode, EpochDueFollowsClock) {
  PublicLedger l;
  std::uint64_t t = 10;
  NodeOptions o;
  o.epoch_length_ticks = 3;
  CompanyNode n(CompanyId::from_seed("c"), l, nullptr, o, [&] { return t; });
  EXPECT_FALSE(n.epoch_due());
  t = 12;
  EXPECT_FALSE(n.epoch_due());
  t = 13;
  EXPECT_TRUE(n.epoch_due());
  n.cut_epoch();
  EXPECT_FALSE(n.epoch_due());
  EXPECT_EQ(n.record_create(ProductSpec{"x", {}}).action.timestamp, 13u);
}

TEST(CompanyNode, LedgerFailureKeepsPendingBuffer) {
  FlakyLedger l;
  CompanyNode n(CompanyId::from_seed("flaky"), l, std::make_shared<SeededNonceSource>(1));
  n.record_create(ProductSpec{"a", {}});
  n.record_create(ProductSpec{"b", {}});
  l.fail = true;
  try {
    n.cut_epoch();
    FAIL() << "expected failure";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::LedgerUnavailable);
    EXPECT_TRUE(e.retryable());
  }
  EXPECT_EQ(n.pending_count(), 2u);
  EXPECT_EQ(n.epoch_index(), 0u);
  l.fail = false;
  auto w = n.cut_epoch();
  EXPECT_EQ(w.action_count, 2u);
  EXPECT_EQ(w.epoch_index, 0u);
}

TEST(CompanyNode, DuplicateWitnessSurfaces) {
  PublicLedger l;
  const auto id = CompanyId::from_seed("twin");
  CompanyNode a(id, l, nullptr);
  CompanyNode b(id, l, nullptr);
  a.cut_epoch();
  EXPECT_CODE(b.cut_epoch(), ErrorCode::DuplicateWitness);
}

TEST(CompanyNode, NonEnforcingNodeRecordsDoubleConsumption) {
  PublicLedger l;
  NodeOptions o;
  o.enforce_single_consumption = false;
  CompanyNode n(CompanyId::from_seed("rogue"), l, nullptr, o);
  auto a = n.record_create(ProductSpec{"a", {}});
  const ProductId in[1] = {a.products[0].id};
  auto s1 = n.record_sell(in);
  auto s2 = n.record_sell(in);
  EXPECT_EQ(n.consumers_after(a.action.id, in[0]), (std::vector<ActionId>{s1.id, s2.id}));
}

TEST(CompanyNode, FileStorePersistenceRoundTrip) {
  const auto dir = temp_dir("persist");
  PublicLedger l;
  const auto id = CompanyId::from_seed("persisted");
  ActionId pending_id;
  ProductId kept;
  std::vector<Record> log;
  {
    FileStore store(dir / "node.jsonl");
    CompanyNode n(id, l, nullptr, {}, {}, &store);
    auto a = n.record_create(std::vector<ProductSpec>{{"a", {}}, {"b", {}}});
    kept = a.products[1].id;
    const ProductId in[1] = {a.products[0].id};
    n.record_sell(in);
    n.cut_epoch();
    pending_id = n.record_create(ProductSpec{"c", {}}).action.id;
    n.link_export(sha256("e"), {CompanyId::from_seed("peer"), sha256("i")});
    log = n.log();
  }
  FileStore store(dir / "node.jsonl");
  CompanyNode n(id, l, nullptr, {}, {}, &store);
  EXPECT_EQ(n.log(), log);
  EXPECT_EQ(n.epoch_index(), 1u);
  EXPECT_EQ(n.pending_count(), 1u);
  EXPECT_FALSE(n.is_witnessed(pending_id));
  EXPECT_TRUE(n.is_consumable(kept));
  EXPECT_EQ(n.export_link(sha256("e"))->action_id, sha256("i"));
  const ProductId in[1] = {kept};
  n.record_sell(in);  // proof check of the reloaded epoch passes
  n.cut_epoch();
  EXPECT_EQ(n.epoch_index(), 2u);
}

TEST(CompanyNode, StoreOfAnotherCompanyRejected) {
  const auto dir = temp_dir("owner");
  PublicLedger l;
  FileStore store(dir / "node.jsonl");
  { CompanyNode n(CompanyId::from_seed("one"), l, nullptr, {}, {}, &store); }
  EXPECT_CODE(CompanyNode(CompanyId::from_seed("two"), l, nullptr, {}, {}, &store),
              ErrorCode::Storage);
}

TEST(CompanyNode, TamperedLogDetectedAtLoad) {
  const auto dir = temp_dir("tamper-log");
  PublicLedger l;
  const auto id = CompanyId::from_seed("tamper");
  {
    FileStore store(dir / "node.jsonl");
    CompanyNode n(id, l, nullptr, {}, {}, &store);
    n.record_create(ProductSpec{"a", {}});
  }
  std::ifstream in(dir / "node.jsonl");
  std::stringstream buf;
  buf << in.rdbuf();
  auto text = buf.str();
  const std::string needle = R"(\"timestamp\":0)";
  const auto pos = text.find(needle);
  ASSERT_NE(pos, std::string::npos);
  text.replace(pos, needle.size(), R"(\"timestamp\":7)");
  std::ofstream(dir / "node.jsonl", std::ios::trunc) << text;
  FileStore store(dir / "node.jsonl");
  EXPECT_CODE(CompanyNode(id, l, nullptr, {}, {}, &store), ErrorCode::Storage);
}

TEST(CompanyNode, TamperedProductDetectedOnConsume) {
  const auto dir = temp_dir("tamper-product");
  PublicLedger l;
  const auto id = CompanyId::from_seed("tamper-p");
  ProductId p;
  {
    FileStore store(dir / "node.jsonl");
    CompanyNode n(id, l, nullptr, {}, {}, &store);
    p = n.record_create(ProductSpec{"genuine", {}}).products[0].id;
  }
  std::ifstream in(dir / "node.jsonl");
  std::stringstream buf;
  buf << in.rdbuf();
  auto text = buf.str();
  const auto pos = text.find("genuine");
  ASSERT_NE(pos, std::string::npos);
  text.replace(pos, 7, "forgery");
  std::ofstream(dir / "node.jsonl", std::ios::trunc) << text;
  FileStore store(dir / "node.jsonl");
  CompanyNode n(id, l, nullptr, {}, {}, &store);
  const ProductId in2[1] = {p};
  EXPECT_CODE(n.record_sell(in2), ErrorCode::RecordIdMismatch);
}

TEST(CompanyNode, CorruptJournalIsStorageError) {
  const auto dir = temp_dir("corrupt");
  std::ofstream(dir / "node.jsonl") << "{\"k\":\"a\"\n";
  EXPECT_CODE(FileStore(dir / "node.jsonl"), ErrorCode::Storage);
}

TEST(CompanyNode, AuditExportIsOneRecordPerLine) {
  Fixture f;
  auto a = f.node.record_create(ProductSpec{"a", {}});
  const ProductId in[1] = {a.products[0].id};
  f.node.record_sell(in);
  std::istringstream lines(f.node.export_log_jsonl());
  std::string line;
  std::vector<Record> back;
  while (std::getline(lines, line)) back.push_back(record_from_json(parse_json(line)));
  EXPECT_EQ(back, f.node.log());
}

// Replaying the log from scratch reproduces the node's consumption state,
// whatever random mix of operations produced it.
TEST(CompanyNodeProperty, ReplayReproducesState) {
  std::mt19937_64 rng(21);
  for (int round = 0; round < 25; ++round) {
    Fixture f;
    for (int step = 0; step < 60; ++step) {
      auto held = f.node.consumable_products();
      const int op = held.empty() ? 0 : static_cast<int>(rng() % 5);
      try {
        switch (op) {
          case 0:
            f.node.record_create(ProductSpec{"c" + std::to_string(step), {}});
            break;
          case 1:
            f.node.record_buy({{"b" + std::to_string(step), {{"source", "x"}}}});
            break;
          case 2: {
            const ProductId in[1] = {held[rng() % held.size()]};
            f.node.record_produce(in, {{"p", {}}, {"q", {}}});
            break;
          }
          case 3: {
            const ProductId in[1] = {held[rng() % held.size()]};
            auto e = f.node.record_export(in, meta());
            if (rng() % 2) f.node.record_retract(e.id, 0);
            break;
          }
          default: {
            // Occasionally try an already consumed product; must be rejected.
            auto log = f.node.log();
            const auto* act = as_action(log[rng() % log.size()]);
            if (act && !act->inputs.empty()) {
              const ProductId in[1] = {act->inputs[0]};
              if (!f.node.is_consumable(in[0])) {
                EXPECT_CODE(f.node.record_sell(in), ErrorCode::DoubleConsumption);
              }
            }
          }
        }
      } catch (const Error& e) {
        ADD_FAILURE() << e.what();
      }
      if (rng() % 7 == 0) f.node.cut_epoch();
    }
    ConsumptionState replay;
    for (const auto& r : f.node.log()) replay.apply(r, true);
    EXPECT_EQ(replay, f.node.consumption());
    std::size_t emitted = 0;
    for (const auto& r : f.node.log()) {
      if (!as_retract(r)) emitted += record_emitted(r).size();
    }
    EXPECT_EQ(replay.emitted_count(), emitted);
  }
}
