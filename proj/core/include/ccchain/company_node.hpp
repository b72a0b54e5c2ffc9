#pragma once

// Per-company engine: append-only local log of records, product records,
// consumption tracking, epoch cutting and witness publication.
//
// All mutating calls serialize on one writer lock; queries take a shared lock
// and only observe completed mutations.

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <shared_mutex>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "ccchain/merkle.hpp"
#include "ccchain/model.hpp"
#include "ccchain/public_ledger.hpp"
#include "ccchain/store.hpp"

namespace ccchain {

class NonceSource {
 public:
  virtual ~NonceSource() = default;
  virtual Nonce16 next() = 0;
};

// Cryptographically secure nonces from the OS via OpenSSL.
class SystemNonceSource final : public NonceSource {
 public:
  Nonce16 next() override;
};

// Reproducible nonces for deterministic simulation. Not for production use.
class SeededNonceSource final : public NonceSource {
 public:
  explicit SeededNonceSource(std::uint64_t seed) : rng_(seed) {}
  Nonce16 next() override;

 private:
  std::mutex mutex_;
  std::mt19937_64 rng_;
};

struct ProductSpec {
  std::string name;
  std::vector<Detail> details;
};

struct Recorded {
  Action action;
  std::vector<ProductRecord> products;
};

// Counterpart of a transfer as known to the data holder: who imported our
// export, or who exported what we imported.
struct TransferLink {
  CompanyId counterparty;
  ActionId action_id;

  bool operator==(const TransferLink&) const = default;
};

// Event-sourced consumption state. A node's state is exactly the fold of
// apply() over its log, which is what makes replay checks possible.
class ConsumptionState {
 public:
  // With enforce set, throws Error(UnknownProduct) for inputs never
  // supplied, Error(DoubleConsumption) for inputs already consumed (or
  // repeated within one record), and Error(InvalidState) for a retract whose
  // products are not held by the referenced export.
  void check(const Record& record) const;
  void apply(const Record& record, bool enforce);

  bool known(const ProductId& p) const { return supplier_.contains(p); }
  bool consumable(const ProductId& p) const { return known(p) && !consumed_.contains(p); }
  std::optional<ActionId> supplier(const ProductId& p) const;
  std::optional<ActionId> consumer(const ProductId& p) const;
  std::optional<ActionId> consumer_after(const ActionId& supplier, const ProductId& p) const;
  // Every record that consumed p out of `supplier`; more than one only for a
  // node that does not enforce single consumption.
  std::vector<ActionId> consumers_after(const ActionId& supplier, const ProductId& p) const;
  std::vector<ActionId> suppliers_of(const ActionId& consumer) const;
  std::optional<ActionId> retracted_by(const ActionId& export_id) const;

  std::vector<ProductId> consumable_products() const;
  std::size_t emitted_count() const { return supplier_.size(); }
  std::size_t consumed_count() const { return consumed_.size(); }

  bool operator==(const ConsumptionState&) const = default;

 private:
  std::map<ProductId, ActionId> supplier_;   // current supplying record
  std::map<ProductId, ActionId> consumed_;   // current consuming record
  std::map<std::pair<ActionId, ProductId>, std::vector<ActionId>> consumer_after_;
  std::map<ActionId, std::vector<ActionId>> suppliers_;
  std::map<ActionId, ActionId> retracted_by_;
};

struct NodeOptions {
  std::uint64_t epoch_length_ticks = 1;
  // Honest nodes reject double consumption locally. Turning this off yields
  // a misbehaving node for adversarial fixtures.
  bool enforce_single_consumption = true;
  // Before consuming, re-hash the stored product records and check the
  // supplying record against its committed epoch tree.
  bool verify_inputs_on_consume = true;
};

using Clock = std::function<std::uint64_t()>;

class CompanyNode {
 public:
  // The clock defaults to the ledger's logical tick. A non-null store is
  // replayed at construction and written through on every mutation.
  CompanyNode(CompanyId id, LedgerBackend& ledger, std::shared_ptr<NonceSource> nonces,
              NodeOptions options = {}, Clock clock = {}, Store* store = nullptr);

  CompanyNode(const CompanyNode&) = delete;
  CompanyNode& operator=(const CompanyNode&) = delete;

  const CompanyId& id() const { return id_; }
  const NodeOptions& options() const { return options_; }
  LedgerBackend& ledger() const { return ledger_; }
  Store* store() const { return store_; }
  std::uint64_t now() const { return clock_(); }

  Recorded record_create(std::vector<ProductSpec> outputs);
  Recorded record_create(ProductSpec output) { return record_create(std::vector{std::move(output)}); }
  Recorded record_produce(std::span<const ProductId> inputs, std::vector<ProductSpec> outputs);
  Action record_sell(std::span<const ProductId> inputs);
  Recorded record_buy(std::vector<ProductSpec> outputs);
  Action record_export(std::span<const ProductId> inputs, const TransferMeta& meta);
  // Records are the full product records received from the exporter; their
  // ids must already have been checked by the caller.
  Action record_import(std::vector<ProductRecord> records, const TransferMeta& meta);
  // Restores the products of a local export after an unanswered complaint.
  RetractExport record_retract(const ActionId& export_id, std::uint64_t complaint_seq);

  // Publishes the witness for the pending records (the zero-root sentinel if
  // none). On ledger failure throws a retry-able Error(LedgerUnavailable) and
  // leaves the pending buffer untouched.
  EpochWitness cut_epoch();
  bool epoch_due() const;

  // Throws Error(NotYetWitnessed) if the record is still pending and
  // Error(NotFound) if it is unknown.
  std::pair<MerkleProof, std::uint64_t> proof_for(const ActionId& id) const;
  bool is_witnessed(const ActionId& id) const;

  std::optional<Record> find_record(const ActionId& id) const;
  std::optional<ProductRecord> product(const ProductId& id) const;
  bool is_consumable(const ProductId& id) const;
  std::vector<ProductId> consumable_products() const;
  std::optional<ActionId> current_supplier(const ProductId& p) const;
  std::optional<ActionId> consumer_after(const ActionId& supplier, const ProductId& p) const;
  std::vector<ActionId> consumers_after(const ActionId& supplier, const ProductId& p) const;
  std::vector<ActionId> suppliers_of(const ActionId& consumer) const;
  std::optional<ActionId> retracted_by(const ActionId& export_id) const;
  ConsumptionState consumption() const;

  void link_export(const ActionId& export_id, const TransferLink& importer);
  void link_import(const ActionId& import_id, const TransferLink& exporter);
  std::optional<TransferLink> export_link(const ActionId& export_id) const;
  std::optional<TransferLink> import_link(const ActionId& import_id) const;

  std::vector<Record> log() const;
  std::size_t log_size() const;
  std::uint64_t epoch_index() const;
  std::size_t pending_count() const;
  std::optional<EpochWitness> local_witness(std::uint64_t epoch_index) const;

  // Audit export: one canonical-JSON record per line, in log order.
  std::string export_log_jsonl() const;

 private:
  struct Position {
    std::size_t log_index = 0;
    std::optional<std::uint64_t> epoch;
    std::size_t leaf = 0;
  };
  struct Epoch {
    EpochWitness witness;
    std::optional<MerkleTree> tree;
  };

  std::vector<ProductRecord> mint(std::vector<ProductSpec> specs);
  void verify_stored_inputs(std::span<const ProductId> inputs) const;
  void append_locked(Record record, std::span<const ProductRecord> products);
  void persist_record(const Record& record, std::span<const ProductRecord> products);
  void load_from_store();

  CompanyId id_;
  LedgerBackend& ledger_;
  std::shared_ptr<NonceSource> nonces_;
  NodeOptions options_;
  Clock clock_;
  Store* store_;

  mutable std::shared_mutex mutex_;
  std::vector<Record> log_;
  std::unordered_map<ActionId, Position, Hash32Hasher> positions_;
  std::unordered_map<ProductId, ProductRecord, Hash32Hasher> products_;
  ConsumptionState state_;
  std::vector<ActionId> pending_;
  std::vector<Epoch> epochs_;
  std::uint64_t last_cut_tick_ = 0;
  std::map<ActionId, TransferLink> export_links_;
  std::map<ActionId, TransferLink> import_links_;
};

}  // namespace ccchain
