#include "ccchain/company_node.hpp"

#include <openssl/rand.h>

#include <algorithm>
#include <cstdio>
#include <set>
#include <sstream>

#include "ccchain/codec.hpp"
#include "ccchain/encoding.hpp"
#include "ccchain/error.hpp"

namespace ccchain {

Nonce16 SystemNonceSource::next() {
  Nonce16 n;
  if (RAND_bytes(n.data(), static_cast<int>(n.size())) != 1) {
    throw Error(ErrorCode::Storage, "system random source unavailable");
  }
  return n;
}

Nonce16 SeededNonceSource::next() {
  std::lock_guard lock(mutex_);
  Nonce16 n;
  for (std::size_t i = 0; i < n.size(); i += 8) {
    const std::uint64_t word = rng_();
    for (std::size_t b = 0; b < 8; ++b) n.bytes[i + b] = static_cast<Byte>(word >> (8 * b));
  }
  return n;
}

// ---------------------------------------------------------------------------
// ConsumptionState

void ConsumptionState::check(const Record& record) const {
  if (const auto* retract = as_retract(record)) {
    for (const auto& p : retract->products) {
      auto it = consumed_.find(p);
      if (it == consumed_.end() || it->second != retract->export_action_id) {
        throw Error(ErrorCode::InvalidState,
                    "product " + to_hex(p) + " is not held by export " +
                        to_hex(retract->export_action_id));
      }
    }
    return;
  }
  const auto& action = std::get<Action>(record);
  std::set<ProductId> seen;
  for (const auto& p : action.inputs) {
    if (!seen.insert(p).second) {
      throw Error(ErrorCode::DoubleConsumption,
                  "double consumption: product " + to_hex(p) + " listed twice");
    }
    if (!known(p)) throw Error(ErrorCode::UnknownProduct, "unknown product " + to_hex(p));
    if (consumed_.contains(p)) {
      throw Error(ErrorCode::DoubleConsumption,
                  "double consumption: product " + to_hex(p) + " already consumed by " +
                      to_hex(consumed_.at(p)));
    }
  }
  if (action.type == ActionType::Import) {
    for (const auto& p : action.outputs) {
      if (consumable(p)) {
        throw Error(ErrorCode::InvalidState, "product " + to_hex(p) + " is already held");
      }
    }
  }
}

void ConsumptionState::apply(const Record& record, bool enforce) {
  if (enforce) check(record);
  const ActionId& id = record_id(record);

  if (const auto* retract = as_retract(record)) {
    suppliers_[id] = std::vector<ActionId>(retract->products.size(), retract->export_action_id);
    for (const auto& p : retract->products) {
      consumed_.erase(p);
      supplier_[p] = id;
    }
    retracted_by_.emplace(retract->export_action_id, id);
    return;
  }

  const auto& action = std::get<Action>(record);
  std::vector<ActionId> suppliers;
  suppliers.reserve(action.inputs.size());
  for (const auto& p : action.inputs) {
    auto it = supplier_.find(p);
    const ActionId supplier = it == supplier_.end() ? ActionId{} : it->second;
    suppliers.push_back(supplier);
    consumer_after_[std::make_pair(supplier, p)].push_back(id);
    consumed_.emplace(p, id);
  }
  if (!suppliers.empty()) suppliers_[id] = std::move(suppliers);
  for (const auto& p : action.outputs) {
    supplier_[p] = id;
    consumed_.erase(p);
  }
}

std::optional<ActionId> ConsumptionState::supplier(const ProductId& p) const {
  auto it = supplier_.find(p);
  if (it == supplier_.end()) return std::nullopt;
  return it->second;
}

std::optional<ActionId> ConsumptionState::consumer(const ProductId& p) const {
  auto it = consumed_.find(p);
  if (it == consumed_.end()) return std::nullopt;
  return it->second;
}

std::optional<ActionId> ConsumptionState::consumer_after(const ActionId& supplier,
                                                         const ProductId& p) const {
  auto it = consumer_after_.find({supplier, p});
  if (it == consumer_after_.end()) return std::nullopt;
  return it->second.front();
}

std::vector<ActionId> ConsumptionState::consumers_after(const ActionId& supplier,
                                                        const ProductId& p) const {
  auto it = consumer_after_.find({supplier, p});
  if (it == consumer_after_.end()) return {};
  return it->second;
}

std::vector<ActionId> ConsumptionState::suppliers_of(const ActionId& consumer) const {
  auto it = suppliers_.find(consumer);
  if (it == suppliers_.end()) return {};
  return it->second;
}

std::optional<ActionId> ConsumptionState::retracted_by(const ActionId& export_id) const {
  auto it = retracted_by_.find(export_id);
  if (it == retracted_by_.end()) return std::nullopt;
  return it->second;
}

std::vector<ProductId> ConsumptionState::consumable_products() const {
  std::vector<ProductId> out;
  for (const auto& [p, _] : supplier_) {
    if (!consumed_.contains(p)) out.push_back(p);
  }
  return out;
}

// ---------------------------------------------------------------------------
// CompanyNode

namespace {

std::string seq_key(std::string_view prefix, std::uint64_t n) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%020llu", static_cast<unsigned long long>(n));
  return std::string(prefix) + buf;
}

json link_json(const TransferLink& link) {
  return json{{"counterparty", link.counterparty}, {"actionId", link.action_id}};
}

TransferLink link_from_json(const json& j) {
  return {j.at("counterparty").get<CompanyId>(), j.at("actionId").get<Hash32>()};
}

}  // namespace

CompanyNode::CompanyNode(CompanyId id, LedgerBackend& ledger,
                         std::shared_ptr<NonceSource> nonces, NodeOptions options, Clock clock,
                         Store* store)
    : id_(id),
      ledger_(ledger),
      nonces_(nonces ? std::move(nonces) : std::make_shared<SystemNonceSource>()),
      options_(options),
      clock_(clock ? std::move(clock) : Clock([&ledger] { return ledger.current_tick(); })),
      store_(store) {
  if (options_.epoch_length_ticks == 0) {
    throw Error(ErrorCode::Config, "epoch length must be at least one tick");
  }
  if (store_) load_from_store();
  last_cut_tick_ = clock_();
}

std::vector<ProductRecord> CompanyNode::mint(std::vector<ProductSpec> specs) {
  std::vector<ProductRecord> out;
  out.reserve(specs.size());
  for (auto& spec : specs) {
    out.push_back(ProductRecord::make(std::move(spec.name), std::move(spec.details), nonces_->next()));
  }
  return out;
}

void CompanyNode::verify_stored_inputs(std::span<const ProductId> inputs) const {
  if (!options_.verify_inputs_on_consume) return;
  for (const auto& p : inputs) {
    auto it = products_.find(p);
    if (it != products_.end() && compute_id(it->second) != p) {
      throw Error(ErrorCode::RecordIdMismatch,
                  "stored record for product " + to_hex(p) + " no longer matches its id");
    }
    // The supplying record must still sit in its committed epoch tree.
    auto supplier = state_.supplier(p);
    if (!supplier) continue;
    auto pos = positions_.find(*supplier);
    if (pos == positions_.end() || !pos->second.epoch) continue;
    const auto& epoch = epochs_[*pos->second.epoch];
    if (compute_id(log_[pos->second.log_index]) != *supplier ||
        !verify_against(epoch.tree->prove(pos->second.leaf), epoch.witness.root,
                        epoch.witness.action_count)) {
      throw Error(ErrorCode::RecordIdMismatch,
                  "supplier of product " + to_hex(p) + " does not match its witnessed epoch");
    }
  }
}

void CompanyNode::append_locked(Record record, std::span<const ProductRecord> products) {
  state_.apply(record, options_.enforce_single_consumption);
  for (const auto& p : products) products_.insert_or_assign(p.id, p);
  const ActionId id = record_id(record);
  positions_[id] = Position{log_.size(), std::nullopt, 0};
  pending_.push_back(id);
  log_.push_back(std::move(record));
  if (store_) persist_record(log_.back(), products);
}

void CompanyNode::persist_record(const Record& record, std::span<const ProductRecord> products) {
  for (const auto& p : products) store_->put("product/" + to_hex(p.id), json(p).dump());
  store_->put(seq_key("log/", log_.size() - 1), record_to_json(record).dump());
}

Recorded CompanyNode::record_create(std::vector<ProductSpec> outputs) {
  if (outputs.empty()) throw Error(ErrorCode::InvalidArgument, "create needs at least one output");
  auto products = mint(std::move(outputs));
  std::vector<ProductId> ids;
  for (const auto& p : products) ids.push_back(p.id);
  std::unique_lock lock(mutex_);
  auto action = Action::make(ActionType::Create, clock_(), {}, std::move(ids), id_);
  append_locked(action, products);
  return {std::move(action), std::move(products)};
}

Recorded CompanyNode::record_produce(std::span<const ProductId> inputs,
                                     std::vector<ProductSpec> outputs) {
  if (inputs.empty()) throw Error(ErrorCode::InvalidArgument, "produce needs at least one input");
  if (outputs.empty()) throw Error(ErrorCode::InvalidArgument, "produce needs at least one output");
  auto products = mint(std::move(outputs));
  std::vector<ProductId> ids;
  for (const auto& p : products) ids.push_back(p.id);
  std::unique_lock lock(mutex_);
  verify_stored_inputs(inputs);
  auto action = Action::make(ActionType::Produce, clock_(), {inputs.begin(), inputs.end()},
                             std::move(ids), id_);
  append_locked(action, products);
  return {std::move(action), std::move(products)};
}

Action CompanyNode::record_sell(std::span<const ProductId> inputs) {
  if (inputs.empty()) throw Error(ErrorCode::InvalidArgument, "sell needs at least one input");
  std::unique_lock lock(mutex_);
  verify_stored_inputs(inputs);
  auto action = Action::make(ActionType::Sell, clock_(), {inputs.begin(), inputs.end()}, {}, id_);
  append_locked(action, {});
  return action;
}

Recorded CompanyNode::record_buy(std::vector<ProductSpec> outputs) {
  if (outputs.empty()) throw Error(ErrorCode::InvalidArgument, "buy needs at least one output");
  auto products = mint(std::move(outputs));
  std::vector<ProductId> ids;
  for (const auto& p : products) ids.push_back(p.id);
  std::unique_lock lock(mutex_);
  auto action = Action::make(ActionType::Buy, clock_(), {}, std::move(ids), id_);
  append_locked(action, products);
  return {std::move(action), std::move(products)};
}

Action CompanyNode::record_export(std::span<const ProductId> inputs, const TransferMeta& meta) {
  if (inputs.empty()) throw Error(ErrorCode::InvalidArgument, "export needs at least one input");
  std::unique_lock lock(mutex_);
  verify_stored_inputs(inputs);
  auto action =
      Action::make(ActionType::Export, clock_(), {inputs.begin(), inputs.end()}, {}, id_, meta);
  append_locked(action, {});
  return action;
}

Action CompanyNode::record_import(std::vector<ProductRecord> records, const TransferMeta& meta) {
  if (records.empty()) throw Error(ErrorCode::InvalidArgument, "import needs at least one product");
  std::vector<ProductId> ids;
  for (const auto& r : records) ids.push_back(r.id);
  std::unique_lock lock(mutex_);
  auto action = Action::make(ActionType::Import, clock_(), {}, std::move(ids), id_, meta);
  append_locked(action, records);
  return action;
}

RetractExport CompanyNode::record_retract(const ActionId& export_id, std::uint64_t complaint_seq) {
  std::unique_lock lock(mutex_);
  auto pos = positions_.find(export_id);
  const Action* exported = pos == positions_.end() ? nullptr : as_action(log_[pos->second.log_index]);
  if (!exported || exported->type != ActionType::Export) {
    throw Error(ErrorCode::NotFound, "no local export " + to_hex(export_id));
  }
  auto retract = RetractExport::make(clock_(), exported->inputs, id_, export_id, complaint_seq);
  append_locked(retract, {});
  return retract;
}

EpochWitness CompanyNode::cut_epoch() {
  std::unique_lock lock(mutex_);
  const std::uint64_t index = epochs_.size();
  Epoch epoch{EpochWitness::sentinel(id_, index), std::nullopt};
  if (!pending_.empty()) {
    epoch.tree = MerkleTree::build(pending_);
    epoch.witness.root = epoch.tree->root();
    epoch.witness.action_count = pending_.size();
  }
  try {
    ledger_.append(epoch.witness);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::DuplicateWitness || e.code() == ErrorCode::LedgerUnavailable) throw;
    throw Error(ErrorCode::LedgerUnavailable, std::string("witness publication failed: ") + e.what());
  } catch (const std::exception& e) {
    throw Error(ErrorCode::LedgerUnavailable, std::string("witness publication failed: ") + e.what());
  }
  for (std::size_t leaf = 0; leaf < pending_.size(); ++leaf) {
    auto& pos = positions_.at(pending_[leaf]);
    pos.epoch = index;
    pos.leaf = leaf;
  }
  pending_.clear();
  if (store_) store_->put(seq_key("epoch/", index), json(epoch.witness).dump());
  const EpochWitness witness = epoch.witness;
  epochs_.push_back(std::move(epoch));
  last_cut_tick_ = clock_();
  return witness;
}

bool CompanyNode::epoch_due() const {
  std::shared_lock lock(mutex_);
  return clock_() >= last_cut_tick_ + options_.epoch_length_ticks;
}

std::pair<MerkleProof, std::uint64_t> CompanyNode::proof_for(const ActionId& id) const {
  std::shared_lock lock(mutex_);
  auto it = positions_.find(id);
  if (it == positions_.end()) throw Error(ErrorCode::NotFound, "unknown record " + to_hex(id));
  if (!it->second.epoch) {
    throw Error(ErrorCode::NotYetWitnessed, "record " + to_hex(id) + " not yet witnessed");
  }
  const auto epoch = *it->second.epoch;
  return {epochs_[epoch].tree->prove(it->second.leaf), epoch};
}

bool CompanyNode::is_witnessed(const ActionId& id) const {
  std::shared_lock lock(mutex_);
  auto it = positions_.find(id);
  return it != positions_.end() && it->second.epoch.has_value();
}

std::optional<Record> CompanyNode::find_record(const ActionId& id) const {
  std::shared_lock lock(mutex_);
  auto it = positions_.find(id);
  if (it == positions_.end()) return std::nullopt;
  return log_[it->second.log_index];
}

std::optional<ProductRecord> CompanyNode::product(const ProductId& id) const {
  std::shared_lock lock(mutex_);
  auto it = products_.find(id);
  if (it == products_.end()) return std::nullopt;
  return it->second;
}

bool CompanyNode::is_consumable(const ProductId& id) const {
  std::shared_lock lock(mutex_);
  return state_.consumable(id);
}

std::vector<ProductId> CompanyNode::consumable_products() const {
  std::shared_lock lock(mutex_);
  return state_.consumable_products();
}

std::optional<ActionId> CompanyNode::current_supplier(const ProductId& p) const {
  std::shared_lock lock(mutex_);
  return state_.supplier(p);
}

std::optional<ActionId> CompanyNode::consumer_after(const ActionId& supplier,
                                                    const ProductId& p) const {
  std::shared_lock lock(mutex_);
  return state_.consumer_after(supplier, p);
}

std::vector<ActionId> CompanyNode::consumers_after(const ActionId& supplier,
                                                   const ProductId& p) const {
  std::shared_lock lock(mutex_);
  return state_.consumers_after(supplier, p);
}

std::vector<ActionId> CompanyNode::suppliers_of(const ActionId& consumer) const {
  std::shared_lock lock(mutex_);
  return state_.suppliers_of(consumer);
}

std::optional<ActionId> CompanyNode::retracted_by(const ActionId& export_id) const {
  std::shared_lock lock(mutex_);
  return state_.retracted_by(export_id);
}

ConsumptionState CompanyNode::consumption() const {
  std::shared_lock lock(mutex_);
  return state_;
}

void CompanyNode::link_export(const ActionId& export_id, const TransferLink& importer) {
  std::unique_lock lock(mutex_);
  export_links_.insert_or_assign(export_id, importer);
  if (store_) store_->put("link/export/" + to_hex(export_id), link_json(importer).dump());
}

void CompanyNode::link_import(const ActionId& import_id, const TransferLink& exporter) {
  std::unique_lock lock(mutex_);
  import_links_.insert_or_assign(import_id, exporter);
  if (store_) store_->put("link/import/" + to_hex(import_id), link_json(exporter).dump());
}

std::optional<TransferLink> CompanyNode::export_link(const ActionId& export_id) const {
  std::shared_lock lock(mutex_);
  auto it = export_links_.find(export_id);
  if (it == export_links_.end()) return std::nullopt;
  return it->second;
}

std::optional<TransferLink> CompanyNode::import_link(const ActionId& import_id) const {
  std::shared_lock lock(mutex_);
  auto it = import_links_.find(import_id);
  if (it == import_links_.end()) return std::nullopt;
  return it->second;
}

std::vector<Record> CompanyNode::log() const {
  std::shared_lock lock(mutex_);
  return log_;
}

std::size_t CompanyNode::log_size() const {
  std::shared_lock lock(mutex_);
  return log_.size();
}

std::uint64_t CompanyNode::epoch_index() const {
  std::shared_lock lock(mutex_);
  return epochs_.size();
}

std::size_t CompanyNode::pending_count() const {
  std::shared_lock lock(mutex_);
  return pending_.size();
}

std::optional<EpochWitness> CompanyNode::local_witness(std::uint64_t epoch_index) const {
  std::shared_lock lock(mutex_);
  if (epoch_index >= epochs_.size()) return std::nullopt;
  return epochs_[epoch_index].witness;
}

std::string CompanyNode::export_log_jsonl() const {
  std::shared_lock lock(mutex_);
  std::ostringstream out;
  for (const auto& r : log_) out << record_to_json(r).dump() << '\n';
  return out.str();
}

void CompanyNode::load_from_store() {
  if (auto stored = store_->get("meta/company")) {
    if (*stored != id_.hex()) {
      throw Error(ErrorCode::Storage, "store belongs to company " + *stored);
    }
  } else {
    store_->put("meta/company", id_.hex());
  }

  try {
    for (const auto& [key, value] : store_->scan("product/")) {
      auto p = parse_json(value).get<ProductRecord>();
      products_.insert_or_assign(p.id, std::move(p));
    }
    for (const auto& [key, value] : store_->scan("log/")) {
      Record record = record_from_json(parse_json(value));
      if (compute_id(record) != record_id(record)) {
        throw Error(ErrorCode::Storage, "stored record " + to_hex(record_id(record)) +
                                            " does not match its content");
      }
      state_.apply(record, false);
      positions_[record_id(record)] = Position{log_.size(), std::nullopt, 0};
      pending_.push_back(record_id(record));
      log_.push_back(std::move(record));
    }
    std::size_t cursor = 0;
    for (const auto& [key, value] : store_->scan("epoch/")) {
      Epoch epoch{parse_json(value).get<EpochWitness>(), std::nullopt};
      const std::size_t count = epoch.witness.action_count;
      if (cursor + count > pending_.size()) {
        throw Error(ErrorCode::Storage, "epoch index references records missing from the log");
      }
      if (count > 0) {
        std::span<const ActionId> leaves(pending_.data() + cursor, count);
        epoch.tree = MerkleTree::build(leaves);
        if (epoch.tree->root() != epoch.witness.root) {
          throw Error(ErrorCode::Storage, "stored log does not reproduce witness root of epoch " +
                                              std::to_string(epoch.witness.epoch_index));
        }
        for (std::size_t leaf = 0; leaf < count; ++leaf) {
          auto& pos = positions_.at(pending_[cursor + leaf]);
          pos.epoch = epochs_.size();
          pos.leaf = leaf;
        }
      }
      cursor += count;
      epochs_.push_back(std::move(epoch));
    }
    pending_.erase(pending_.begin(), pending_.begin() + static_cast<std::ptrdiff_t>(cursor));
    for (const auto& [key, value] : store_->scan("link/export/")) {
      export_links_.insert_or_assign(hash_from_hex(key.substr(12)), link_from_json(parse_json(value)));
    }
    for (const auto& [key, value] : store_->scan("link/import/")) {
      import_links_.insert_or_assign(hash_from_hex(key.substr(12)), link_from_json(parse_json(value)));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Storage, std::string("corrupt node store: ") + e.what());
  }
}

}  // namespace ccchain
