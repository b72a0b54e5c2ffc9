#pragma once

// Content-addressed supply-chain records.
//
// Every record carries the identifier derived from its canonical encoding
// (see encoding.hpp). The factory functions compute the identifier; a record
// obtained from the wire keeps whatever identifier it claimed, so receivers
// must recompute before trusting it.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "ccchain/hash.hpp"

namespace ccchain {

struct CompanyId {
  Hash32 value;

  // Derives the identifier from the company's registration key seed.
  static CompanyId from_seed(std::string_view key_seed);
  static CompanyId from_hex(std::string_view hex) { return {hash_from_hex(hex)}; }
  std::string hex() const { return to_hex(value); }

  auto operator<=>(const CompanyId&) const = default;
};

struct CompanyIdHasher {
  std::size_t operator()(const CompanyId& c) const noexcept { return Hash32Hasher{}(c.value); }
};

using ProductId = Hash32;
using ActionId = Hash32;

struct Detail {
  std::string key;
  std::string value;

  auto operator<=>(const Detail&) const = default;
};

struct ProductRecord {
  std::string name;
  std::vector<Detail> details;  // unique keys, sorted
  Nonce16 nonce;
  ProductId id;

  // Sorts details by key and computes the id. Throws Error(Encoding) on
  // duplicate keys.
  static ProductRecord make(std::string name, std::vector<Detail> details, const Nonce16& nonce);

  std::optional<std::string_view> detail(std::string_view key) const;

  bool operator==(const ProductRecord&) const = default;
};

enum class ActionType : std::uint8_t {
  Create = 1,
  Produce = 2,
  Export = 3,
  Import = 4,
  Buy = 5,
  Sell = 6,
};

std::string_view action_type_name(ActionType type);
std::optional<ActionType> parse_action_type(std::string_view name);
std::optional<ActionType> action_type_from_code(std::uint8_t code);

struct TransferMeta {
  Hash32 blinded_counterparty;
  Nonce16 session_nonce;

  bool operator==(const TransferMeta&) const = default;
};

struct Action {
  ActionId id;
  ActionType type = ActionType::Create;
  std::uint64_t timestamp = 0;
  std::vector<ProductId> inputs;
  std::vector<ProductId> outputs;
  CompanyId author;
  std::optional<TransferMeta> transfer_meta;

  static Action make(ActionType type, std::uint64_t timestamp, std::vector<ProductId> inputs,
                     std::vector<ProductId> outputs, const CompanyId& author,
                     std::optional<TransferMeta> meta = std::nullopt);

  bool operator==(const Action&) const = default;
};

// Sanctioned re-consumption of exported products after an unanswered
// complaint. Not one of the six public action types; it is committed in the
// epoch tree alongside actions and makes the products consumable again.
struct RetractExport {
  ActionId id;
  std::uint64_t timestamp = 0;
  std::vector<ProductId> products;
  CompanyId author;
  ActionId export_action_id;
  std::uint64_t complaint_seq = 0;

  static RetractExport make(std::uint64_t timestamp, std::vector<ProductId> products,
                            const CompanyId& author, const ActionId& export_action_id,
                            std::uint64_t complaint_seq);

  bool operator==(const RetractExport&) const = default;
};

// One entry of a company's local log.
using Record = std::variant<Action, RetractExport>;

const ActionId& record_id(const Record& record);
const CompanyId& record_author(const Record& record);
std::uint64_t record_timestamp(const Record& record);
// Products this record takes out of circulation.
std::span<const ProductId> record_consumed(const Record& record);
// Products this record makes available (restored ones for a retract).
std::span<const ProductId> record_emitted(const Record& record);
bool record_involves(const Record& record, const ProductId& product);
const Action* as_action(const Record& record);
const RetractExport* as_retract(const Record& record);

enum class ViolationKind { Arity, TransferMeta, IdMismatch };

struct Violation {
  ViolationKind kind;
  std::string message;
};

// Reports every per-type arity rule the action breaks, a transferMeta
// presence error, and an id mismatch against the recomputed hash.
std::vector<Violation> validate_action_shape(const Action& action);

// Arity rule alone, without touching the id.
bool arity_allowed(ActionType type, std::size_t inputs, std::size_t outputs);

}  // namespace ccchain
