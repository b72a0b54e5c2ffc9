#include "ccchain/model.hpp"

#include <algorithm>

#include "ccchain/encoding.hpp"
#include "ccchain/error.hpp"

namespace ccchain {

CompanyId CompanyId::from_seed(std::string_view key_seed) { return {sha256(key_seed)}; }

ProductRecord ProductRecord::make(std::string name, std::vector<Detail> details,
                                  const Nonce16& nonce) {
  std::sort(details.begin(), details.end(),
            [](const Detail& a, const Detail& b) { return a.key < b.key; });
  ProductRecord record{std::move(name), std::move(details), nonce, {}};
  record.id = compute_id(record);
  return record;
}

std::optional<std::string_view> ProductRecord::detail(std::string_view key) const {
  auto it = std::lower_bound(details.begin(), details.end(), key,
                             [](const Detail& d, std::string_view k) { return d.key < k; });
  if (it == details.end() || it->key != key) return std::nullopt;
  return std::string_view(it->value);
}

namespace {

constexpr std::string_view kTypeNames[] = {"create", "produce", "export",
                                           "import", "buy",     "sell"};

}  // namespace

std::string_view action_type_name(ActionType type) {
  return kTypeNames[static_cast<std::size_t>(type) - 1];
}

std::optional<ActionType> parse_action_type(std::string_view name) {
  for (std::size_t i = 0; i < std::size(kTypeNames); ++i) {
    if (kTypeNames[i] == name) return static_cast<ActionType>(i + 1);
  }
  return std::nullopt;
}

std::optional<ActionType> action_type_from_code(std::uint8_t code) {
  if (code < 1 || code > 6) return std::nullopt;
  return static_cast<ActionType>(code);
}

Action Action::make(ActionType type, std::uint64_t timestamp, std::vector<ProductId> inputs,
                    std::vector<ProductId> outputs, const CompanyId& author,
                    std::optional<TransferMeta> meta) {
  Action action{{}, type, timestamp, std::move(inputs), std::move(outputs), author, meta};
  action.id = compute_id(action);
  return action;
}

RetractExport RetractExport::make(std::uint64_t timestamp, std::vector<ProductId> products,
                                  const CompanyId& author, const ActionId& export_action_id,
                                  std::uint64_t complaint_seq) {
  RetractExport r{{}, timestamp, std::move(products), author, export_action_id, complaint_seq};
  r.id = compute_id(r);
  return r;
}

const ActionId& record_id(const Record& record) {
  return std::visit([](const auto& r) -> const ActionId& { return r.id; }, record);
}

const CompanyId& record_author(const Record& record) {
  return std::visit([](const auto& r) -> const CompanyId& { return r.author; }, record);
}

std::uint64_t record_timestamp(const Record& record) {
  return std::visit([](const auto& r) { return r.timestamp; }, record);
}

std::span<const ProductId> record_consumed(const Record& record) {
  if (const auto* a = std::get_if<Action>(&record)) return a->inputs;
  return std::get<RetractExport>(record).products;
}

std::span<const ProductId> record_emitted(const Record& record) {
  if (const auto* a = std::get_if<Action>(&record)) return a->outputs;
  return std::get<RetractExport>(record).products;
}

bool record_involves(const Record& record, const ProductId& product) {
  auto has = [&](std::span<const ProductId> ids) {
    return std::find(ids.begin(), ids.end(), product) != ids.end();
  };
  return has(record_consumed(record)) || has(record_emitted(record));
}

const Action* as_action(const Record& record) { return std::get_if<Action>(&record); }
const RetractExport* as_retract(const Record& record) {
  return std::get_if<RetractExport>(&record);
}

bool arity_allowed(ActionType type, std::size_t inputs, std::size_t outputs) {
  switch (type) {
    case ActionType::Create:
    case ActionType::Import:
    case ActionType::Buy:
      return inputs == 0 && outputs >= 1;
    case ActionType::Produce:
      return inputs >= 1 && outputs >= 1;
    case ActionType::Export:
    case ActionType::Sell:
      return inputs >= 1 && outputs == 0;
  }
  return false;
}

std::vector<Violation> validate_action_shape(const Action& action) {
  std::vector<Violation> out;
  const std::string name(action_type_name(action.type));
  std::string label = name;
  label[0] = static_cast<char>(label[0] - 'a' + 'A');

  const bool takes_inputs = action.type == ActionType::Produce ||
                            action.type == ActionType::Export || action.type == ActionType::Sell;
  const bool emits_outputs = action.type == ActionType::Create ||
                             action.type == ActionType::Produce ||
                             action.type == ActionType::Import || action.type == ActionType::Buy;
  if (takes_inputs && action.inputs.empty()) {
    out.push_back({ViolationKind::Arity, label + " must have at least one input"});
  }
  if (!takes_inputs && !action.inputs.empty()) {
    out.push_back({ViolationKind::Arity, label + " must have empty inputs"});
  }
  if (emits_outputs && action.outputs.empty()) {
    out.push_back({ViolationKind::Arity, label + " must have at least one output"});
  }
  if (!emits_outputs && !action.outputs.empty()) {
    out.push_back({ViolationKind::Arity, label + " must have no outputs"});
  }

  const bool is_transfer = action.type == ActionType::Export || action.type == ActionType::Import;
  if (is_transfer && !action.transfer_meta) {
    out.push_back({ViolationKind::TransferMeta, label + " requires transferMeta"});
  }
  if (!is_transfer && action.transfer_meta) {
    out.push_back({ViolationKind::TransferMeta, label + " must not carry transferMeta"});
  }

  if (compute_id(action) != action.id) {
    out.push_back({ViolationKind::IdMismatch, "actionId does not match recomputed hash"});
  }
  return out;
}

}  // namespace ccchain
