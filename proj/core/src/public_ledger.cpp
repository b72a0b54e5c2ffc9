#include "ccchain/public_ledger.hpp"

#include <istream>
#include <mutex>
#include <sstream>

#include "ccchain/codec.hpp"
#include "ccchain/error.hpp"

namespace ccchain {

std::string_view indicator_name(ComplaintIndicator indicator) {
  return indicator == ComplaintIndicator::Retract ? "retract" : "convertToSell";
}

std::optional<ComplaintIndicator> parse_indicator(std::string_view name) {
  if (name == "retract") return ComplaintIndicator::Retract;
  if (name == "convertToSell") return ComplaintIndicator::ConvertToSell;
  return std::nullopt;
}

std::string_view entry_kind_name(EntryKind kind) {
  switch (kind) {
    case EntryKind::Witness: return "witness";
    case EntryKind::Complaint: return "complaint";
    case EntryKind::ComplaintResponse: return "complaintResponse";
    case EntryKind::Announcement: return "announcement";
    case EntryKind::AnnouncementResponse: return "announcementResponse";
  }
  return "unknown";
}

void validate_payload(const Payload& payload) {
  if (const auto* w = std::get_if<EpochWitness>(&payload)) {
    if (w->action_count == 0 && !w->root.is_zero()) {
      throw Error(ErrorCode::InvalidArgument, "empty-epoch witness must carry the zero root");
    }
  } else if (const auto* c = std::get_if<Complaint>(&payload)) {
    if (c->product_ids.empty()) {
      throw Error(ErrorCode::InvalidArgument, "complaint must name at least one product");
    }
  } else if (const auto* a = std::get_if<Announcement>(&payload)) {
    if (a->product_ids.empty()) {
      throw Error(ErrorCode::InvalidArgument, "announcement must name at least one product");
    }
  }
}

PublicLedger::PublicLedger(const PublicLedger& other) {
  std::shared_lock lock(other.mutex_);
  entries_ = other.entries_;
  witness_index_ = other.witness_index_;
  tick_ = other.tick_;
}

PublicLedger::PublicLedger(PublicLedger&& other) noexcept {
  std::unique_lock lock(other.mutex_);
  entries_ = std::move(other.entries_);
  witness_index_ = std::move(other.witness_index_);
  tick_ = other.tick_;
}

std::uint64_t PublicLedger::append(Payload payload) {
  validate_payload(payload);
  std::unique_lock lock(mutex_);
  if (const auto* w = std::get_if<EpochWitness>(&payload)) {
    auto key = std::make_pair(w->company, w->epoch_index);
    if (witness_index_.contains(key)) {
      throw Error(ErrorCode::DuplicateWitness,
                  "witness for company " + w->company.hex() + " epoch " +
                      std::to_string(w->epoch_index) + " already published");
    }
    witness_index_.emplace(key, entries_.size());
  }
  const std::uint64_t seq = entries_.size();
  entries_.push_back({seq, tick_, std::move(payload)});
  return seq;
}

std::vector<LedgerEntry> PublicLedger::read_since(std::optional<std::uint64_t> after) const {
  std::shared_lock lock(mutex_);
  const std::size_t first = after ? static_cast<std::size_t>(*after) + 1 : 0;
  if (first >= entries_.size()) return {};
  return {entries_.begin() + static_cast<std::ptrdiff_t>(first), entries_.end()};
}

std::optional<LedgerEntry> PublicLedger::entry(std::uint64_t seq) const {
  std::shared_lock lock(mutex_);
  if (seq >= entries_.size()) return std::nullopt;
  return entries_[seq];
}

std::optional<EpochWitness> PublicLedger::get_witness(const CompanyId& company,
                                                      std::uint64_t epoch_index) const {
  std::shared_lock lock(mutex_);
  auto it = witness_index_.find({company, epoch_index});
  if (it == witness_index_.end()) return std::nullopt;
  return std::get<EpochWitness>(entries_[it->second].payload);
}

std::uint64_t PublicLedger::current_tick() const {
  std::shared_lock lock(mutex_);
  return tick_;
}

std::uint64_t PublicLedger::advance_tick(std::uint64_t n) {
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "advance_tick requires n >= 1");
  std::unique_lock lock(mutex_);
  tick_ += n;
  return tick_;
}

std::size_t PublicLedger::size() const {
  std::shared_lock lock(mutex_);
  return entries_.size();
}

void PublicLedger::insert_loaded(LedgerEntry entry) {
  if (entry.seq != entries_.size()) {
    throw Error(ErrorCode::Parse, "ledger dump out of order at seq " + std::to_string(entry.seq));
  }
  if (!entries_.empty() && entry.tick < entries_.back().tick) {
    throw Error(ErrorCode::Parse, "ledger dump has decreasing tick at seq " +
                                      std::to_string(entry.seq));
  }
  if (const auto* w = std::get_if<EpochWitness>(&entry.payload)) {
    if (!witness_index_.emplace(std::make_pair(w->company, w->epoch_index), entries_.size())
             .second) {
      throw Error(ErrorCode::DuplicateWitness, "duplicate witness in ledger dump");
    }
  }
  tick_ = std::max(tick_, entry.tick);
  entries_.push_back(std::move(entry));
}

PublicLedger PublicLedger::load_jsonl(std::istream& in) {
  PublicLedger ledger;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    ledger.insert_loaded(entry_from_json(parse_json(line)));
  }
  return ledger;
}

std::string entry_to_json_line(const LedgerEntry& entry) { return entry_to_json(entry).dump(); }

std::string dump_jsonl(const LedgerBackend& ledger) {
  std::ostringstream out;
  for (const auto& entry : ledger.read_all()) out << entry_to_json_line(entry) << '\n';
  return out.str();
}

}  // namespace ccchain
