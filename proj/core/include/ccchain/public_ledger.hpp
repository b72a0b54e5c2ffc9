#pragma once

// Simulated permissionless ledger: a totally ordered, append-only log with
// logical block time. Only contract-level semantics are modelled (append,
// read, time); consensus is out of scope.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <shared_mutex>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "ccchain/merkle.hpp"
#include "ccchain/model.hpp"

namespace ccchain {

struct EpochWitness {
  CompanyId company;
  std::uint64_t epoch_index = 0;
  Hash32 root;  // all-zero for an empty epoch
  std::uint64_t action_count = 0;

  static EpochWitness sentinel(const CompanyId& company, std::uint64_t epoch_index) {
    return {company, epoch_index, Hash32{}, 0};
  }
  bool is_sentinel() const { return action_count == 0; }

  bool operator==(const EpochWitness&) const = default;
};

enum class ComplaintIndicator { Retract, ConvertToSell };

std::string_view indicator_name(ComplaintIndicator indicator);
std::optional<ComplaintIndicator> parse_indicator(std::string_view name);

struct Complaint {
  CompanyId complainant;
  Hash32 blinded_accused;
  std::vector<ProductId> product_ids;
  ComplaintIndicator indicator = ComplaintIndicator::Retract;
  ActionId export_action_id;

  bool operator==(const Complaint&) const = default;
};

// Rebuttal by the accused importer: its import action plus the inclusion
// proof against its own published witness.
struct ComplaintResponse {
  std::uint64_t complaint_seq = 0;
  Action import_action;
  MerkleProof proof;
  std::uint64_t epoch_index = 0;

  bool operator==(const ComplaintResponse&) const = default;
};

// Importer-side dispute opener when goods arrive without a shared export.
struct Announcement {
  CompanyId announcer;
  Hash32 blinded_accused;
  std::vector<ProductId> product_ids;

  bool operator==(const Announcement&) const = default;
};

struct AnnouncementResponse {
  std::uint64_t announcement_seq = 0;
  Action export_action;
  MerkleProof proof;
  std::uint64_t epoch_index = 0;

  bool operator==(const AnnouncementResponse&) const = default;
};

enum class EntryKind { Witness, Complaint, ComplaintResponse, Announcement, AnnouncementResponse };

std::string_view entry_kind_name(EntryKind kind);

using Payload =
    std::variant<EpochWitness, Complaint, ComplaintResponse, Announcement, AnnouncementResponse>;

struct LedgerEntry {
  std::uint64_t seq = 0;
  std::uint64_t tick = 0;
  Payload payload;

  EntryKind kind() const { return static_cast<EntryKind>(payload.index()); }
  bool operator==(const LedgerEntry&) const = default;
};

// Contract-level interface. The in-memory ledger, the file-backed ledger used
// by the CLI, and any future real-chain adapter all implement it.
class LedgerBackend {
 public:
  virtual ~LedgerBackend() = default;

  // Appends with the next seq and the current tick. Throws
  // Error(DuplicateWitness) for a repeated (company, epoch) witness and
  // Error(InvalidArgument) for payloads breaking their invariants.
  virtual std::uint64_t append(Payload payload) = 0;
  // Entries with seq strictly greater than `after`; all entries if nullopt.
  virtual std::vector<LedgerEntry> read_since(std::optional<std::uint64_t> after) const = 0;
  virtual std::optional<LedgerEntry> entry(std::uint64_t seq) const = 0;
  virtual std::optional<EpochWitness> get_witness(const CompanyId& company,
                                                  std::uint64_t epoch_index) const = 0;
  virtual std::uint64_t current_tick() const = 0;
  // Requires n >= 1. Returns the new tick.
  virtual std::uint64_t advance_tick(std::uint64_t n) = 0;

  std::vector<LedgerEntry> read_all() const { return read_since(std::nullopt); }
};

void validate_payload(const Payload& payload);

// In-memory ledger shared by all simulated nodes. Appends are linearized by a
// writer lock; reads take a shared lock.
class PublicLedger final : public LedgerBackend {
 public:
  PublicLedger() = default;
  PublicLedger(const PublicLedger& other);
  PublicLedger(PublicLedger&& other) noexcept;
  PublicLedger& operator=(const PublicLedger&) = delete;
  PublicLedger& operator=(PublicLedger&&) = delete;

  std::uint64_t append(Payload payload) override;
  std::vector<LedgerEntry> read_since(std::optional<std::uint64_t> after) const override;
  std::optional<LedgerEntry> entry(std::uint64_t seq) const override;
  std::optional<EpochWitness> get_witness(const CompanyId& company,
                                          std::uint64_t epoch_index) const override;
  std::uint64_t current_tick() const override;
  std::uint64_t advance_tick(std::uint64_t n) override;

  std::size_t size() const;

  // Rebuilds a ledger from a dump, keeping seq and tick values.
  static PublicLedger load_jsonl(std::istream& in);

 private:
  void insert_loaded(LedgerEntry entry);

  mutable std::shared_mutex mutex_;
  std::vector<LedgerEntry> entries_;
  std::map<std::pair<CompanyId, std::uint64_t>, std::size_t> witness_index_;
  std::uint64_t tick_ = 0;
};

// Ledger shared between CLI processes through a line-delimited JSON file.
// Every operation takes an advisory lock on `<path>.lock` and re-reads the
// file, so concurrent processes observe a single linear history.
class FileLedger final : public LedgerBackend {
 public:
  explicit FileLedger(std::filesystem::path path);

  std::uint64_t append(Payload payload) override;
  std::vector<LedgerEntry> read_since(std::optional<std::uint64_t> after) const override;
  std::optional<LedgerEntry> entry(std::uint64_t seq) const override;
  std::optional<EpochWitness> get_witness(const CompanyId& company,
                                          std::uint64_t epoch_index) const override;
  std::uint64_t current_tick() const override;
  std::uint64_t advance_tick(std::uint64_t n) override;

  const std::filesystem::path& path() const { return path_; }

 private:
  PublicLedger load_locked() const;
  std::filesystem::path tick_path() const;
  std::filesystem::path lock_path() const;

  std::filesystem::path path_;
};

// One JSON object per line: {"kind","payload","tick","seq"}.
std::string dump_jsonl(const LedgerBackend& ledger);
std::string entry_to_json_line(const LedgerEntry& entry);

// Dispute timing, measured in ledger ticks.
inline std::uint64_t ticks_since(const LedgerBackend& ledger, std::uint64_t tick) {
  const auto now = ledger.current_tick();
  return now >= tick ? now - tick : 0;
}

}  // namespace ccchain
