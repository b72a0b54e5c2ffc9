#pragma once

// Cross-company export/import protocol with on-ledger dispute resolution.
//
// Each party keeps its own TransferSession; the exporter's and importer's
// views share (exporter, importer, secret, session nonce, products) and move
// through the state machine independently:
//
//   exporter: Opened -> ExportRecorded -> ExportShared -> ImportConfirmed
//                                                      -> ComplaintFiled -> RebuttedByProof
//                                                                        -> Retracted
//                                                                        -> ConvertedToSell
//   importer: Opened -> ImportConfirmed
//             Opened -> AnnouncementFiled -> ImportConfirmed | BuyFallback
//
// Blinded identifiers are H(secret || company || context) where context is
// the export action id once it exists and H(session nonce) before that.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ccchain/codec.hpp"
#include "ccchain/company_node.hpp"
#include "ccchain/public_ledger.hpp"

namespace ccchain {

Hash32 blind(const CompanyId& company, const Hash32& shared_secret, const Hash32& context);
Hash32 session_context(const Nonce16& session_nonce);

enum class TransferState {
  Opened,
  ExportRecorded,
  ExportShared,
  ImportConfirmed,
  ComplaintFiled,
  Retracted,
  ConvertedToSell,
  RebuttedByProof,
  AnnouncementFiled,
  BuyFallback,
};

std::string_view transfer_state_name(TransferState state);
std::optional<TransferState> parse_transfer_state(std::string_view name);
bool is_terminal(TransferState state);
bool transition_allowed(TransferState from, TransferState to);

enum class TransferRole { Exporter, Importer };

// An action together with its inclusion proof against the author's witness.
struct ActionEvidence {
  Action action;
  MerkleProof proof;
  std::uint64_t epoch_index = 0;

  bool operator==(const ActionEvidence&) const = default;
};

// Off-chain message from exporter to importer.
// JSON: {action, records, proof, epochIndex}
struct ExportClaim {
  ActionEvidence evidence;
  std::vector<ProductRecord> records;
};

// Off-chain message from importer back to exporter.
// JSON: {action, proof, epochIndex}
struct ImportConfirmation {
  ActionEvidence evidence;
};

struct TransferTiming {
  std::uint64_t complaint_deadline_ticks = 2;
  std::uint64_t response_window_ticks = 2;
};

struct TransferSession {
  TransferRole role = TransferRole::Exporter;
  CompanyId exporter;
  CompanyId importer;
  Hash32 shared_secret;
  Nonce16 session_nonce;
  std::vector<ProductId> product_ids;
  TransferTiming timing;

  TransferState state = TransferState::Opened;
  std::vector<TransferState> history{TransferState::Opened};

  std::optional<ActionId> export_action_id;
  std::optional<ActionId> import_action_id;
  std::optional<std::uint64_t> shared_tick;
  std::optional<std::uint64_t> complaint_seq;
  std::optional<ComplaintIndicator> indicator;
  std::optional<std::uint64_t> announcement_seq;
  std::vector<ActionId> resolution_ids;

  // Counterpart evidence each party ends up holding.
  std::optional<ActionEvidence> export_evidence;
  std::optional<ActionEvidence> import_evidence;

  // Product records that physically accompanied the goods (importer side of
  // the announcement path).
  std::vector<ProductRecord> received_records;

  std::string id() const { return to_hex(session_nonce); }
  const CompanyId& self() const { return role == TransferRole::Exporter ? exporter : importer; }
  const CompanyId& counterparty() const {
    return role == TransferRole::Exporter ? importer : exporter;
  }
};

// Both parties' views of one freshly opened transfer.
struct SessionPair {
  TransferSession exporter;
  TransferSession importer;
};

SessionPair open_session(const CompanyId& exporter, const CompanyId& importer,
                         const Hash32& shared_secret, const Nonce16& session_nonce,
                         std::vector<ProductId> product_ids, TransferTiming timing = {});

// Moves the session, rejecting edges outside the state machine with
// Error(InvalidState).
void advance(TransferSession& session, TransferState to);

// --- evidence checks -------------------------------------------------------

// Id recomputes, proof leaf is the id, and the proof verifies against the
// author's on-ledger witness for the stated epoch.
bool verify_evidence(const LedgerBackend& ledger, const ActionEvidence& evidence);

ActionEvidence evidence_for(const CompanyNode& node, const ActionId& id);

enum class ResponseCheck {
  Valid,
  BadEvidence,
  WrongActionType,
  ProductMismatch,
  BindingMismatch,
  OutsideWindow,
};

std::string_view response_check_name(ResponseCheck check);

// Public checks need only the ledger; passing the shared secret adds the
// blinding checks only the two parties can perform.
ResponseCheck check_complaint_response(const LedgerBackend& ledger, const LedgerEntry& complaint,
                                       const LedgerEntry& response,
                                       std::uint64_t response_window_ticks,
                                       const std::optional<Hash32>& shared_secret = std::nullopt);
ResponseCheck check_announcement_response(
    const LedgerBackend& ledger, const LedgerEntry& announcement, const LedgerEntry& response,
    std::uint64_t response_window_ticks, const std::optional<Hash32>& shared_secret = std::nullopt,
    const std::optional<Nonce16>& session_nonce = std::nullopt);

std::optional<LedgerEntry> find_valid_complaint_response(
    const LedgerBackend& ledger, std::uint64_t complaint_seq, std::uint64_t response_window_ticks,
    const std::optional<Hash32>& shared_secret = std::nullopt);
std::optional<LedgerEntry> find_valid_announcement_response(
    const LedgerBackend& ledger, std::uint64_t announcement_seq,
    std::uint64_t response_window_ticks, const std::optional<Hash32>& shared_secret = std::nullopt,
    const std::optional<Nonce16>& session_nonce = std::nullopt);

enum class Responsible { Undetermined, Accused, Complainant };

std::string_view responsible_name(Responsible r);

// Ledger-only attribution of a dispute opened at `seq` (complaint or
// announcement): the accused if the window lapsed without a valid response,
// the complainant if a valid rebuttal was published, otherwise undetermined.
Responsible attribute_dispute(const LedgerBackend& ledger, std::uint64_t seq,
                              std::uint64_t response_window_ticks);

// --- exporter side -----------------------------------------------------------

// Records the export, consuming the session's products. Opened -> ExportRecorded.
Action initiate_export(CompanyNode& exporter, TransferSession& session);

// Requires the export to be witnessed (Error(NotYetWitnessed) otherwise).
// ExportRecorded -> ExportShared; starts the complaint clock.
ExportClaim share_export(CompanyNode& exporter, TransferSession& session);

// Verifies the importer's confirmation and links the export to the import.
// ExportShared -> ImportConfirmed. Throws Error(InvalidImportConfirmation).
void accept_import_confirmation(CompanyNode& exporter, TransferSession& session,
                                const ImportConfirmation& confirmation);

// Requires ExportShared and the complaint deadline to have passed
// (Error(TooEarly) otherwise). ExportShared -> ComplaintFiled.
std::uint64_t file_complaint(CompanyNode& exporter, TransferSession& session,
                             ComplaintIndicator indicator);

// Checks the ledger for a valid rebuttal; on one, stores the import evidence
// and moves ComplaintFiled -> RebuttedByProof.
bool poll_complaint(CompanyNode& exporter, TransferSession& session);

// After the response window lapses without a valid response: appends a
// RetractExport (plus a Sell for convert-to-sell) referencing the complaint.
// Throws Error(ComplaintRebutted) if a valid rebuttal exists and
// Error(TooEarly) while the window is open.
std::vector<Record> resolve_expired_complaint(CompanyNode& exporter, TransferSession& session);

// Answers an announcement that names this exporter with the export proof.
// Returns the response seq, or nullopt when the announcement is not ours or
// there is nothing witnessed to show.
std::optional<std::uint64_t> respond_to_announcement(CompanyNode& exporter,
                                                     std::span<TransferSession> sessions,
                                                     const LedgerEntry& announcement);

// --- importer side -----------------------------------------------------------

// Verifies the claim (evidence against the exporter's witness, records hash to
// the exported ids, blinding addressed to us, no lapsed complaint against the
// export) and records the import.
// Opened -> ImportConfirmed. Throws Error(InvalidExportClaim) or
// Error(RecordIdMismatch).
Action confirm_import(CompanyNode& importer, TransferSession& session, const ExportClaim& claim);

// Requires the import to be witnessed.
ImportConfirmation import_confirmation(const CompanyNode& importer,
                                       const TransferSession& session);

// Publishes a rebuttal if the complaint names us under one of our sessions
// and we hold a witnessed matching import. nullopt means silence.
std::optional<std::uint64_t> respond_to_complaint(CompanyNode& importer,
                                                  std::span<TransferSession> sessions,
                                                  const LedgerEntry& complaint);

// Goods arrived without a shared export. Opened -> AnnouncementFiled.
std::uint64_t announce_missing_export(CompanyNode& importer, TransferSession& session);

// With a valid export proof on the ledger: records the import
// (AnnouncementFiled -> ImportConfirmed). Once the window lapses without one:
// records a Buy referencing the announcement (-> BuyFallback). Error(TooEarly)
// while the window is still open without a response.
Action resolve_announcement(CompanyNode& importer, TransferSession& session);

// --- wire forms ----------------------------------------------------------------

json export_claim_to_json(const ExportClaim& claim);
ExportClaim export_claim_from_json(const json& j);
json import_confirmation_to_json(const ImportConfirmation& confirmation);
ImportConfirmation import_confirmation_from_json(const json& j);
json session_to_json(const TransferSession& session);
TransferSession session_from_json(const json& j);

}  // namespace ccchain
