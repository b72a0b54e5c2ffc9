#pragma once

// Human-readable JSON forms used by the CLI, the trace protocol, transfer
// messages and ledger dumps. Identifiers are 64-char lowercase hex. Field
// names are part of the wire contract.
//
// from_json never recomputes identifiers; a decoded record keeps the id it
// claimed. Malformed input throws Error(Parse).

#include <nlohmann/json.hpp>

#include "ccchain/error.hpp"
#include "ccchain/merkle.hpp"
#include "ccchain/model.hpp"
#include "ccchain/public_ledger.hpp"

namespace ccchain {

using json = nlohmann::json;

template <std::size_t N>
void to_json(json& j, const FixedBytes<N>& v) {
  j = to_hex(v);
}
template <std::size_t N>
void from_json(const json& j, FixedBytes<N>& v) {
  if (!j.is_string()) throw Error(ErrorCode::Parse, "expected hex string");
  v = from_hex<N>(j.get_ref<const std::string&>());
}

void to_json(json& j, const CompanyId& c);
void from_json(const json& j, CompanyId& c);

void to_json(json& j, const ProductRecord& p);
void from_json(const json& j, ProductRecord& p);

void to_json(json& j, const TransferMeta& m);
void from_json(const json& j, TransferMeta& m);

// {id, type, timestamp, inputs, outputs, author, transferMeta}
void to_json(json& j, const Action& a);
void from_json(const json& j, Action& a);

// {id, type:"retractExport", timestamp, products, author, exportActionId,
// complaintSeq}
void to_json(json& j, const RetractExport& r);
void from_json(const json& j, RetractExport& r);

json record_to_json(const Record& record);
Record record_from_json(const json& j);

// {leaf, path:[{hash, side}], root}
void to_json(json& j, const MerkleProof& p);
void from_json(const json& j, MerkleProof& p);

void to_json(json& j, const EpochWitness& w);
void from_json(const json& j, EpochWitness& w);
void to_json(json& j, const Complaint& c);
void from_json(const json& j, Complaint& c);
void to_json(json& j, const ComplaintResponse& r);
void from_json(const json& j, ComplaintResponse& r);
void to_json(json& j, const Announcement& a);
void from_json(const json& j, Announcement& a);
void to_json(json& j, const AnnouncementResponse& r);
void from_json(const json& j, AnnouncementResponse& r);

// {kind, payload, tick, seq}
json entry_to_json(const LedgerEntry& entry);
LedgerEntry entry_from_json(const json& j);

// Parses text, mapping nlohmann errors onto Error(Parse).
json parse_json(std::string_view text);

}  // namespace ccchain
