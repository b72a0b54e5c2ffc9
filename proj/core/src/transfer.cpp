#include "ccchain/transfer.hpp"

#include <algorithm>
#include <array>
#include <set>

#include "ccchain/encoding.hpp"
#include "ccchain/error.hpp"

namespace ccchain {

namespace {

constexpr std::array kStateNames{
    "opened",        "exportRecorded", "exportShared",    "importConfirmed",   "complaintFiled",
    "retracted",     "convertedToSell", "rebuttedByProof", "announcementFiled", "buyFallback",
};

bool contains_all(std::span<const ProductId> haystack, std::span<const ProductId> needles) {
  std::set<ProductId> have(haystack.begin(), haystack.end());
  return std::all_of(needles.begin(), needles.end(),
                     [&](const ProductId& p) { return have.contains(p); });
}

void require_role(const TransferSession& s, TransferRole role, const char* op) {
  if (s.role != role) {
    throw Error(ErrorCode::InvalidState,
                std::string(op) + " is not available to the " +
                    (s.role == TransferRole::Exporter ? "exporter" : "importer"));
  }
}

void require_state(const TransferSession& s, TransferState expected, const char* op) {
  if (s.state != expected) {
    throw Error(ErrorCode::InvalidState, std::string(op) + " requires state " +
                                             std::string(transfer_state_name(expected)) +
                                             ", session is " +
                                             std::string(transfer_state_name(s.state)));
  }
}

LedgerEntry fetch_entry(const LedgerBackend& ledger, std::uint64_t seq, EntryKind kind) {
  auto e = ledger.entry(seq);
  if (!e) throw Error(ErrorCode::NotFound, "no ledger entry " + std::to_string(seq));
  if (e->kind() != kind) {
    throw Error(ErrorCode::InvalidArgument, "ledger entry " + std::to_string(seq) + " is a " +
                                                std::string(entry_kind_name(e->kind())) + ", not a " +
                                                std::string(entry_kind_name(kind)));
  }
  return *e;
}

bool window_open(const LedgerBackend& ledger, const LedgerEntry& opened, std::uint64_t window) {
  return ledger.current_tick() < opened.tick + window;
}

}  // namespace

Hash32 blind(const CompanyId& company, const Hash32& shared_secret, const Hash32& context) {
  std::array<Byte, 96> buf{};
  std::copy(shared_secret.bytes.begin(), shared_secret.bytes.end(), buf.begin());
  std::copy(company.value.bytes.begin(), company.value.bytes.end(), buf.begin() + 32);
  std::copy(context.bytes.begin(), context.bytes.end(), buf.begin() + 64);
  return sha256(ByteSpan(buf));
}

Hash32 session_context(const Nonce16& session_nonce) { return sha256(session_nonce.span()); }

std::string_view transfer_state_name(TransferState state) {
  return kStateNames.at(static_cast<std::size_t>(state));
}

std::optional<TransferState> parse_transfer_state(std::string_view name) {
  for (std::size_t i = 0; i < kStateNames.size(); ++i) {
    if (name == kStateNames[i]) return static_cast<TransferState>(i);
  }
  return std::nullopt;
}

bool is_terminal(TransferState state) {
  switch (state) {
    case TransferState::ImportConfirmed:
    case TransferState::Retracted:
    case TransferState::ConvertedToSell:
    case TransferState::RebuttedByProof:
    case TransferState::BuyFallback:
      return true;
    default:
      return false;
  }
}

bool transition_allowed(TransferState from, TransferState to) {
  using S = TransferState;
  switch (from) {
    case S::Opened:
      return to == S::ExportRecorded || to == S::ImportConfirmed || to == S::AnnouncementFiled;
    case S::ExportRecorded:
      return to == S::ExportShared;
    case S::ExportShared:
      return to == S::ImportConfirmed || to == S::ComplaintFiled;
    case S::ComplaintFiled:
      return to == S::Retracted || to == S::ConvertedToSell || to == S::RebuttedByProof;
    case S::AnnouncementFiled:
      return to == S::ImportConfirmed || to == S::BuyFallback;
    default:
      return false;
  }
}

void advance(TransferSession& session, TransferState to) {
  if (!transition_allowed(session.state, to)) {
    throw Error(ErrorCode::InvalidState, "transition " +
                                             std::string(transfer_state_name(session.state)) +
                                             " -> " + std::string(transfer_state_name(to)) +
                                             " not allowed");
  }
  session.state = to;
  session.history.push_back(to);
}

SessionPair open_session(const CompanyId& exporter, const CompanyId& importer,
                         const Hash32& shared_secret, const Nonce16& session_nonce,
                         std::vector<ProductId> product_ids, TransferTiming timing) {
  if (exporter == importer) {
    throw Error(ErrorCode::InvalidArgument, "exporter and importer must differ");
  }
  TransferSession base;
  base.exporter = exporter;
  base.importer = importer;
  base.shared_secret = shared_secret;
  base.session_nonce = session_nonce;
  base.product_ids = std::move(product_ids);
  base.timing = timing;
  SessionPair pair{base, base};
  pair.importer.role = TransferRole::Importer;
  return pair;
}

bool verify_evidence(const LedgerBackend& ledger, const ActionEvidence& evidence) {
  const auto& a = evidence.action;
  if (compute_id(a) != a.id || evidence.proof.leaf != a.id) return false;
  auto w = ledger.get_witness(a.author, evidence.epoch_index);
  if (!w || w->is_sentinel()) return false;
  return verify_against(evidence.proof, w->root, w->action_count);
}

ActionEvidence evidence_for(const CompanyNode& node, const ActionId& id) {
  auto rec = node.find_record(id);
  const Action* a = rec ? as_action(*rec) : nullptr;
  if (!a) throw Error(ErrorCode::NotFound, "no local action " + to_hex(id));
  auto [proof, epoch] = node.proof_for(id);
  return {*a, std::move(proof), epoch};
}

std::string_view response_check_name(ResponseCheck check) {
  switch (check) {
    case ResponseCheck::Valid: return "valid";
    case ResponseCheck::BadEvidence: return "badEvidence";
    case ResponseCheck::WrongActionType: return "wrongActionType";
    case ResponseCheck::ProductMismatch: return "productMismatch";
    case ResponseCheck::BindingMismatch: return "bindingMismatch";
    case ResponseCheck::OutsideWindow: return "outsideWindow";
  }
  return "?";
}

ResponseCheck check_complaint_response(const LedgerBackend& ledger, const LedgerEntry& complaint,
                                       const LedgerEntry& response,
                                       std::uint64_t response_window_ticks,
                                       const std::optional<Hash32>& shared_secret) {
  const auto* c = std::get_if<Complaint>(&complaint.payload);
  const auto* r = std::get_if<ComplaintResponse>(&response.payload);
  if (!c || !r) throw Error(ErrorCode::InvalidArgument, "expected a complaint and its response");
  if (r->complaint_seq != complaint.seq) return ResponseCheck::BindingMismatch;
  if (response.seq <= complaint.seq || response.tick >= complaint.tick + response_window_ticks) {
    return ResponseCheck::OutsideWindow;
  }
  if (!verify_evidence(ledger, {r->import_action, r->proof, r->epoch_index})) {
    return ResponseCheck::BadEvidence;
  }
  if (r->import_action.type != ActionType::Import) return ResponseCheck::WrongActionType;
  if (!contains_all(r->import_action.outputs, c->product_ids)) return ResponseCheck::ProductMismatch;
  if (shared_secret) {
    const auto& meta = r->import_action.transfer_meta;
    if (!meta ||
        meta->blinded_counterparty != blind(c->complainant, *shared_secret, c->export_action_id) ||
        blind(r->import_action.author, *shared_secret, c->export_action_id) != c->blinded_accused) {
      return ResponseCheck::BindingMismatch;
    }
  }
  return ResponseCheck::Valid;
}

ResponseCheck check_announcement_response(const LedgerBackend& ledger,
                                          const LedgerEntry& announcement,
                                          const LedgerEntry& response,
                                          std::uint64_t response_window_ticks,
                                          const std::optional<Hash32>& shared_secret,
                                          const std::optional<Nonce16>& session_nonce) {
  const auto* a = std::get_if<Announcement>(&announcement.payload);
  const auto* r = std::get_if<AnnouncementResponse>(&response.payload);
  if (!a || !r) {
    throw Error(ErrorCode::InvalidArgument, "expected an announcement and its response");
  }
  if (r->announcement_seq != announcement.seq) return ResponseCheck::BindingMismatch;
  if (response.seq <= announcement.seq ||
      response.tick >= announcement.tick + response_window_ticks) {
    return ResponseCheck::OutsideWindow;
  }
  if (!verify_evidence(ledger, {r->export_action, r->proof, r->epoch_index})) {
    return ResponseCheck::BadEvidence;
  }
  if (r->export_action.type != ActionType::Export) return ResponseCheck::WrongActionType;
  if (!contains_all(r->export_action.inputs, a->product_ids)) return ResponseCheck::ProductMismatch;
  if (shared_secret) {
    const auto& meta = r->export_action.transfer_meta;
    if (!meta || (session_nonce && meta->session_nonce != *session_nonce)) {
      return ResponseCheck::BindingMismatch;
    }
    const auto ctx = session_context(meta->session_nonce);
    if (meta->blinded_counterparty != blind(a->announcer, *shared_secret, ctx) ||
        blind(r->export_action.author, *shared_secret, ctx) != a->blinded_accused) {
      return ResponseCheck::BindingMismatch;
    }
  }
  return ResponseCheck::Valid;
}

std::optional<LedgerEntry> find_valid_complaint_response(const LedgerBackend& ledger,
                                                         std::uint64_t complaint_seq,
                                                         std::uint64_t response_window_ticks,
                                                         const std::optional<Hash32>& shared_secret) {
  const auto complaint = fetch_entry(ledger, complaint_seq, EntryKind::Complaint);
  for (const auto& e : ledger.read_since(complaint_seq)) {
    const auto* r = std::get_if<ComplaintResponse>(&e.payload);
    if (!r || r->complaint_seq != complaint_seq) continue;
    if (check_complaint_response(ledger, complaint, e, response_window_ticks, shared_secret) ==
        ResponseCheck::Valid) {
      return e;
    }
  }
  return std::nullopt;
}

std::optional<LedgerEntry> find_valid_announcement_response(
    const LedgerBackend& ledger, std::uint64_t announcement_seq,
    std::uint64_t response_window_ticks, const std::optional<Hash32>& shared_secret,
    const std::optional<Nonce16>& session_nonce) {
  const auto announcement = fetch_entry(ledger, announcement_seq, EntryKind::Announcement);
  for (const auto& e : ledger.read_since(announcement_seq)) {
    const auto* r = std::get_if<AnnouncementResponse>(&e.payload);
    if (!r || r->announcement_seq != announcement_seq) continue;
    if (check_announcement_response(ledger, announcement, e, response_window_ticks, shared_secret,
                                    session_nonce) == ResponseCheck::Valid) {
      return e;
    }
  }
  return std::nullopt;
}

std::string_view responsible_name(Responsible r) {
  switch (r) {
    case Responsible::Undetermined: return "undetermined";
    case Responsible::Accused: return "accused";
    case Responsible::Complainant: return "complainant";
  }
  return "?";
}

Responsible attribute_dispute(const LedgerBackend& ledger, std::uint64_t seq,
                              std::uint64_t response_window_ticks) {
  auto e = ledger.entry(seq);
  if (!e) throw Error(ErrorCode::NotFound, "no ledger entry " + std::to_string(seq));
  bool rebutted = false;
  if (e->kind() == EntryKind::Complaint) {
    rebutted = find_valid_complaint_response(ledger, seq, response_window_ticks).has_value();
  } else if (e->kind() == EntryKind::Announcement) {
    rebutted = find_valid_announcement_response(ledger, seq, response_window_ticks).has_value();
  } else {
    throw Error(ErrorCode::InvalidArgument,
                "ledger entry " + std::to_string(seq) + " does not open a dispute");
  }
  if (rebutted) return Responsible::Complainant;
  if (window_open(ledger, *e, response_window_ticks)) return Responsible::Undetermined;
  return Responsible::Accused;
}

// --- exporter side -----------------------------------------------------------

Action initiate_export(CompanyNode& exporter, TransferSession& session) {
  require_role(session, TransferRole::Exporter, "initiate_export");
  require_state(session, TransferState::Opened, "initiate_export");
  if (exporter.id() != session.exporter) {
    throw Error(ErrorCode::InvalidArgument, "node is not the session's exporter");
  }
  if (session.product_ids.empty()) {
    throw Error(ErrorCode::InvalidArgument, "export needs at least one product");
  }
  const TransferMeta meta{
      blind(session.importer, session.shared_secret, session_context(session.session_nonce)),
      session.session_nonce};
  auto action = exporter.record_export(session.product_ids, meta);
  session.export_action_id = action.id;
  advance(session, TransferState::ExportRecorded);
  return action;
}

ExportClaim share_export(CompanyNode& exporter, TransferSession& session) {
  require_role(session, TransferRole::Exporter, "share_export");
  if (session.state != TransferState::ExportRecorded && session.state != TransferState::ExportShared) {
    require_state(session, TransferState::ExportRecorded, "share_export");
  }
  ExportClaim claim{evidence_for(exporter, *session.export_action_id), {}};
  for (const auto& p : claim.evidence.action.inputs) {
    auto rec = exporter.product(p);
    if (!rec) throw Error(ErrorCode::NotFound, "missing product record " + to_hex(p));
    claim.records.push_back(std::move(*rec));
  }
  if (session.state == TransferState::ExportRecorded) {
    session.shared_tick = exporter.ledger().current_tick();
    advance(session, TransferState::ExportShared);
  }
  return claim;
}

void accept_import_confirmation(CompanyNode& exporter, TransferSession& session,
                                const ImportConfirmation& confirmation) {
  require_role(session, TransferRole::Exporter, "accept_import_confirmation");
  require_state(session, TransferState::ExportShared, "accept_import_confirmation");
  const auto& a = confirmation.evidence.action;
  auto reject = [](const std::string& why) {
    throw Error(ErrorCode::InvalidImportConfirmation, why);
  };
  if (a.type != ActionType::Import) reject("confirmation is not an import action");
  if (a.author != session.importer) reject("confirmation is not authored by the importer");
  if (!verify_evidence(exporter.ledger(), confirmation.evidence)) {
    reject("import proof does not verify against the importer's witness");
  }
  if (!contains_all(a.outputs, session.product_ids)) reject("import does not cover the exported products");
  if (!a.transfer_meta || a.transfer_meta->blinded_counterparty !=
                              blind(session.exporter, session.shared_secret,
                                    *session.export_action_id)) {
    reject("import is not bound to this export");
  }
  exporter.link_export(*session.export_action_id, {session.importer, a.id});
  session.import_action_id = a.id;
  session.import_evidence = confirmation.evidence;
  advance(session, TransferState::ImportConfirmed);
}

std::uint64_t file_complaint(CompanyNode& exporter, TransferSession& session,
                             ComplaintIndicator indicator) {
  require_role(session, TransferRole::Exporter, "file_complaint");
  require_state(session, TransferState::ExportShared, "file_complaint");
  auto& ledger = exporter.ledger();
  const auto waited = ticks_since(ledger, *session.shared_tick);
  if (waited < session.timing.complaint_deadline_ticks) {
    throw Error(ErrorCode::TooEarly, "complaint deadline not reached: " + std::to_string(waited) +
                                         " of " +
                                         std::to_string(session.timing.complaint_deadline_ticks) +
                                         " ticks elapsed");
  }
  Complaint c{session.exporter,
              blind(session.importer, session.shared_secret, *session.export_action_id),
              session.product_ids, indicator, *session.export_action_id};
  const auto seq = ledger.append(std::move(c));
  session.complaint_seq = seq;
  session.indicator = indicator;
  advance(session, TransferState::ComplaintFiled);
  return seq;
}

bool poll_complaint(CompanyNode& exporter, TransferSession& session) {
  require_role(session, TransferRole::Exporter, "poll_complaint");
  if (session.state != TransferState::ComplaintFiled) return false;
  auto hit = find_valid_complaint_response(exporter.ledger(), *session.complaint_seq,
                                           session.timing.response_window_ticks,
                                           session.shared_secret);
  if (!hit) return false;
  const auto& r = std::get<ComplaintResponse>(hit->payload);
  exporter.link_export(*session.export_action_id, {session.importer, r.import_action.id});
  session.import_action_id = r.import_action.id;
  session.import_evidence = ActionEvidence{r.import_action, r.proof, r.epoch_index};
  advance(session, TransferState::RebuttedByProof);
  return true;
}

std::vector<Record> resolve_expired_complaint(CompanyNode& exporter, TransferSession& session) {
  require_role(session, TransferRole::Exporter, "resolve_expired_complaint");
  require_state(session, TransferState::ComplaintFiled, "resolve_expired_complaint");
  // A valid rebuttal moves the session to RebuttedByProof before rejecting.
  if (poll_complaint(exporter, session)) {
    throw Error(ErrorCode::ComplaintRebutted,
                "complaint " + std::to_string(*session.complaint_seq) +
                    " was answered with a valid import proof");
  }
  auto& ledger = exporter.ledger();
  const auto complaint = fetch_entry(ledger, *session.complaint_seq, EntryKind::Complaint);
  if (window_open(ledger, complaint, session.timing.response_window_ticks)) {
    throw Error(ErrorCode::TooEarly, "response window for complaint " +
                                         std::to_string(complaint.seq) + " still open");
  }
  std::vector<Record> out;
  auto retract = exporter.record_retract(*session.export_action_id, complaint.seq);
  session.resolution_ids.push_back(retract.id);
  out.emplace_back(retract);
  if (session.indicator == ComplaintIndicator::ConvertToSell) {
    auto sell = exporter.record_sell(retract.products);
    session.resolution_ids.push_back(sell.id);
    out.emplace_back(std::move(sell));
    advance(session, TransferState::ConvertedToSell);
  } else {
    advance(session, TransferState::Retracted);
  }
  return out;
}

std::optional<std::uint64_t> respond_to_announcement(CompanyNode& exporter,
                                                     std::span<TransferSession> sessions,
                                                     const LedgerEntry& announcement) {
  const auto* a = std::get_if<Announcement>(&announcement.payload);
  if (!a) throw Error(ErrorCode::InvalidArgument, "entry is not an announcement");
  auto& ledger = exporter.ledger();
  for (auto& s : sessions) {
    if (s.role != TransferRole::Exporter || s.exporter != exporter.id() ||
        s.importer != a->announcer || !s.export_action_id) {
      continue;
    }
    if (blind(exporter.id(), s.shared_secret, session_context(s.session_nonce)) !=
        a->blinded_accused) {
      continue;
    }
    if (!window_open(ledger, announcement, s.timing.response_window_ticks)) return std::nullopt;
    if (!exporter.is_witnessed(*s.export_action_id)) return std::nullopt;
    auto ev = evidence_for(exporter, *s.export_action_id);
    if (!contains_all(ev.action.inputs, a->product_ids)) continue;
    const auto seq = ledger.append(
        AnnouncementResponse{announcement.seq, std::move(ev.action), std::move(ev.proof), ev.epoch_index});
    if (s.state == TransferState::ExportRecorded) {
      s.shared_tick = ledger.current_tick();
      advance(s, TransferState::ExportShared);
    }
    return seq;
  }
  return std::nullopt;
}

// --- importer side -----------------------------------------------------------

namespace {

Action import_from(CompanyNode& importer, TransferSession& session, const ActionEvidence& ev,
                   std::span<const ProductRecord> available) {
  std::vector<ProductRecord> records;
  for (const auto& id : ev.action.inputs) {
    auto it = std::find_if(available.begin(), available.end(),
                           [&](const ProductRecord& r) { return r.id == id; });
    if (it == available.end()) {
      throw Error(ErrorCode::InvalidExportClaim, "no product record for exported " + to_hex(id));
    }
    records.push_back(*it);
  }
  const TransferMeta meta{blind(session.exporter, session.shared_secret, ev.action.id),
                          session.session_nonce};
  auto action = importer.record_import(std::move(records), meta);
  importer.link_import(action.id, {session.exporter, ev.action.id});
  session.export_action_id = ev.action.id;
  session.import_action_id = action.id;
  session.export_evidence = ev;
  session.product_ids = ev.action.inputs;
  return action;
}

}  // namespace

Action confirm_import(CompanyNode& importer, TransferSession& session, const ExportClaim& claim) {
  require_role(session, TransferRole::Importer, "confirm_import");
  require_state(session, TransferState::Opened, "confirm_import");
  const auto& a = claim.evidence.action;
  auto reject = [](const std::string& why) { throw Error(ErrorCode::InvalidExportClaim, why); };
  if (a.type != ActionType::Export) reject("claim is not an export action");
  if (a.author != session.exporter) reject("claim is not authored by the session's exporter");
  if (!verify_evidence(importer.ledger(), claim.evidence)) {
    reject("export proof does not verify against the exporter's witness");
  }
  if (!a.transfer_meta || a.transfer_meta->session_nonce != session.session_nonce ||
      a.transfer_meta->blinded_counterparty !=
          blind(session.importer, session.shared_secret, session_context(session.session_nonce))) {
    reject("export is not addressed to this importer");
  }
  for (const auto& e : importer.ledger().read_all()) {
    const auto* c = std::get_if<Complaint>(&e.payload);
    if (c && c->export_action_id == a.id &&
        !window_open(importer.ledger(), e, session.timing.response_window_ticks) &&
        !find_valid_complaint_response(importer.ledger(), e.seq,
                                       session.timing.response_window_ticks)) {
      reject("export was withdrawn after unanswered complaint " + std::to_string(e.seq));
    }
  }
  for (const auto& r : claim.records) {
    if (compute_id(r) != r.id) {
      throw Error(ErrorCode::RecordIdMismatch, "product record " + to_hex(r.id) +
                                                   " does not hash to its id");
    }
  }
  std::multiset<ProductId> claimed;
  for (const auto& r : claim.records) claimed.insert(r.id);
  if (claimed != std::multiset<ProductId>(a.inputs.begin(), a.inputs.end())) {
    reject("product records do not match the exported products");
  }
  auto action = import_from(importer, session, claim.evidence, claim.records);
  advance(session, TransferState::ImportConfirmed);
  return action;
}

ImportConfirmation import_confirmation(const CompanyNode& importer,
                                       const TransferSession& session) {
  require_role(session, TransferRole::Importer, "import_confirmation");
  if (!session.import_action_id) {
    throw Error(ErrorCode::InvalidState, "no import recorded for session " + session.id());
  }
  return {evidence_for(importer, *session.import_action_id)};
}

std::optional<std::uint64_t> respond_to_complaint(CompanyNode& importer,
                                                  std::span<TransferSession> sessions,
                                                  const LedgerEntry& complaint) {
  const auto* c = std::get_if<Complaint>(&complaint.payload);
  if (!c) throw Error(ErrorCode::InvalidArgument, "entry is not a complaint");
  auto& ledger = importer.ledger();
  for (auto& s : sessions) {
    if (s.role != TransferRole::Importer || s.importer != importer.id() ||
        s.exporter != c->complainant || s.export_action_id != c->export_action_id ||
        !s.import_action_id) {
      continue;
    }
    if (blind(importer.id(), s.shared_secret, c->export_action_id) != c->blinded_accused) continue;
    if (!window_open(ledger, complaint, s.timing.response_window_ticks)) return std::nullopt;
    if (!importer.is_witnessed(*s.import_action_id)) return std::nullopt;
    auto ev = evidence_for(importer, *s.import_action_id);
    return ledger.append(
        ComplaintResponse{complaint.seq, std::move(ev.action), std::move(ev.proof), ev.epoch_index});
  }
  return std::nullopt;
}

std::uint64_t announce_missing_export(CompanyNode& importer, TransferSession& session) {
  require_role(session, TransferRole::Importer, "announce_missing_export");
  require_state(session, TransferState::Opened, "announce_missing_export");
  if (session.product_ids.empty()) {
    for (const auto& r : session.received_records) session.product_ids.push_back(r.id);
  }
  Announcement a{session.importer,
                 blind(session.exporter, session.shared_secret,
                       session_context(session.session_nonce)),
                 session.product_ids};
  const auto seq = importer.ledger().append(std::move(a));
  session.announcement_seq = seq;
  advance(session, TransferState::AnnouncementFiled);
  return seq;
}

Action resolve_announcement(CompanyNode& importer, TransferSession& session) {
  require_role(session, TransferRole::Importer, "resolve_announcement");
  require_state(session, TransferState::AnnouncementFiled, "resolve_announcement");
  auto& ledger = importer.ledger();
  const auto seq = *session.announcement_seq;
  if (auto hit = find_valid_announcement_response(ledger, seq, session.timing.response_window_ticks,
                                                  session.shared_secret, session.session_nonce)) {
    const auto& r = std::get<AnnouncementResponse>(hit->payload);
    auto action =
        import_from(importer, session, {r.export_action, r.proof, r.epoch_index},
                    session.received_records);
    advance(session, TransferState::ImportConfirmed);
    return action;
  }
  const auto announcement = fetch_entry(ledger, seq, EntryKind::Announcement);
  if (window_open(ledger, announcement, session.timing.response_window_ticks)) {
    throw Error(ErrorCode::TooEarly,
                "response window for announcement " + std::to_string(seq) + " still open");
  }
  std::vector<ProductSpec> specs;
  for (const auto& id : session.product_ids) {
    auto it = std::find_if(session.received_records.begin(), session.received_records.end(),
                           [&](const ProductRecord& r) { return r.id == id; });
    ProductSpec spec{it == session.received_records.end() ? "product" : it->name,
                     it == session.received_records.end() ? std::vector<Detail>{} : it->details};
    std::erase_if(spec.details, [](const Detail& d) { return d.key == "disputeRef"; });
    spec.details.push_back({"disputeRef", "announcement/" + std::to_string(seq)});
    specs.push_back(std::move(spec));
  }
  auto bought = importer.record_buy(std::move(specs));
  session.resolution_ids.push_back(bought.action.id);
  advance(session, TransferState::BuyFallback);
  return bought.action;
}

// --- wire forms ----------------------------------------------------------------

json export_claim_to_json(const ExportClaim& claim) {
  return {{"action", claim.evidence.action},
          {"records", claim.records},
          {"proof", claim.evidence.proof},
          {"epochIndex", claim.evidence.epoch_index}};
}

ExportClaim export_claim_from_json(const json& j) {
  try {
    ExportClaim c;
    c.evidence.action = j.at("action").get<Action>();
    c.records = j.at("records").get<std::vector<ProductRecord>>();
    c.evidence.proof = j.at("proof").get<MerkleProof>();
    c.evidence.epoch_index = j.at("epochIndex").get<std::uint64_t>();
    return c;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Parse, std::string("export claim: ") + e.what());
  }
}

json import_confirmation_to_json(const ImportConfirmation& confirmation) {
  return {{"action", confirmation.evidence.action},
          {"proof", confirmation.evidence.proof},
          {"epochIndex", confirmation.evidence.epoch_index}};
}

ImportConfirmation import_confirmation_from_json(const json& j) {
  try {
    ImportConfirmation c;
    c.evidence.action = j.at("action").get<Action>();
    c.evidence.proof = j.at("proof").get<MerkleProof>();
    c.evidence.epoch_index = j.at("epochIndex").get<std::uint64_t>();
    return c;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Parse, std::string("import confirmation: ") + e.what());
  }
}

namespace {

template <class T>
json opt_json(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

template <class T>
std::optional<T> opt_from(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<T>();
}

json evidence_json(const std::optional<ActionEvidence>& ev) {
  if (!ev) return nullptr;
  return {{"action", ev->action}, {"proof", ev->proof}, {"epochIndex", ev->epoch_index}};
}

std::optional<ActionEvidence> evidence_from(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  const auto& e = j.at(key);
  return ActionEvidence{e.at("action").get<Action>(), e.at("proof").get<MerkleProof>(),
                        e.at("epochIndex").get<std::uint64_t>()};
}

}  // namespace

json session_to_json(const TransferSession& s) {
  json history = json::array();
  for (auto h : s.history) history.push_back(transfer_state_name(h));
  return {
      {"sessionId", s.id()},
      {"role", s.role == TransferRole::Exporter ? "exporter" : "importer"},
      {"exporter", s.exporter},
      {"importer", s.importer},
      {"sharedSecret", s.shared_secret},
      {"sessionNonce", s.session_nonce},
      {"productIds", s.product_ids},
      {"complaintDeadlineTicks", s.timing.complaint_deadline_ticks},
      {"responseWindowTicks", s.timing.response_window_ticks},
      {"state", transfer_state_name(s.state)},
      {"history", history},
      {"exportActionId", opt_json(s.export_action_id)},
      {"importActionId", opt_json(s.import_action_id)},
      {"sharedTick", opt_json(s.shared_tick)},
      {"complaintSeq", opt_json(s.complaint_seq)},
      {"indicator", s.indicator ? json(indicator_name(*s.indicator)) : json(nullptr)},
      {"announcementSeq", opt_json(s.announcement_seq)},
      {"resolutionIds", s.resolution_ids},
      {"exportEvidence", evidence_json(s.export_evidence)},
      {"importEvidence", evidence_json(s.import_evidence)},
      {"receivedRecords", s.received_records},
  };
}

TransferSession session_from_json(const json& j) {
  try {
    TransferSession s;
    const auto role = j.at("role").get<std::string>();
    if (role != "exporter" && role != "importer") {
      throw Error(ErrorCode::Parse, "unknown session role " + role);
    }
    s.role = role == "exporter" ? TransferRole::Exporter : TransferRole::Importer;
    s.exporter = j.at("exporter").get<CompanyId>();
    s.importer = j.at("importer").get<CompanyId>();
    s.shared_secret = j.at("sharedSecret").get<Hash32>();
    s.session_nonce = j.at("sessionNonce").get<Nonce16>();
    s.product_ids = j.at("productIds").get<std::vector<ProductId>>();
    s.timing.complaint_deadline_ticks = j.at("complaintDeadlineTicks").get<std::uint64_t>();
    s.timing.response_window_ticks = j.at("responseWindowTicks").get<std::uint64_t>();
    auto parse_state = [](const json& v) {
      auto st = parse_transfer_state(v.get<std::string>());
      if (!st) throw Error(ErrorCode::Parse, "unknown transfer state " + v.dump());
      return *st;
    };
    s.state = parse_state(j.at("state"));
    s.history.clear();
    for (const auto& h : j.at("history")) s.history.push_back(parse_state(h));
    s.export_action_id = opt_from<ActionId>(j, "exportActionId");
    s.import_action_id = opt_from<ActionId>(j, "importActionId");
    s.shared_tick = opt_from<std::uint64_t>(j, "sharedTick");
    s.complaint_seq = opt_from<std::uint64_t>(j, "complaintSeq");
    if (auto ind = opt_from<std::string>(j, "indicator")) {
      s.indicator = parse_indicator(*ind);
      if (!s.indicator) throw Error(ErrorCode::Parse, "unknown indicator " + *ind);
    }
    s.announcement_seq = opt_from<std::uint64_t>(j, "announcementSeq");
    s.resolution_ids = j.value("resolutionIds", std::vector<ActionId>{});
    s.export_evidence = evidence_from(j, "exportEvidence");
    s.import_evidence = evidence_from(j, "importEvidence");
    s.received_records = j.value("receivedRecords", std::vector<ProductRecord>{});
    return s;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Parse, std::string("session: ") + e.what());
  }
}

}  // namespace ccchain
