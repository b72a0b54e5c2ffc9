#include "ccchain/codec.hpp"

#include <string>

namespace ccchain {

namespace {

const json& field(const json& j, const char* key) {
  if (!j.is_object()) throw Error(ErrorCode::Parse, "expected JSON object");
  auto it = j.find(key);
  if (it == j.end()) throw Error(ErrorCode::Parse, std::string("missing field '") + key + "'");
  return *it;
}

template <class T>
T get(const json& j, const char* key) {
  const json& v = field(j, key);
  try {
    return v.get<T>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Parse, std::string("field '") + key + "': " + e.what());
  }
}

std::uint64_t get_u64(const json& j, const char* key) {
  const json& v = field(j, key);
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
    throw Error(ErrorCode::Parse, std::string("field '") + key + "' must be a non-negative integer");
  }
  return v.get<std::uint64_t>();
}

}  // namespace

json parse_json(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Parse, std::string("invalid JSON: ") + e.what());
  }
}

void to_json(json& j, const CompanyId& c) { j = c.hex(); }
void from_json(const json& j, CompanyId& c) { from_json(j, c.value); }

void to_json(json& j, const ProductRecord& p) {
  json details = json::array();
  for (const auto& d : p.details) details.push_back(json::array({d.key, d.value}));
  j = json{{"id", p.id}, {"name", p.name}, {"details", std::move(details)}, {"nonce", p.nonce}};
}

void from_json(const json& j, ProductRecord& p) {
  p.id = get<Hash32>(j, "id");
  p.name = get<std::string>(j, "name");
  p.nonce = get<Nonce16>(j, "nonce");
  p.details.clear();
  for (const auto& pair : field(j, "details")) {
    if (!pair.is_array() || pair.size() != 2 || !pair[0].is_string() || !pair[1].is_string()) {
      throw Error(ErrorCode::Parse, "detail entries must be [key, value] string pairs");
    }
    p.details.push_back({pair[0].get<std::string>(), pair[1].get<std::string>()});
  }
}

void to_json(json& j, const TransferMeta& m) {
  j = json{{"blindedCounterparty", m.blinded_counterparty}, {"sessionNonce", m.session_nonce}};
}

void from_json(const json& j, TransferMeta& m) {
  m.blinded_counterparty = get<Hash32>(j, "blindedCounterparty");
  m.session_nonce = get<Nonce16>(j, "sessionNonce");
}

void to_json(json& j, const Action& a) {
  j = json{{"id", a.id},
           {"type", action_type_name(a.type)},
           {"timestamp", a.timestamp},
           {"inputs", a.inputs},
           {"outputs", a.outputs},
           {"author", a.author},
           {"transferMeta", a.transfer_meta ? json(*a.transfer_meta) : json(nullptr)}};
}

void from_json(const json& j, Action& a) {
  a.id = get<Hash32>(j, "id");
  const auto type_name = get<std::string>(j, "type");
  const auto type = parse_action_type(type_name);
  if (!type) throw Error(ErrorCode::Parse, "unknown action type '" + type_name + "'");
  a.type = *type;
  a.timestamp = get_u64(j, "timestamp");
  a.inputs = get<std::vector<Hash32>>(j, "inputs");
  a.outputs = get<std::vector<Hash32>>(j, "outputs");
  a.author = get<CompanyId>(j, "author");
  const json& meta = field(j, "transferMeta");
  if (meta.is_null()) {
    a.transfer_meta.reset();
  } else {
    a.transfer_meta = meta.get<TransferMeta>();
  }
}

void to_json(json& j, const RetractExport& r) {
  j = json{{"id", r.id},
           {"type", "retractExport"},
           {"timestamp", r.timestamp},
           {"products", r.products},
           {"author", r.author},
           {"exportActionId", r.export_action_id},
           {"complaintSeq", r.complaint_seq}};
}

void from_json(const json& j, RetractExport& r) {
  if (get<std::string>(j, "type") != "retractExport") {
    throw Error(ErrorCode::Parse, "not a retractExport record");
  }
  r.id = get<Hash32>(j, "id");
  r.timestamp = get_u64(j, "timestamp");
  r.products = get<std::vector<Hash32>>(j, "products");
  r.author = get<CompanyId>(j, "author");
  r.export_action_id = get<Hash32>(j, "exportActionId");
  r.complaint_seq = get_u64(j, "complaintSeq");
}

json record_to_json(const Record& record) {
  return std::visit([](const auto& r) { return json(r); }, record);
}

Record record_from_json(const json& j) {
  if (get<std::string>(j, "type") == "retractExport") return j.get<RetractExport>();
  return j.get<Action>();
}

void to_json(json& j, const MerkleProof& p) {
  json path = json::array();
  for (const auto& step : p.path) {
    path.push_back({{"hash", step.sibling}, {"side", step.side == Side::Left ? "left" : "right"}});
  }
  j = json{{"leaf", p.leaf}, {"path", std::move(path)}, {"root", p.root}};
}

void from_json(const json& j, MerkleProof& p) {
  p.leaf = get<Hash32>(j, "leaf");
  p.root = get<Hash32>(j, "root");
  p.path.clear();
  for (const auto& step : field(j, "path")) {
    const auto side = get<std::string>(step, "side");
    if (side != "left" && side != "right") {
      throw Error(ErrorCode::Parse, "proof side must be 'left' or 'right'");
    }
    p.path.push_back({get<Hash32>(step, "hash"), side == "left" ? Side::Left : Side::Right});
  }
}

void to_json(json& j, const EpochWitness& w) {
  j = json{{"company", w.company},
           {"epochIndex", w.epoch_index},
           {"root", w.root},
           {"actionCount", w.action_count}};
}

void from_json(const json& j, EpochWitness& w) {
  w.company = get<CompanyId>(j, "company");
  w.epoch_index = get_u64(j, "epochIndex");
  w.root = get<Hash32>(j, "root");
  w.action_count = get_u64(j, "actionCount");
}

void to_json(json& j, const Complaint& c) {
  j = json{{"complainant", c.complainant},
           {"blindedAccused", c.blinded_accused},
           {"productIds", c.product_ids},
           {"indicator", indicator_name(c.indicator)},
           {"exportActionId", c.export_action_id}};
}

void from_json(const json& j, Complaint& c) {
  c.complainant = get<CompanyId>(j, "complainant");
  c.blinded_accused = get<Hash32>(j, "blindedAccused");
  c.product_ids = get<std::vector<Hash32>>(j, "productIds");
  const auto name = get<std::string>(j, "indicator");
  const auto indicator = parse_indicator(name);
  if (!indicator) throw Error(ErrorCode::Parse, "unknown complaint indicator '" + name + "'");
  c.indicator = *indicator;
  c.export_action_id = get<Hash32>(j, "exportActionId");
}

void to_json(json& j, const ComplaintResponse& r) {
  j = json{{"complaintSeq", r.complaint_seq},
           {"importAction", r.import_action},
           {"proof", r.proof},
           {"epochIndex", r.epoch_index}};
}

void from_json(const json& j, ComplaintResponse& r) {
  r.complaint_seq = get_u64(j, "complaintSeq");
  r.import_action = get<Action>(j, "importAction");
  r.proof = get<MerkleProof>(j, "proof");
  r.epoch_index = get_u64(j, "epochIndex");
}

void to_json(json& j, const Announcement& a) {
  j = json{{"announcer", a.announcer},
           {"blindedAccused", a.blinded_accused},
           {"productIds", a.product_ids}};
}

void from_json(const json& j, Announcement& a) {
  a.announcer = get<CompanyId>(j, "announcer");
  a.blinded_accused = get<Hash32>(j, "blindedAccused");
  a.product_ids = get<std::vector<Hash32>>(j, "productIds");
}

void to_json(json& j, const AnnouncementResponse& r) {
  j = json{{"announcementSeq", r.announcement_seq},
           {"exportAction", r.export_action},
           {"proof", r.proof},
           {"epochIndex", r.epoch_index}};
}

void from_json(const json& j, AnnouncementResponse& r) {
  r.announcement_seq = get_u64(j, "announcementSeq");
  r.export_action = get<Action>(j, "exportAction");
  r.proof = get<MerkleProof>(j, "proof");
  r.epoch_index = get_u64(j, "epochIndex");
}

json entry_to_json(const LedgerEntry& entry) {
  return json{{"kind", entry_kind_name(entry.kind())},
              {"payload", std::visit([](const auto& p) { return json(p); }, entry.payload)},
              {"tick", entry.tick},
              {"seq", entry.seq}};
}

LedgerEntry entry_from_json(const json& j) {
  LedgerEntry entry;
  entry.seq = get_u64(j, "seq");
  entry.tick = get_u64(j, "tick");
  const auto kind = get<std::string>(j, "kind");
  const json& payload = field(j, "payload");
  try {
    if (kind == "witness") {
      entry.payload = payload.get<EpochWitness>();
    } else if (kind == "complaint") {
      entry.payload = payload.get<Complaint>();
    } else if (kind == "complaintResponse") {
      entry.payload = payload.get<ComplaintResponse>();
    } else if (kind == "announcement") {
      entry.payload = payload.get<Announcement>();
    } else if (kind == "announcementResponse") {
      entry.payload = payload.get<AnnouncementResponse>();
    } else {
      throw Error(ErrorCode::Parse, "unknown ledger entry kind '" + kind + "'");
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Parse, std::string("ledger payload: ") + e.what());
  }
  return entry;
}

}  // namespace ccchain
