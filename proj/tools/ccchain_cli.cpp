// ccchain: operator tool for company nodes sharing a file-backed ledger.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "ccchain/codec.hpp"
#include "ccchain/company_node.hpp"
#include "ccchain/error.hpp"
#include "ccchain/public_ledger.hpp"
#include "ccchain/scenario.hpp"
#include "ccchain/simnet.hpp"
#include "ccchain/storage_model.hpp"
#include "ccchain/store.hpp"
#include "ccchain/trace.hpp"
#include "ccchain/transfer.hpp"

namespace fs = std::filesystem;
using namespace ccchain;

namespace {

struct CliConfig {
  fs::path storage_path;
  std::string company_name;
  std::optional<std::string> key_seed;
  std::uint64_t epoch_length_ticks = 1;
  std::uint64_t dispute_deadline_ticks = 2;
  std::string ledger_endpoint = "file";
};

CliConfig load_config(const std::string& flag_path) {
  std::string path = flag_path;
  if (path.empty()) {
    if (const char* env = std::getenv("CCCHAIN_CONFIG")) path = env;
  }
  if (path.empty()) {
    throw Error(ErrorCode::Config, "no config file: pass --config or set CCCHAIN_CONFIG");
  }
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Config, "cannot read config " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  json j;
  try {
    j = parse_json(buf.str());
  } catch (const Error& e) {
    throw Error(ErrorCode::Config, "config " + path + ": " + e.what());
  }
  if (!j.is_object()) throw Error(ErrorCode::Config, "config must be a JSON object");
  static const std::set<std::string> known{"storagePath",      "companyName",
                                           "keySeed",          "epochLengthTicks",
                                           "ledgerEndpoint",   "disputeDeadlineTicks"};
  for (const auto& [key, _] : j.items()) {
    if (!known.contains(key)) throw Error(ErrorCode::Config, "unknown config field " + key);
  }
  CliConfig c;
  try {
    if (!j.contains("storagePath") || !j["storagePath"].is_string() ||
        j["storagePath"].get<std::string>().empty()) {
      throw Error(ErrorCode::Config, "config is missing storagePath");
    }
    c.storage_path = j["storagePath"].get<std::string>();
    if (c.storage_path.is_relative()) {
      c.storage_path = fs::absolute(fs::path(path)).parent_path() / c.storage_path;
    }
    c.company_name = j.value("companyName", "");
    if (j.contains("keySeed")) c.key_seed = j["keySeed"].get<std::string>();
    c.epoch_length_ticks = j.value("epochLengthTicks", c.epoch_length_ticks);
    c.dispute_deadline_ticks = j.value("disputeDeadlineTicks", c.dispute_deadline_ticks);
    c.ledger_endpoint = j.value("ledgerEndpoint", c.ledger_endpoint);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Config, std::string("config: ") + e.what());
  }
  if (c.epoch_length_ticks == 0) throw Error(ErrorCode::Config, "epochLengthTicks must be positive");
  if (c.dispute_deadline_ticks == 0) {
    throw Error(ErrorCode::Config, "disputeDeadlineTicks must be positive");
  }
  if (c.ledger_endpoint != "file" && c.ledger_endpoint != "in-process") {
    throw Error(ErrorCode::Config, "ledgerEndpoint must be \"file\" or \"in-process\"");
  }
  return c;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::NotFound, "cannot read " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw Error(ErrorCode::Storage, "cannot write " + path.string());
    out << text;
    if (!out.flush()) throw Error(ErrorCode::Storage, "write to " + path.string() + " failed");
  }
  fs::rename(tmp, path);
}

// Writes to the file, or to stdout for "" and "-".
void emit(const std::string& out_path, const std::string& text) {
  if (out_path.empty() || out_path == "-") {
    std::cout << text;
  } else {
    write_file(out_path, text);
  }
}

std::vector<Detail> parse_details(const std::vector<std::string>& raw) {
  std::vector<Detail> out;
  for (const auto& d : raw) {
    const auto eq = d.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw Error(ErrorCode::InvalidArgument, "detail must be key=value: " + d);
    }
    out.push_back({d.substr(0, eq), d.substr(eq + 1)});
  }
  return out;
}

std::vector<ProductId> parse_ids(const std::vector<std::string>& raw) {
  std::vector<ProductId> out;
  for (const auto& r : raw) out.push_back(hash_from_hex(r));
  return out;
}

// Mantissa with four decimals and a bare exponent, e.g. 5.9117e9.
std::string sci4(double v) {
  if (v == 0) return "0";
  int e = static_cast<int>(std::floor(std::log10(std::fabs(v))));
  double m = std::round(v / std::pow(10.0, e) * 1e4) / 1e4;
  if (std::fabs(m) >= 10) {
    m /= 10;
    ++e;
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4fe%d", m, e);
  return buf;
}

// ---------------------------------------------------------------------------

struct OpenNode {
  std::unique_ptr<FileStore> store;
  std::unique_ptr<CompanyNode> node;
};

class Workspace {
 public:
  Workspace(CliConfig config, std::string company_override)
      : config_(std::move(config)) {
    if (config_.ledger_endpoint != "file") {
      throw Error(ErrorCode::Config,
                  "ledgerEndpoint \"in-process\" does not persist across invocations; "
                  "node commands need \"file\"");
    }
    name_ = company_override.empty() ? config_.company_name : company_override;
    std::error_code ec;
    fs::create_directories(config_.storage_path / "companies", ec);
    if (ec) throw Error(ErrorCode::Storage, "cannot create " + config_.storage_path.string());
    ledger_ = std::make_unique<FileLedger>(config_.storage_path / "ledger.jsonl");
    load_registry();
  }

  LedgerBackend& ledger() { return *ledger_; }
  const CliConfig& config() const { return config_; }
  const std::string& name() const {
    if (name_.empty()) {
      throw Error(ErrorCode::Config, "no company selected: set companyName or pass --company");
    }
    return name_;
  }

  CompanyId own_id() const {
    if (config_.key_seed && name() == config_.company_name) {
      return CompanyId::from_seed(*config_.key_seed);
    }
    return CompanyId::from_seed(name());
  }

  CompanyId register_self() {
    const auto id = own_id();
    auto it = registry_.find(name());
    if (it != registry_.end() && it->second != id) {
      throw Error(ErrorCode::InvalidState,
                  "company " + name() + " is already registered as " + it->second.hex());
    }
    registry_[name()] = id;
    save_registry();
    return id;
  }

  CompanyId resolve(const std::string& ref) const {
    if (auto it = registry_.find(ref); it != registry_.end()) return it->second;
    if (ref.size() == 64) return CompanyId::from_hex(ref);
    throw Error(ErrorCode::NotFound, "unknown company " + ref);
  }

  std::string name_of(const CompanyId& id) const {
    for (const auto& [n, c] : registry_) {
      if (c == id) return n;
    }
    return id.hex();
  }

  const std::map<std::string, CompanyId>& registry() const { return registry_; }

  OpenNode open(const CompanyId& id) {
    OpenNode n;
    n.store = std::make_unique<FileStore>(config_.storage_path / "companies" / (id.hex() + ".jsonl"));
    NodeOptions options;
    options.epoch_length_ticks = config_.epoch_length_ticks;
    n.node = std::make_unique<CompanyNode>(id, *ledger_, nonces_, options, Clock{}, n.store.get());
    return n;
  }

  OpenNode open_self() {
    const auto id = own_id();
    auto it = registry_.find(name());
    if (it == registry_.end() || it->second != id) {
      throw Error(ErrorCode::NotFound, "company " + name() + " is not registered; run company init");
    }
    return open(id);
  }

  std::shared_ptr<NonceSource> nonces() const { return nonces_; }

  TransferTiming timing() const {
    return {config_.dispute_deadline_ticks, config_.dispute_deadline_ticks};
  }

 private:
  fs::path registry_path() const { return config_.storage_path / "registry.json"; }

  void load_registry() {
    if (!fs::exists(registry_path())) return;
    try {
      const auto j = parse_json(read_file(registry_path().string()));
      for (const auto& [n, hex] : j.items()) registry_[n] = CompanyId::from_hex(hex.get<std::string>());
    } catch (const std::exception& e) {
      throw Error(ErrorCode::Storage, "registry " + registry_path().string() + ": " + e.what());
    }
  }

  void save_registry() {
    json j = json::object();
    for (const auto& [n, id] : registry_) j[n] = id.hex();
    write_file(registry_path(), j.dump(2) + "\n");
  }

  CliConfig config_;
  std::string name_;
  std::unique_ptr<FileLedger> ledger_;
  std::map<std::string, CompanyId> registry_;
  std::shared_ptr<NonceSource> nonces_ = std::make_shared<SystemNonceSource>();
};

const std::string kSessionPrefix = "session/";
const std::string kAnsweredPrefix = "answered/";

std::vector<TransferSession> load_sessions(const Store& store) {
  std::vector<TransferSession> out;
  for (const auto& [_, v] : store.scan(kSessionPrefix)) out.push_back(session_from_json(parse_json(v)));
  return out;
}

TransferSession load_session(const Store& store, const std::string& id) {
  auto v = store.get(kSessionPrefix + id);
  if (!v) throw Error(ErrorCode::NotFound, "no transfer session " + id);
  return session_from_json(parse_json(*v));
}

void save_session(Store& store, const TransferSession& s) {
  store.put(kSessionPrefix + s.id(), session_to_json(s).dump());
}

json node_state(const CompanyNode& node) {
  json consumable = json::array();
  for (const auto& p : node.consumable_products()) consumable.push_back(to_hex(p));
  return {{"company", node.id().hex()},
          {"logSize", node.log_size()},
          {"epochIndex", node.epoch_index()},
          {"pending", node.pending_count()},
          {"consumable", consumable},
          {"logDigest", to_hex(sha256(node.export_log_jsonl()))}};
}

void print_recorded(const Recorded& r) {
  for (const auto& p : r.products) std::cout << to_hex(p.id) << '\n';
  std::cout << "action " << to_hex(r.action.id) << '\n';
}

Hash32 fresh_secret(NonceSource& nonces) {
  Hash32 h;
  const auto a = nonces.next();
  const auto b = nonces.next();
  std::copy(a.bytes.begin(), a.bytes.end(), h.bytes.begin());
  std::copy(b.bytes.begin(), b.bytes.end(), h.bytes.begin() + 16);
  return h;
}

std::vector<ProductRecord> records_from_file(const std::string& path) {
  const auto j = parse_json(read_file(path));
  const json& arr = j.is_object() ? j.at("records") : j;
  return arr.get<std::vector<ProductRecord>>();
}

// ---------------------------------------------------------------------------

struct Globals {
  std::string config_path;
  std::string company;
};

// Storage for every parsed flag; lives for the whole of main().
struct Options {
  std::string out;
  std::uint64_t ticks = 1;
  std::uint64_t seq = 0;
  std::string scenario;
  std::string plot;
  struct {
    std::vector<std::string> names;
    std::vector<std::string> details;
    std::vector<std::string> inputs;
  } record;
  struct {
    std::string to, from, session, secret, claim, confirmation, records, out;
    std::string indicator = "retract";
    std::vector<std::string> products;
  } transfer;
  struct {
    std::string product, from, direction = "backward", out, requester = "cli";
  } trace;
  struct {
    std::vector<std::string> archs;
    std::vector<double> companies;
    StorageModelParams storage;
    GasModelParams gas;
    bool csv = false;
  } model;
  struct {
    std::vector<std::string> types;
    std::size_t count = 1000;
    std::vector<std::uint64_t> sizes;
    bool track = false;
    std::uint64_t seed = 1;
    std::size_t payload = 200;
  } bench;
};

Workspace workspace(const Globals& g) { return Workspace(load_config(g.config_path), g.company); }

void add_company_commands(CLI::App& app, Globals& g, Options& opts) {
  auto* company = app.add_subcommand("company", "Company registration and state");
  company->require_subcommand(1);

  company->add_subcommand("init", "Create the shared ledger and register this company")
      ->callback([&g] {
        auto ws = workspace(g);
        const auto id = ws.register_self();
        auto n = ws.open(id);
        std::cout << id.hex() << '\n';
      });

  company->add_subcommand("list", "List registered companies")->callback([&g] {
    auto ws = workspace(g);
    for (const auto& [n, id] : ws.registry()) std::cout << id.hex() << ' ' << n << '\n';
  });

  company->add_subcommand("show", "Print a summary of this company's local state")
      ->callback([&g] {
        auto ws = workspace(g);
        auto n = ws.open_self();
        std::cout << node_state(*n.node).dump(2) << '\n';
      });

  auto* exp = company->add_subcommand("export-log", "Write the audit log as JSON lines");
  auto* out = &opts.out;
  exp->add_option("--out", *out, "Output file (default stdout)");
  exp->callback([&g, out] {
    auto ws = workspace(g);
    auto n = ws.open_self();
    emit(*out, n.node->export_log_jsonl());
  });
}

void add_record_commands(CLI::App& app, Globals& g, Options& opts) {
  auto* record = app.add_subcommand("record", "Record actions on this company's log");
  record->require_subcommand(1);

  auto* o = &opts.record;

  auto specs = [o] {
    if (o->names.empty()) throw Error(ErrorCode::InvalidArgument, "at least one --name is required");
    std::vector<ProductSpec> out;
    const auto details = parse_details(o->details);
    for (const auto& n : o->names) out.push_back({n, details});
    return out;
  };

  auto* create = record->add_subcommand("create", "Create products from nothing");
  create->add_option("--name", o->names, "Product name (repeat for several outputs)")->required();
  create->add_option("--detail", o->details, "key=value detail");
  create->callback([&g, specs] {
    auto ws = workspace(g);
    auto n = ws.open_self();
    print_recorded(n.node->record_create(specs()));
  });

  auto* buy = record->add_subcommand("buy", "Bring in products from an outside supplier");
  buy->add_option("--name", o->names, "Product name (repeat for several outputs)")->required();
  buy->add_option("--detail", o->details, "key=value detail");
  buy->callback([&g, specs] {
    auto ws = workspace(g);
    auto n = ws.open_self();
    print_recorded(n.node->record_buy(specs()));
  });

  auto* produce = record->add_subcommand("produce", "Consume inputs and make outputs");
  produce->add_option("--input", o->inputs, "Input product id")->required();
  produce->add_option("--name", o->names, "Output name (repeat for several outputs)")->required();
  produce->add_option("--detail", o->details, "key=value detail");
  produce->callback([&g, o, specs] {
    auto ws = workspace(g);
    auto n = ws.open_self();
    const auto inputs = parse_ids(o->inputs);
    print_recorded(n.node->record_produce(inputs, specs()));
  });

  auto* sell = record->add_subcommand("sell", "Sell products to end customers");
  sell->add_option("--input", o->inputs, "Product id")->required();
  sell->callback([&g, o] {
    auto ws = workspace(g);
    auto n = ws.open_self();
    const auto inputs = parse_ids(o->inputs);
    const auto action = n.node->record_sell(inputs);
    std::cout << "action " << to_hex(action.id) << '\n';
  });
}

void add_witness_commands(CLI::App& app, Globals& g) {
  auto* witness = app.add_subcommand("witness", "Epoch witnesses");
  witness->require_subcommand(1);
  witness->add_subcommand("publish", "Cut the current epoch and publish its root")->callback([&g] {
    auto ws = workspace(g);
    auto n = ws.open_self();
    const auto w = n.node->cut_epoch();
    std::cout << "epoch " << w.epoch_index << " root " << to_hex(w.root) << " actions "
              << w.action_count << '\n';
  });
}

void add_transfer_commands(CLI::App& app, Globals& g, Options& opts) {
  auto* transfer = app.add_subcommand("transfer", "Export/import between companies and disputes");
  transfer->require_subcommand(1);

  auto* o = &opts.transfer;

  auto* exp = transfer->add_subcommand("export", "Record an export and open a transfer session");
  exp->add_option("--to", o->to, "Importing company (name or id)")->required();
  exp->add_option("--product", o->products, "Product id")->required();
  exp->add_option("--secret", o->secret, "Shared secret (hex); generated when omitted");
  exp->callback([&g, o] {
    auto ws = workspace(g);
    auto n = ws.open_self();
    const auto secret = o->secret.empty() ? fresh_secret(*ws.nonces()) : hash_from_hex(o->secret);
    auto pair = open_session(n.node->id(), ws.resolve(o->to), secret, ws.nonces()->next(),
                             parse_ids(o->products), ws.timing());
    auto& s = pair.exporter;
    const auto action = initiate_export(*n.node, s);
    save_session(*n.store, s);
    std::cout << "session " << s.id() << '\n'
              << "secret " << to_hex(secret) << '\n'
              << "action " << to_hex(action.id) << '\n';
  });

  auto* share = transfer->add_subcommand("share", "Write the export claim for the importer");
  share->add_option("--session", o->session, "Session id")->required();
  share->add_option("--out", o->out, "Claim file (default stdout)");
  share->callback([&g, o] {
    auto ws = workspace(g);
    auto n = ws.open_self();
    auto s = load_session(*n.store, o->session);
    const auto claim = share_export(*n.node, s);
    save_session(*n.store, s);
    emit(o->out, export_claim_to_json(claim).dump() + "\n");
  });

  auto* imp = transfer->add_subcommand("import", "Verify an export claim and record the import");
  imp->add_option("--from", o->from, "Exporting company (name or id)")->required();
  imp->add_option("--session", o->session, "Session id")->required();
  imp->add_option("--secret", o->secret, "Shared secret (hex)")->required();
  imp->add_option("--claim", o->claim, "Claim file")->required();
  imp->callback([&g, o] {
    auto ws = workspace(g);
    auto n = ws.open_self();
    const auto claim = export_claim_from_json(parse_json(read_file(o->claim)));
    std::vector<ProductId> ids;
    for (const auto& r : claim.records) ids.push_back(r.id);
    auto s = open_session(ws.resolve(o->from), n.node->id(), hash_from_hex(o->secret),
                          from_hex<16>(o->session), ids, ws.timing())
                 .importer;
    const auto action = confirm_import(*n.node, s, claim);
    save_session(*n.store, s);
    std::cout << "action " << to_hex(action.id) << '\n';
  });

  auto* confirm = transfer->add_subcommand("confirm", "Write the import confirmation for the exporter");
  confirm->add_option("--session", o->session, "Session id")->required();
  confirm->add_option("--out", o->out, "Confirmation file (default stdout)");
  confirm->callback([&g, o] {
    auto ws = workspace(g);
    auto n = ws.open_self();
    const auto s = load_session(*n.store, o->session);
    emit(o->out, import_confirmation_to_json(import_confirmation(*n.node, s)).dump() + "\n");
  });

  auto* accept = transfer->add_subcommand("accept", "Check the importer's confirmation");
  accept->add_option("--session", o->session, "Session id")->required();
  accept->add_option("--confirmation", o->confirmation, "Confirmation file")->required();
  accept->callback([&g, o] {
    auto ws = workspace(g);
    auto n = ws.open_self();
    auto s = load_session(*n.store, o->session);
    accept_import_confirmation(*n.node, s,
                               import_confirmation_from_json(parse_json(read_file(o->confirmation))));
    save_session(*n.store, s);
    std::cout << "state " << transfer_state_name(s.state) << '\n';
  });

  auto* complain = transfer->add_subcommand("complain", "File a complaint about a missing import");
  complain->add_option("--session", o->session, "Session id")->required();
  complain->add_option("--indicator", o->indicator, "retract or convertToSell");
  complain->callback([&g, o] {
    auto ws = workspace(g);
    auto n = ws.open_self();
    const auto indicator = parse_indicator(o->indicator);
    if (!indicator) throw Error(ErrorCode::InvalidArgument, "unknown indicator " + o->indicator);
    auto s = load_session(*n.store, o->session);
    const auto seq = file_complaint(*n.node, s, *indicator);
    save_session(*n.store, s);
    std::cout << "complaint " << seq << '\n';
  });

  transfer->add_subcommand("respond", "Answer open complaints and announcements that name us")
      ->callback([&g] {
        auto ws = workspace(g);
        auto n = ws.open_self();
        auto sessions = load_sessions(*n.store);
        for (const auto& e : ws.ledger().read_all()) {
          if (e.kind() != EntryKind::Complaint && e.kind() != EntryKind::Announcement) continue;
          const auto key = kAnsweredPrefix + std::to_string(e.seq);
          if (n.store->get(key)) continue;
          std::optional<std::uint64_t> seq;
          if (e.kind() == EntryKind::Complaint) {
            seq = respond_to_complaint(*n.node, sessions, e);
          } else {
            seq = respond_to_announcement(*n.node, sessions, e);
          }
          if (!seq) continue;
          n.store->put(key, std::to_string(*seq));
          std::cout << "response " << *seq << " to " << e.seq << '\n';
        }
        for (const auto& s : sessions) save_session(*n.store, s);
      });

  auto* resolve = transfer->add_subcommand("resolve", "Settle a complaint or announcement");
  resolve->add_option("--session", o->session, "Session id")->required();
  resolve->callback([&g, o] {
    auto ws = workspace(g);
    auto n = ws.open_self();
    auto s = load_session(*n.store, o->session);
    if (s.state == TransferState::ComplaintFiled) {
      if (!poll_complaint(*n.node, s)) {
        for (const auto& r : resolve_expired_complaint(*n.node, s)) {
          std::cout << "action " << to_hex(record_id(r)) << '\n';
        }
      }
    } else if (s.state == TransferState::AnnouncementFiled) {
      const auto action = resolve_announcement(*n.node, s);
      std::cout << "action " << to_hex(action.id) << '\n';
    } else {
      throw Error(ErrorCode::InvalidState, "session " + s.id() + " has nothing to resolve in state " +
                                               std::string(transfer_state_name(s.state)));
    }
    save_session(*n.store, s);
    std::cout << "state " << transfer_state_name(s.state) << '\n';
  });

  auto* announce = transfer->add_subcommand("announce", "Report goods that arrived without an export");
  announce->add_option("--from", o->from, "Supplying company (name or id)")->required();
  announce->add_option("--session", o->session, "Session id")->required();
  announce->add_option("--secret", o->secret, "Shared secret (hex)")->required();
  announce->add_option("--records", o->records, "Product records that came with the goods")
      ->required();
  announce->callback([&g, o] {
    auto ws = workspace(g);
    auto n = ws.open_self();
    auto records = records_from_file(o->records);
    std::vector<ProductId> ids;
    for (const auto& r : records) ids.push_back(r.id);
    auto s = open_session(ws.resolve(o->from), n.node->id(), hash_from_hex(o->secret),
                          from_hex<16>(o->session), ids, ws.timing())
                 .importer;
    s.received_records = std::move(records);
    const auto seq = announce_missing_export(*n.node, s);
    save_session(*n.store, s);
    std::cout << "announcement " << seq << '\n';
  });

  auto* status = transfer->add_subcommand("status", "Print transfer sessions");
  status->add_option("--session", o->session, "Session id (default all)");
  status->callback([&g, o] {
    auto ws = workspace(g);
    auto n = ws.open_self();
    if (!o->session.empty()) {
      std::cout << session_to_json(load_session(*n.store, o->session)).dump(2) << '\n';
      return;
    }
    for (const auto& s : load_sessions(*n.store)) {
      std::cout << s.id() << ' ' << (s.role == TransferRole::Exporter ? "exporter" : "importer")
                << ' ' << transfer_state_name(s.state) << ' ' << ws.name_of(s.counterparty()) << '\n';
    }
  });
}

void add_trace_commands(CLI::App& app, Globals& g, Options& opts) {
  auto* o = &opts.trace;

  auto run = [&g, o](bool track) {
    auto ws = workspace(g);
    std::vector<OpenNode> nodes;
    Channel channel;
    for (const auto& [_, id] : ws.registry()) {
      nodes.push_back(ws.open(id));
      channel.attach(id, make_trace_handler(*nodes.back().node));
    }
    const auto product = hash_from_hex(o->product);
    const auto start = ws.resolve(o->from);
    Tracer tracer(channel, ws.ledger(), {o->requester, false});
    TraceResult result;
    if (track) {
      result = tracer.track(product, start);
    } else {
      const auto dir = parse_direction(o->direction);
      if (!dir) throw Error(ErrorCode::InvalidArgument, "unknown direction " + o->direction);
      result = tracer.trace(product, start, *dir);
    }
    fs::path out = o->out;
    if (out.empty()) {
      out = ws.config().storage_path / "traces" /
            (o->product + (track ? "-track" : "-" + o->direction) + ".json");
    }
    write_file(out, trace_result_to_json(result).dump(2) + "\n");
    std::cout << trace_report(result);
    std::cout << "dag " << out.string() << '\n';
  };

  auto* trace = app.add_subcommand("trace", "Trace a product's provenance across companies");
  trace->add_option("product", o->product, "Product id")->required();
  trace->add_option("--from", o->from, "Company holding the product (name or id)")->required();
  trace->add_option("--direction", o->direction, "backward or forward");
  trace->add_option("--out", o->out, "JSON DAG file");
  trace->add_option("--requester", o->requester, "Requester identity shown to responders");
  trace->callback([run] { run(false); });

  auto* track = app.add_subcommand("track", "Follow a product forward to its final product");
  track->add_option("product", o->product, "Product id")->required();
  track->add_option("--from", o->from, "Company holding the product (name or id)")->required();
  track->add_option("--out", o->out, "JSON DAG file");
  track->add_option("--requester", o->requester, "Requester identity shown to responders");
  track->callback([run] { run(true); });
}

void add_ledger_commands(CLI::App& app, Globals& g, Options& opts) {
  auto* ledger = app.add_subcommand("ledger", "Inspect the shared ledger");
  ledger->require_subcommand(1);

  ledger->add_subcommand("dump", "Print all entries as JSON lines")->callback([&g] {
    auto ws = workspace(g);
    std::cout << dump_jsonl(ws.ledger());
  });

  ledger->add_subcommand("tick", "Print the current logical tick")->callback([&g] {
    auto ws = workspace(g);
    std::cout << ws.ledger().current_tick() << '\n';
  });

  auto* ticks = &opts.ticks;
  auto* advance = ledger->add_subcommand("advance", "Advance the logical clock");
  advance->add_option("--ticks", *ticks, "Number of ticks")->check(CLI::PositiveNumber);
  advance->callback([&g, ticks] {
    auto ws = workspace(g);
    std::cout << ws.ledger().advance_tick(*ticks) << '\n';
  });

  auto* seq = &opts.seq;
  auto* attribute = ledger->add_subcommand("attribute", "Who is responsible for a dispute");
  attribute->add_option("--seq", *seq, "Complaint or announcement seq")->required();
  attribute->callback([&g, seq] {
    auto ws = workspace(g);
    std::cout << responsible_name(attribute_dispute(ws.ledger(), *seq,
                                                    ws.config().dispute_deadline_ticks))
              << '\n';
  });
}

void add_model_commands(CLI::App& app, Options& opts) {
  auto* model = app.add_subcommand("model", "Closed-form storage and witness cost models");
  model->require_subcommand(1);

  auto* o = &opts.model;

  auto* storage = model->add_subcommand("storage", "Bytes stored per company per year");
  storage->add_option("--arch", o->archs, "permissionless, permissioned or ccchain (repeatable)");
  storage->add_option("-n,--companies", o->companies, "Number of companies (repeatable)")->required();
  storage->add_option("--data-per-company", o->storage.annual_data_per_company, "Bytes per year");
  storage->add_option("--collaborators", o->storage.collaborators_per_chain,
                      "Companies per permissioned chain");
  storage->add_option("--witness-bytes", o->storage.witness_bytes, "Bytes per witness");
  storage->add_option("--epochs-per-year", o->storage.epochs_per_year, "Witnesses per year");
  storage->add_flag("--csv", o->csv, "Emit CSV rows");
  storage->callback([o] {
    if (o->archs.empty()) o->archs.push_back("ccchain");
    std::vector<CsvRow> rows;
    for (const auto& name : o->archs) {
      const auto arch = parse_architecture(name);
      if (!arch) throw Error(ErrorCode::InvalidArgument, "unknown architecture " + name);
      auto p = o->storage;
      p.architecture = *arch;
      for (const auto& pt : storage_curve(p, o->companies)) {
        rows.push_back({"model",
                        "storage." + std::string(architecture_name(*arch)) +
                            ".n=" + format_value(pt.companies),
                        pt.bytes_per_year, "bytes/year"});
      }
    }
    if (o->csv) {
      write_csv(std::cout, rows);
    } else if (rows.size() == 1) {
      std::cout << sci4(rows[0].value) << " bytes/year\n";
    } else {
      for (const auto& r : rows) std::cout << r.metric << ' ' << sci4(r.value) << " bytes/year\n";
    }
  });

  auto* gas = model->add_subcommand("gas", "Cost of publishing witnesses");
  gas->add_option("--gas-per-upload", o->gas.gas_per_upload, "Gas per witness upload");
  gas->add_option("--gwei", o->gas.gas_price_gwei, "Gas price in gwei");
  gas->add_option("--eth-usd", o->gas.eth_usd, "USD per ETH");
  gas->add_option("--uploads-per-year", o->gas.uploads_per_year, "Witnesses per year");
  gas->add_flag("--csv", o->csv, "Emit CSV rows");
  gas->callback([o] {
    const auto c = witness_cost(o->gas);
    if (o->csv) {
      write_csv(std::cout, {{"model", "gas.ethPerUpload", c.eth_per_upload, "ETH"},
                            {"model", "gas.usdPerUpload", c.usd_per_upload, "USD"},
                            {"model", "gas.usdPerYear", c.usd_per_year, "USD"}});
      return;
    }
    std::cout << format_value(c.eth_per_upload) << " ETH per upload\n"
              << format_value(c.usd_per_upload) << " USD per upload\n"
              << format_value(c.usd_per_year) << " USD per year\n";
  });
}

void add_sim_commands(CLI::App& app, Options& opts) {
  auto* sim = app.add_subcommand("sim", "Run scenario files");
  sim->require_subcommand(1);
  auto* scenario_path = &opts.scenario;
  auto* plot = &opts.plot;
  auto* run = sim->add_subcommand("run", "Run a scenario and print CSV");
  run->add_option("scenario", *scenario_path, "Scenario JSON file")->required();
  run->add_option("--plot", *plot, "Write plot-ready JSON series here");
  run->callback([scenario_path, plot] {
    const auto scenario = scenario_from_json(parse_json(read_file(*scenario_path)));
    const auto out = run_scenario(scenario);
    write_csv(std::cout, out.rows);
    if (!plot->empty()) write_file(*plot, out.plot.dump(2) + "\n");
  });

  auto* bench = app.add_subcommand("bench", "Benchmarks on the simulated network");
  bench->require_subcommand(1);

  auto* o = &opts.bench;

  auto* actions = bench->add_subcommand("actions", "Per-action recording throughput");
  actions->add_option("--type", o->types, "Action type (repeatable; default all)");
  actions->add_option("--count", o->count, "Actions per type")->check(CLI::PositiveNumber);
  actions->add_option("--seed", o->seed, "RNG seed");
  actions->add_option("--payload", o->payload, "Bytes per product record");
  actions->callback([o] {
    Scenario s;
    s.name = "bench";
    s.config.rng_seed = o->seed;
    s.config.action_payload_bytes = o->payload;
    s.action_count = o->count;
    if (o->types.empty()) o->types = {"create", "produce", "export", "import", "buy", "sell"};
    for (const auto& t : o->types) {
      const auto type = parse_action_type(t);
      if (!type) throw Error(ErrorCode::InvalidArgument, "unknown action type " + t);
      s.action_types.push_back(*type);
    }
    write_csv(std::cout, run_scenario(s).rows);
  });

  auto* trace = bench->add_subcommand("trace", "Trace cost on binary production graphs");
  trace->add_option("-n,--produce-nodes", o->sizes, "Produce steps (repeatable)")->required();
  trace->add_flag("--track", o->track, "Track forward from a raw material instead");
  trace->add_option("--seed", o->seed, "RNG seed");
  trace->callback([o] {
    Scenario s;
    s.name = "bench";
    s.config.rng_seed = o->seed;
    s.trace_sizes = o->sizes;
    s.trace_full = !o->track;
    s.trace_track = o->track;
    write_csv(std::cout, run_scenario(s).rows);
  });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ccchain: cross-company supply-chain records with public witnesses"};
  app.require_subcommand(1);
  Globals g;
  Options opts;
  app.add_option("--config", g.config_path, "Config file (overrides CCCHAIN_CONFIG)");
  app.add_option("--company", g.company, "Act as this company instead of companyName");

  add_company_commands(app, g, opts);
  add_record_commands(app, g, opts);
  add_witness_commands(app, g);
  add_transfer_commands(app, g, opts);
  add_trace_commands(app, g, opts);
  add_ledger_commands(app, g, opts);
  add_model_commands(app, opts);
  add_sim_commands(app, opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const Error& e) {
    std::cerr << "error[" << error_code_name(e.code()) << "]: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error[INTERNAL]: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
