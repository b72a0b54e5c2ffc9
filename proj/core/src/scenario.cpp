#include "ccchain/scenario.hpp"

#include <cstdio>
#include <ostream>
#include <set>

#include "ccchain/error.hpp"

namespace ccchain {

namespace {

const std::set<std::string> kTopLevel{"name",         "seed",    "epochLengthTicks",
                                      "disputeDeadlineTicks", "actionPayloadBytes",
                                      "deterministic", "storage", "gas", "trace", "actions"};

void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw Error(ErrorCode::Config, where + " must be an object");
  for (const auto& [key, _] : j.items()) {
    if (!allowed.contains(key)) throw Error(ErrorCode::Config, "unknown field " + where + "." + key);
  }
}

}  // namespace

Scenario scenario_from_json(const json& j) {
  Scenario s;
  try {
    reject_unknown(j, kTopLevel, "scenario");
    s.name = j.value("name", s.name);
    s.config.rng_seed = j.value("seed", s.config.rng_seed);
    s.config.epoch_length_ticks = j.value("epochLengthTicks", s.config.epoch_length_ticks);
    s.config.dispute_deadline_ticks = j.value("disputeDeadlineTicks", s.config.dispute_deadline_ticks);
    s.config.action_payload_bytes = j.value("actionPayloadBytes", s.config.action_payload_bytes);
    s.config.deterministic = j.value("deterministic", s.config.deterministic);
    if (s.config.epoch_length_ticks == 0) throw Error(ErrorCode::Config, "epochLengthTicks must be positive");

    if (j.contains("storage")) {
      const auto& st = j.at("storage");
      reject_unknown(st, {"architectures", "companies"}, "storage");
      for (const auto& a : st.at("architectures")) {
        auto arch = parse_architecture(a.get<std::string>());
        if (!arch) throw Error(ErrorCode::Config, "unknown architecture " + a.dump());
        s.storage_architectures.push_back(*arch);
      }
      s.storage_companies = st.at("companies").get<std::vector<double>>();
    }
    if (j.contains("gas")) {
      const auto& g = j.at("gas");
      reject_unknown(g, {"gasPerUpload", "gasPriceGwei", "ethUsd", "uploadsPerYear"}, "gas");
      GasModelParams p;
      p.gas_per_upload = g.value("gasPerUpload", p.gas_per_upload);
      p.gas_price_gwei = g.value("gasPriceGwei", p.gas_price_gwei);
      p.eth_usd = g.value("ethUsd", p.eth_usd);
      p.uploads_per_year = g.value("uploadsPerYear", p.uploads_per_year);
      s.gas = p;
    }
    if (j.contains("trace")) {
      const auto& t = j.at("trace");
      reject_unknown(t, {"produceNodeCounts", "modes"}, "trace");
      s.trace_sizes = t.at("produceNodeCounts").get<std::vector<std::uint64_t>>();
      if (t.contains("modes")) {
        s.trace_full = s.trace_track = false;
        for (const auto& m : t.at("modes")) {
          const auto mode = m.get<std::string>();
          if (mode == "trace") {
            s.trace_full = true;
          } else if (mode == "track") {
            s.trace_track = true;
          } else {
            throw Error(ErrorCode::Config, "unknown trace mode " + mode);
          }
        }
      }
    }
    if (j.contains("actions")) {
      const auto& a = j.at("actions");
      reject_unknown(a, {"types", "count"}, "actions");
      for (const auto& t : a.at("types")) {
        auto type = parse_action_type(t.get<std::string>());
        if (!type) throw Error(ErrorCode::Config, "unknown action type " + t.dump());
        s.action_types.push_back(*type);
      }
      s.action_count = a.value("count", s.action_count);
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Config, std::string("scenario: ") + e.what());
  }
  return s;
}

ScenarioOutput run_scenario(const Scenario& s) {
  ScenarioOutput out;
  out.plot = json::object();
  auto row = [&](std::string metric, double value, std::string unit) {
    out.rows.push_back({s.name, std::move(metric), value, std::move(unit)});
  };

  if (!s.storage_architectures.empty()) {
    json series = json::object();
    for (auto arch : s.storage_architectures) {
      StorageModelParams p;
      p.architecture = arch;
      json ys = json::array();
      for (const auto& pt : storage_curve(p, s.storage_companies)) {
        row("storage." + std::string(architecture_name(arch)) + ".n=" + format_value(pt.companies),
            pt.bytes_per_year, "bytes/year");
        ys.push_back(pt.bytes_per_year);
      }
      series[std::string(architecture_name(arch))] = ys;
    }
    out.plot["storage"] = {{"xLabel", "companies"},
                           {"yLabel", "bytes per company per year"},
                           {"x", s.storage_companies},
                           {"series", series}};
  }

  if (s.gas) {
    const auto c = witness_cost(*s.gas);
    row("gas.ethPerUpload", c.eth_per_upload, "ETH");
    row("gas.usdPerUpload", c.usd_per_upload, "USD");
    row("gas.usdPerYear", c.usd_per_year, "USD");
  }

  if (!s.trace_sizes.empty()) {
    json series = json::object();
    auto add = [&](const std::string& key, double v) {
      if (!series.contains(key)) series[key] = json::array();
      series[key].push_back(v);
    };
    for (auto n : s.trace_sizes) {
      auto graph = build_binary_graph(n, s.config);
      const auto tag = ".n=" + std::to_string(n);
      for (bool track : {false, true}) {
        if ((track && !s.trace_track) || (!track && !s.trace_full)) continue;
        const auto b = bench_trace(graph, track);
        const std::string mode = track ? "track" : "trace";
        row(mode + tag + ".elapsed", b.elapsed_ms, "ms");
        row(mode + tag + ".bytes", static_cast<double>(b.bytes), "bytes");
        row(mode + tag + ".requests", static_cast<double>(b.requests), "count");
        row(mode + tag + ".witnessFetches", static_cast<double>(b.witness_fetches), "count");
        add(mode + "Ms", b.elapsed_ms);
        add(mode + "Bytes", static_cast<double>(b.bytes));
        add(mode + "Requests", static_cast<double>(b.requests));
      }
    }
    out.plot["trace"] = {{"xLabel", "produce steps"},
                         {"x", s.trace_sizes},
                         {"series", series}};
  }

  for (auto type : s.action_types) {
    const auto b = bench_actions(type, s.action_count, s.config);
    row("actions." + std::string(action_type_name(type)) + ".rate", b.per_second, "actions/s");
  }
  return out;
}

std::string format_value(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

void write_csv(std::ostream& out, const std::vector<CsvRow>& rows) {
  out << "scenario,metric,value,unit\n";
  for (const auto& r : rows) {
    out << r.scenario << ',' << r.metric << ',' << format_value(r.value) << ',' << r.unit << '\n';
  }
}

}  // namespace ccchain
