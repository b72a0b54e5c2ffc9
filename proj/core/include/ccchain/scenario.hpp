#pragma once

// Scenario files: a JSON description of model evaluations and benchmark
// runs, executed into CSV rows (scenario, metric, value, unit) and a
// plot-ready JSON series.
//
// {
//   "name": "...", "seed": 1, "epochLengthTicks": 1, "disputeDeadlineTicks": 2,
//   "actionPayloadBytes": 200, "deterministic": true,
//   "storage": {"architectures": ["ccchain", ...], "companies": [10, 100]},
//   "gas": {"gasPerUpload": 44000, "gasPriceGwei": 25, "ethUsd": 2891, "uploadsPerYear": 365},
//   "trace": {"produceNodeCounts": [1, 3, 7], "modes": ["trace", "track"]},
//   "actions": {"types": ["create", "produce"], "count": 1000}
// }
//
// Every section is optional.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ccchain/codec.hpp"
#include "ccchain/simnet.hpp"
#include "ccchain/storage_model.hpp"

namespace ccchain {

struct Scenario {
  std::string name = "scenario";
  SimConfig config;

  std::vector<Architecture> storage_architectures;
  std::vector<double> storage_companies;

  std::optional<GasModelParams> gas;

  std::vector<std::uint64_t> trace_sizes;
  bool trace_full = true;
  bool trace_track = false;

  std::vector<ActionType> action_types;
  std::size_t action_count = 1000;
};

// Throws Error(Config) on unknown or ill-typed fields.
Scenario scenario_from_json(const json& j);

struct CsvRow {
  std::string scenario;
  std::string metric;
  double value = 0;
  std::string unit;
};

struct ScenarioOutput {
  std::vector<CsvRow> rows;
  json plot;
};

ScenarioOutput run_scenario(const Scenario& scenario);

// Header line "scenario,metric,value,unit" followed by one line per row.
void write_csv(std::ostream& out, const std::vector<CsvRow>& rows);
std::string format_value(double v);

}  // namespace ccchain
