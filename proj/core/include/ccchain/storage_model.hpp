#pragma once

// Closed-form storage and witness-cost models.

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace ccchain {

enum class Architecture { Permissionless, Permissioned, CCChain };

std::string_view architecture_name(Architecture a);
std::optional<Architecture> parse_architecture(std::string_view name);

struct StorageModelParams {
  Architecture architecture = Architecture::CCChain;
  double companies = 1;
  double annual_data_per_company = 5.9e9;  // bytes
  double collaborators_per_chain = 100;
  double witness_bytes = 32;
  double epochs_per_year = 365;
};

// Bytes per company per year. Throws Error(InvalidArgument) unless every
// parameter is strictly positive.
double storage_per_company(const StorageModelParams& params);

struct StoragePoint {
  double companies;
  double bytes_per_year;
};

std::vector<StoragePoint> storage_curve(StorageModelParams params,
                                        const std::vector<double>& company_counts);

struct GasModelParams {
  double gas_per_upload = 44000;
  double gas_price_gwei = 25;
  double eth_usd = 2891;
  double uploads_per_year = 365;
};

struct GasCost {
  double eth_per_upload;
  double usd_per_upload;
  double usd_per_year;
};

GasCost witness_cost(const GasModelParams& params);

}  // namespace ccchain
