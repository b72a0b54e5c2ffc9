#include "ccchain/storage_model.hpp"

#include <string>

#include "ccchain/error.hpp"

namespace ccchain {

std::string_view architecture_name(Architecture a) {
  switch (a) {
    case Architecture::Permissionless: return "permissionless";
    case Architecture::Permissioned: return "permissioned";
    case Architecture::CCChain: return "ccchain";
  }
  return "?";
}

std::optional<Architecture> parse_architecture(std::string_view name) {
  for (auto a : {Architecture::Permissionless, Architecture::Permissioned, Architecture::CCChain}) {
    if (name == architecture_name(a)) return a;
  }
  return std::nullopt;
}

double storage_per_company(const StorageModelParams& p) {
  auto positive = [](double v, const char* what) {
    if (!(v > 0)) throw Error(ErrorCode::InvalidArgument, std::string(what) + " must be positive");
  };
  positive(p.companies, "company count");
  positive(p.annual_data_per_company, "annual data per company");
  positive(p.collaborators_per_chain, "collaborators per chain");
  positive(p.witness_bytes, "witness size");
  positive(p.epochs_per_year, "epochs per year");
  const double d = p.annual_data_per_company;
  switch (p.architecture) {
    case Architecture::Permissionless:
      return p.companies * d;
    case Architecture::Permissioned:
      return p.collaborators_per_chain * d;
    case Architecture::CCChain:
      return d + p.companies * p.witness_bytes * p.epochs_per_year;
  }
  return 0;
}

std::vector<StoragePoint> storage_curve(StorageModelParams params,
                                        const std::vector<double>& company_counts) {
  std::vector<StoragePoint> out;
  out.reserve(company_counts.size());
  for (double n : company_counts) {
    params.companies = n;
    out.push_back({n, storage_per_company(params)});
  }
  return out;
}

GasCost witness_cost(const GasModelParams& p) {
  if (!(p.gas_per_upload > 0) || !(p.gas_price_gwei > 0) || !(p.eth_usd > 0) ||
      !(p.uploads_per_year > 0)) {
    throw Error(ErrorCode::InvalidArgument, "gas model inputs must be positive");
  }
  const double eth = p.gas_per_upload * p.gas_price_gwei * 1e-9;
  const double usd = eth * p.eth_usd;
  return {eth, usd, usd * p.uploads_per_year};
}

}  // namespace ccchain
