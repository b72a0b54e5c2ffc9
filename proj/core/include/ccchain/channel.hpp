#pragma once

// In-process request/response transport between companies. Counts every
// wire byte; an optional fixed per-request latency supports sensitivity runs.

#include <atomic>
#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <shared_mutex>
#include <string>

#include "ccchain/model.hpp"

namespace ccchain {

using Handler = std::function<std::string(const std::string& request)>;

struct ChannelStats {
  std::uint64_t requests = 0;
  std::uint64_t request_bytes = 0;
  std::uint64_t response_bytes = 0;

  std::uint64_t total_bytes() const { return request_bytes + response_bytes; }
};

class Channel {
 public:
  explicit Channel(std::chrono::microseconds latency = std::chrono::microseconds{0})
      : latency_(latency) {}

  void attach(const CompanyId& company, Handler handler);
  void detach(const CompanyId& company);
  bool reachable(const CompanyId& company) const;

  // Throws Error(NotFound) when nobody is attached for `to`.
  std::string call(const CompanyId& to, const std::string& request);

  ChannelStats stats() const;
  void reset_stats();

 private:
  std::chrono::microseconds latency_;
  mutable std::shared_mutex mutex_;
  std::map<CompanyId, Handler> handlers_;
  std::atomic<std::uint64_t> requests_{0};
  std::atomic<std::uint64_t> request_bytes_{0};
  std::atomic<std::uint64_t> response_bytes_{0};
};

}  // namespace ccchain
