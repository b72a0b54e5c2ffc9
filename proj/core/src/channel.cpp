#include "ccchain/channel.hpp"

#include <mutex>
#include <thread>

#include "ccchain/error.hpp"

namespace ccchain {

void Channel::attach(const CompanyId& company, Handler handler) {
  std::unique_lock lock(mutex_);
  handlers_.insert_or_assign(company, std::move(handler));
}

void Channel::detach(const CompanyId& company) {
  std::unique_lock lock(mutex_);
  handlers_.erase(company);
}

bool Channel::reachable(const CompanyId& company) const {
  std::shared_lock lock(mutex_);
  return handlers_.contains(company);
}

std::string Channel::call(const CompanyId& to, const std::string& request) {
  Handler handler;
  {
    std::shared_lock lock(mutex_);
    auto it = handlers_.find(to);
    if (it == handlers_.end()) throw Error(ErrorCode::NotFound, "company " + to.hex() + " unreachable");
    handler = it->second;
  }
  if (latency_.count() > 0) std::this_thread::sleep_for(latency_);
  ++requests_;
  request_bytes_ += request.size();
  std::string response = handler(request);
  response_bytes_ += response.size();
  return response;
}

ChannelStats Channel::stats() const {
  return {requests_.load(), request_bytes_.load(), response_bytes_.load()};
}

void Channel::reset_stats() {
  requests_ = 0;
  request_bytes_ = 0;
  response_bytes_ = 0;
}

}  // namespace ccchain
