#pragma once

#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace ccchain {

// Minimal ordered key-value persistence used by company nodes.
class Store {
 public:
  virtual ~Store() = default;

  virtual void put(const std::string& key, const std::string& value) = 0;
  virtual std::optional<std::string> get(const std::string& key) const = 0;
  // All pairs whose key starts with prefix, in key order.
  virtual std::vector<std::pair<std::string, std::string>> scan(std::string_view prefix) const = 0;
};

class MemoryStore final : public Store {
 public:
  void put(const std::string& key, const std::string& value) override;
  std::optional<std::string> get(const std::string& key) const override;
  std::vector<std::pair<std::string, std::string>> scan(std::string_view prefix) const override;

 private:
  mutable std::mutex mutex_;
  std::map<std::string, std::string> data_;
};

// On-disk map: an append-only JSON-lines journal replayed into memory at
// open. Later puts of the same key win. Each put is flushed before returning.
class FileStore final : public Store {
 public:
  // Throws Error(Storage) if the journal cannot be opened or parsed.
  explicit FileStore(std::filesystem::path path);

  void put(const std::string& key, const std::string& value) override;
  std::optional<std::string> get(const std::string& key) const override;
  std::vector<std::pair<std::string, std::string>> scan(std::string_view prefix) const override;

 private:
  std::filesystem::path path_;
  mutable std::mutex mutex_;
  std::map<std::string, std::string> data_;
};

}  // namespace ccchain
