#include "ccchain/store.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

#include "ccchain/error.hpp"

namespace ccchain {

namespace {

std::vector<std::pair<std::string, std::string>> scan_map(
    const std::map<std::string, std::string>& data, std::string_view prefix) {
  std::vector<std::pair<std::string, std::string>> out;
  for (auto it = data.lower_bound(std::string(prefix));
       it != data.end() && std::string_view(it->first).starts_with(prefix); ++it) {
    out.emplace_back(it->first, it->second);
  }
  return out;
}

}  // namespace

void MemoryStore::put(const std::string& key, const std::string& value) {
  std::lock_guard lock(mutex_);
  data_[key] = value;
}

std::optional<std::string> MemoryStore::get(const std::string& key) const {
  std::lock_guard lock(mutex_);
  auto it = data_.find(key);
  if (it == data_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::pair<std::string, std::string>> MemoryStore::scan(std::string_view prefix) const {
  std::lock_guard lock(mutex_);
  return scan_map(data_, prefix);
}

FileStore::FileStore(std::filesystem::path path) : path_(std::move(path)) {
  if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path());
  std::ifstream in(path_);
  std::string line;
  std::size_t lineno = 0;
  while (in && std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      auto j = nlohmann::json::parse(line);
      data_[j.at("k").get<std::string>()] = j.at("v").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::Storage, path_.string() + ":" + std::to_string(lineno) +
                                          ": corrupt journal line: " + e.what());
    }
  }
}

void FileStore::put(const std::string& key, const std::string& value) {
  std::lock_guard lock(mutex_);
  std::ofstream out(path_, std::ios::app);
  out << nlohmann::json{{"k", key}, {"v", value}}.dump() << '\n';
  out.flush();
  if (!out) throw Error(ErrorCode::Storage, "cannot write " + path_.string());
  data_[key] = value;
}

std::optional<std::string> FileStore::get(const std::string& key) const {
  std::lock_guard lock(mutex_);
  auto it = data_.find(key);
  if (it == data_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::pair<std::string, std::string>> FileStore::scan(std::string_view prefix) const {
  std::lock_guard lock(mutex_);
  return scan_map(data_, prefix);
}

}  // namespace ccchain
