#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <fstream>

#include "ccchain/error.hpp"
#include "ccchain/public_ledger.hpp"

namespace ccchain {

namespace {

class FileLock {
 public:
  FileLock(const std::filesystem::path& path, bool exclusive) {
    fd_ = ::open(path.c_str(), O_RDWR | O_CREAT, 0644);
    if (fd_ < 0) {
      throw Error(ErrorCode::LedgerUnavailable, "cannot open ledger lock " + path.string());
    }
    if (::flock(fd_, exclusive ? LOCK_EX : LOCK_SH) != 0) {
      ::close(fd_);
      throw Error(ErrorCode::LedgerUnavailable, "cannot lock " + path.string());
    }
  }
  ~FileLock() {
    ::flock(fd_, LOCK_UN);
    ::close(fd_);
  }
  FileLock(const FileLock&) = delete;
  FileLock& operator=(const FileLock&) = delete;

 private:
  int fd_ = -1;
};

std::uint64_t read_tick(const std::filesystem::path& path) {
  std::ifstream in(path);
  std::uint64_t tick = 0;
  if (in) in >> tick;
  return tick;
}

void write_tick(const std::filesystem::path& path, std::uint64_t tick) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw Error(ErrorCode::LedgerUnavailable, "cannot write " + tmp.string());
    out << tick << '\n';
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace

FileLedger::FileLedger(std::filesystem::path path) : path_(std::move(path)) {
  std::error_code ec;
  if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path(), ec);
  if (ec) throw Error(ErrorCode::LedgerUnavailable, "cannot create " + path_.parent_path().string());
  FileLock lock(lock_path(), true);
  if (!std::filesystem::exists(path_)) std::ofstream(path_).flush();
}

std::filesystem::path FileLedger::tick_path() const {
  auto p = path_;
  p += ".tick";
  return p;
}

std::filesystem::path FileLedger::lock_path() const {
  auto p = path_;
  p += ".lock";
  return p;
}

PublicLedger FileLedger::load_locked() const {
  std::ifstream in(path_);
  if (!in) throw Error(ErrorCode::LedgerUnavailable, "cannot read ledger " + path_.string());
  PublicLedger ledger = PublicLedger::load_jsonl(in);
  const auto tick = read_tick(tick_path());
  if (tick > ledger.current_tick()) ledger.advance_tick(tick - ledger.current_tick());
  return ledger;
}

std::uint64_t FileLedger::append(Payload payload) {
  FileLock lock(lock_path(), true);
  PublicLedger ledger = load_locked();
  const std::uint64_t seq = ledger.append(std::move(payload));
  std::ofstream out(path_, std::ios::app);
  if (!out) throw Error(ErrorCode::LedgerUnavailable, "cannot append to " + path_.string());
  out << entry_to_json_line(*ledger.entry(seq)) << '\n';
  out.flush();
  if (!out) throw Error(ErrorCode::LedgerUnavailable, "write to " + path_.string() + " failed");
  return seq;
}

std::vector<LedgerEntry> FileLedger::read_since(std::optional<std::uint64_t> after) const {
  FileLock lock(lock_path(), false);
  return load_locked().read_since(after);
}

std::optional<LedgerEntry> FileLedger::entry(std::uint64_t seq) const {
  FileLock lock(lock_path(), false);
  return load_locked().entry(seq);
}

std::optional<EpochWitness> FileLedger::get_witness(const CompanyId& company,
                                                    std::uint64_t epoch_index) const {
  FileLock lock(lock_path(), false);
  return load_locked().get_witness(company, epoch_index);
}

std::uint64_t FileLedger::current_tick() const {
  FileLock lock(lock_path(), false);
  return load_locked().current_tick();
}

std::uint64_t FileLedger::advance_tick(std::uint64_t n) {
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "advance_tick requires n >= 1");
  FileLock lock(lock_path(), true);
  const auto tick = load_locked().current_tick() + n;
  write_tick(tick_path(), tick);
  return tick;
}

}  // namespace ccchain
