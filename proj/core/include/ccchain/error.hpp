#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ccchain {

// Stable, machine-readable error codes. The string form (error_code_name) is
// part of the CLI contract and must not change once released.
enum class ErrorCode {
  Encoding,
  InvalidArgument,
  UnknownProduct,
  DoubleConsumption,
  NotYetWitnessed,
  EmptyEpoch,
  IndexOutOfRange,
  DuplicateWitness,
  LedgerUnavailable,
  InvalidExportClaim,
  RecordIdMismatch,
  InvalidImportConfirmation,
  TooEarly,
  ComplaintRebutted,
  InvalidState,
  NotFound,
  Config,
  Storage,
  Parse,
};

std::string_view error_code_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

  // Retry-able errors leave local state untouched (e.g. a failed witness
  // publication keeps the epoch buffer intact).
  bool retryable() const noexcept { return code_ == ErrorCode::LedgerUnavailable; }

 private:
  ErrorCode code_;
};

}  // namespace ccchain
