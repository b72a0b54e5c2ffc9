#include "ccchain/error.hpp"

namespace ccchain {

std::string_view error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::Encoding: return "ENCODING";
    case ErrorCode::InvalidArgument: return "INVALID_ARGUMENT";
    case ErrorCode::UnknownProduct: return "UNKNOWN_PRODUCT";
    case ErrorCode::DoubleConsumption: return "DOUBLE_CONSUMPTION";
    case ErrorCode::NotYetWitnessed: return "NOT_YET_WITNESSED";
    case ErrorCode::EmptyEpoch: return "EMPTY_EPOCH";
    case ErrorCode::IndexOutOfRange: return "INDEX_OUT_OF_RANGE";
    case ErrorCode::DuplicateWitness: return "DUPLICATE_WITNESS";
    case ErrorCode::LedgerUnavailable: return "LEDGER_UNAVAILABLE";
    case ErrorCode::InvalidExportClaim: return "INVALID_EXPORT_CLAIM";
    case ErrorCode::RecordIdMismatch: return "RECORD_ID_MISMATCH";
    case ErrorCode::InvalidImportConfirmation: return "INVALID_IMPORT_CONFIRMATION";
    case ErrorCode::TooEarly: return "TOO_EARLY";
    case ErrorCode::ComplaintRebutted: return "COMPLAINT_REBUTTED";
    case ErrorCode::InvalidState: return "INVALID_STATE";
    case ErrorCode::NotFound: return "NOT_FOUND";
    case ErrorCode::Config: return "CONFIG";
    case ErrorCode::Storage: return "STORAGE";
    case ErrorCode::Parse: return "PARSE";
  }
  return "UNKNOWN";
}

}  // namespace ccchain
