#include "lgae/error.hpp"

namespace lgae {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NonPositiveDefinite: return "NonPositiveDefinite";
    case ErrorCode::NonConvergent: return "NonConvergent";
    case ErrorCode::EmptyBatch: return "EmptyBatch";
    case ErrorCode::StaleCache: return "StaleCache";
    case ErrorCode::BadMagic: return "BadMagic";
    case ErrorCode::TruncatedFile: return "TruncatedFile";
    case ErrorCode::CountMismatch: return "CountMismatch";
    case ErrorCode::UnsupportedKind: return "UnsupportedKind";
    case ErrorCode::EmptyClass: return "EmptyClass";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::NumericFailure: return "NumericFailure";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

}  // namespace lgae
