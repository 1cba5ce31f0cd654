#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace lgae {

enum class ErrorCode {
  InvalidArgument,
  DimensionMismatch,
  NonPositiveDefinite,
  NonConvergent,
  EmptyBatch,
  StaleCache,
  BadMagic,
  TruncatedFile,
  CountMismatch,
  UnsupportedKind,
  EmptyClass,
  IoError,
  NumericFailure,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the codes above so
/// callers (the CLI in particular) can map it onto an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace lgae
