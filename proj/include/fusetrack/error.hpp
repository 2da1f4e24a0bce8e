#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fusetrack {

enum class ErrorCode {
  kUsage,
  kParse,
  kValidation,
  kIo,
  kGeometry,
  kNumeric,
  kEmptyInput,
  kUninitialized,
  kCannotInitialize,
  kUndefinedMetric,
  kMisalignment,
  kIncompatible,
};

/// Stable machine-readable token, used as the CLI error prefix.
std::string_view error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace fusetrack
