#include "fusetrack/error.hpp"

namespace fusetrack {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kUsage: return "usage";
    case ErrorCode::kParse: return "parse";
    case ErrorCode::kValidation: return "validation";
    case ErrorCode::kIo: return "io";
    case ErrorCode::kGeometry: return "geometry";
    case ErrorCode::kNumeric: return "numeric";
    case ErrorCode::kEmptyInput: return "empty-input";
    case ErrorCode::kUninitialized: return "uninitialized";
    case ErrorCode::kCannotInitialize: return "cannot-initialize";
    case ErrorCode::kUndefinedMetric: return "undefined-metric";
    case ErrorCode::kMisalignment: return "misalignment";
    case ErrorCode::kIncompatible: return "incompatible";
  }
  return "unknown";
}

}  // namespace fusetrack
