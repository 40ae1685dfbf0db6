#include "rsnn/error.hpp"

namespace rsnn {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::bad_magic: return "bad_magic";
    case ErrorCode::version_mismatch: return "version_mismatch";
    case ErrorCode::truncated: return "truncated";
    case ErrorCode::dim_mismatch: return "dim_mismatch";
    case ErrorCode::capacity: return "capacity";
    case ErrorCode::unsupported_shape: return "unsupported_shape";
    case ErrorCode::calibration: return "calibration";
    case ErrorCode::empty_trace: return "empty_trace";
    case ErrorCode::missing_trace: return "missing_trace";
    case ErrorCode::io: return "io";
    case ErrorCode::parse: return "parse";
  }
  return "unknown";
}

}  // namespace rsnn
