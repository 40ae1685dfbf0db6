#pragma once

#include <stdexcept>
#include <string>

namespace rsnn {

enum class ErrorCode {
  invalid_argument,
  bad_magic,
  version_mismatch,
  truncated,
  dim_mismatch,
  capacity,
  unsupported_shape,
  calibration,
  empty_trace,
  missing_trace,
  io,
  parse,
};

const char* to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace rsnn
