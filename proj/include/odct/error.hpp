// Copyright 2026 The odct Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef ODCT_ERROR_HPP_
#define ODCT_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace odct {

// Values mirror the ODCT_E* codes of the C interface.
enum class ErrorCode : int {
  kInvalidArgument = 1,
  kDimensionMismatch = 2,
  kInputTooShort = 3,
  kSilentInput = 4,
  kRateMismatch = 5,
  kInsufficientData = 6,
  kIo = 7,
  kBadMagic = 8,
  kVersionMismatch = 9,
  kTruncated = 10,
  kInconsistentFile = 11,
  kUnsupportedFormat = 12,
};

const char* ErrorCodeName(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void Fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace odct

#endif  // ODCT_ERROR_HPP_
