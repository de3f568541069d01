// Copyright 2026 The odct Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "odct/error.hpp"

namespace odct {

const char* ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid argument";
    case ErrorCode::kDimensionMismatch: return "dimension mismatch";
    case ErrorCode::kInputTooShort: return "input too short";
    case ErrorCode::kSilentInput: return "silent input";
    case ErrorCode::kRateMismatch: return "sample rate mismatch";
    case ErrorCode::kInsufficientData: return "insufficient data";
    case ErrorCode::kIo: return "i/o error";
    case ErrorCode::kBadMagic: return "bad magic";
    case ErrorCode::kVersionMismatch: return "version mismatch";
    case ErrorCode::kTruncated: return "truncated file";
    case ErrorCode::kInconsistentFile: return "inconsistent file";
    case ErrorCode::kUnsupportedFormat: return "unsupported format";
  }
  return "unknown error";
}

}  // namespace odct
