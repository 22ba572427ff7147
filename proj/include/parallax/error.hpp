#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace parallax {

enum class ErrorCode {
  NonpositiveDepth,
  BehindCamera,
  EmptySelection,
  AllLandmarksInvalid,
  MissingLandmarks,
  DegenerateCloud,
  DimensionMismatch,
  UnknownParam,
  DecodeError,
  EncodeError,
  IoError,
  FormatError,
  DepthServiceError,
  SegmentServiceError,
  LandmarkServiceError,
  ProgramServiceError,
  FixtureMissing,
  NotFound,
  InvalidArgument,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Exception carrying a machine-readable code; everything the engine throws
/// on a contract violation derives from this.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace parallax
