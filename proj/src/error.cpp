#include "parallax/error.hpp"

namespace parallax {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NonpositiveDepth: return "NonpositiveDepth";
    case ErrorCode::BehindCamera: return "BehindCamera";
    case ErrorCode::EmptySelection: return "EmptySelection";
    case ErrorCode::AllLandmarksInvalid: return "AllLandmarksInvalid";
    case ErrorCode::MissingLandmarks: return "MissingLandmarks";
    case ErrorCode::DegenerateCloud: return "DegenerateCloud";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::UnknownParam: return "UnknownParam";
    case ErrorCode::DecodeError: return "DecodeError";
    case ErrorCode::EncodeError: return "EncodeError";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::FormatError: return "FormatError";
    case ErrorCode::DepthServiceError: return "DepthServiceError";
    case ErrorCode::SegmentServiceError: return "SegmentServiceError";
    case ErrorCode::LandmarkServiceError: return "LandmarkServiceError";
    case ErrorCode::ProgramServiceError: return "ProgramServiceError";
    case ErrorCode::FixtureMissing: return "FixtureMissing";
    case ErrorCode::NotFound: return "NotFound";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace parallax
