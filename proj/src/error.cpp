#include "packetvision/error.hpp"

namespace packetvision {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::BadMagic: return "BadMagic";
    case ErrorCode::Truncated: return "Truncated";
    case ErrorCode::UnsupportedVersion: return "UnsupportedVersion";
    case ErrorCode::TruncatedRecord: return "TruncatedRecord";
    case ErrorCode::RecordTooLarge: return "RecordTooLarge";
    case ErrorCode::EmptyPacket: return "EmptyPacket";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::DuplicateClassDirectoryCollision:
      return "DuplicateClassDirectoryCollision";
    case ErrorCode::KTooSmall: return "KTooSmall";
    case ErrorCode::KTooLarge: return "KTooLarge";
    case ErrorCode::FoldOutOfRange: return "FoldOutOfRange";
    case ErrorCode::MalformedCsv: return "MalformedCsv";
    case ErrorCode::UnknownLabel: return "UnknownLabel";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::InsufficientSamples: return "InsufficientSamples";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message),
      code_(code) {}

}  // namespace packetvision
