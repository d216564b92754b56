#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace packetvision {

enum class ErrorCode {
  // pcap
  BadMagic,
  Truncated,
  UnsupportedVersion,
  TruncatedRecord,
  RecordTooLarge,
  EmptyPacket,
  // dataset
  InvalidConfig,
  DuplicateClassDirectoryCollision,
  KTooSmall,
  KTooLarge,
  FoldOutOfRange,
  MalformedCsv,
  // evalstats
  UnknownLabel,
  EmptyInput,
  InsufficientSamples,
  InvalidArgument,
  // filesystem
  IoError,
};

std::string_view to_string(ErrorCode code);

/// All library failures are reported through this type; `code()` drives
/// the CLI exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace packetvision
