#pragma once

#include <stdexcept>
#include <string>

namespace cwnet {

enum class ErrorKind {
  FileNotFound,
  UnsupportedFormat,
  IoError,
  ShapeMismatch,
  ImageTooSmall,
  OddDimension,
  OddChannelCount,
  NonPositiveDelta,
  EmptySequence,
  PatchTooLarge,
  DegenerateDenominator,
  WeightMissing,
  BadMagic,
  UnsupportedVersion,
  ChecksumMismatch,
  Truncated,
  InvalidArgument,
};

const char* to_string(ErrorKind kind) noexcept;

/// Every failure raised by the library carries one of the kinds above so
/// callers (and tests) can branch on the category rather than the message.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace cwnet
