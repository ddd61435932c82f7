#include "cwnet/error.hpp"

namespace cwnet {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::FileNotFound: return "FileNotFound";
    case ErrorKind::UnsupportedFormat: return "UnsupportedFormat";
    case ErrorKind::IoError: return "IoError";
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::ImageTooSmall: return "ImageTooSmall";
    case ErrorKind::OddDimension: return "OddDimension";
    case ErrorKind::OddChannelCount: return "OddChannelCount";
    case ErrorKind::NonPositiveDelta: return "NonPositiveDelta";
    case ErrorKind::EmptySequence: return "EmptySequence";
    case ErrorKind::PatchTooLarge: return "PatchTooLarge";
    case ErrorKind::DegenerateDenominator: return "DegenerateDenominator";
    case ErrorKind::WeightMissing: return "WeightMissing";
    case ErrorKind::BadMagic: return "BadMagic";
    case ErrorKind::UnsupportedVersion: return "UnsupportedVersion";
    case ErrorKind::ChecksumMismatch: return "ChecksumMismatch";
    case ErrorKind::Truncated: return "Truncated";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace cwnet
