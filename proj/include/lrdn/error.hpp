#pragma once

#include <stdexcept>
#include <string>

namespace lrdn {

enum class ErrorCode {
  ShapeMismatch,
  IndexOutOfRange,
  SingularLeadingCoefficient,
  NoDecay,
  InvalidModel,
  InvalidConfig,
  GenerationFailed,
  SingularBlock,
  RankDeficientDesign,
  AmbiguousRank,
  DegenerateRestriction,
  InsufficientData,
  ParseError,
};

const char* to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above so the
/// command-line front end can map it onto an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

  /// Numerical failures (as opposed to malformed input or configuration).
  bool numerical() const noexcept {
    switch (code_) {
      case ErrorCode::SingularLeadingCoefficient:
      case ErrorCode::NoDecay:
      case ErrorCode::GenerationFailed:
      case ErrorCode::SingularBlock:
      case ErrorCode::RankDeficientDesign:
      case ErrorCode::AmbiguousRank:
      case ErrorCode::DegenerateRestriction:
      case ErrorCode::InsufficientData:
      case ErrorCode::InvalidModel:
        return true;
      default:
        return false;
    }
  }

 private:
  ErrorCode code_;
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::SingularLeadingCoefficient: return "SingularLeadingCoefficient";
    case ErrorCode::NoDecay: return "NoDecay";
    case ErrorCode::InvalidModel: return "InvalidModel";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::GenerationFailed: return "GenerationFailed";
    case ErrorCode::SingularBlock: return "SingularBlock";
    case ErrorCode::RankDeficientDesign: return "RankDeficientDesign";
    case ErrorCode::AmbiguousRank: return "AmbiguousRank";
    case ErrorCode::DegenerateRestriction: return "DegenerateRestriction";
    case ErrorCode::InsufficientData: return "InsufficientData";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

}  // namespace lrdn
