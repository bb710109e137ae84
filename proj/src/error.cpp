#include "segkit/error.hpp"

namespace segkit {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::BadMagic: return "BadMagic";
    case ErrorCode::TruncatedData: return "TruncatedData";
    case ErrorCode::UnsupportedMaxval: return "UnsupportedMaxval";
    case ErrorCode::BadHeader: return "BadHeader";
    case ErrorCode::BadRecord: return "BadRecord";
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::BadKnots: return "BadKnots";
    case ErrorCode::DuplicateFeatureInRule: return "DuplicateFeatureInRule";
    case ErrorCode::EmptyRuleBase: return "EmptyRuleBase";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::EvenWindow: return "EvenWindow";
    case ErrorCode::NoTwoPeaks: return "NoTwoPeaks";
    case ErrorCode::EmptyHistogram: return "EmptyHistogram";
    case ErrorCode::TooFewPoints: return "TooFewPoints";
    case ErrorCode::NoSeeds: return "NoSeeds";
    case ErrorCode::EmptySeeds: return "EmptySeeds";
    case ErrorCode::IncompleteLabels: return "IncompleteLabels";
    case ErrorCode::NoExemplars: return "NoExemplars";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::EmptyIndex: return "EmptyIndex";
    case ErrorCode::MissingFeature: return "MissingFeature";
  }
  return "Unknown";
}

bool is_format_error(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::BadMagic:
    case ErrorCode::TruncatedData:
    case ErrorCode::UnsupportedMaxval:
    case ErrorCode::BadHeader:
    case ErrorCode::BadRecord:
    case ErrorCode::SyntaxError:
    case ErrorCode::BadKnots:
    case ErrorCode::DuplicateFeatureInRule:
    case ErrorCode::EmptyRuleBase:
      return true;
    default:
      return false;
  }
}

}  // namespace segkit
