#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace segkit {

enum class ErrorCode {
  // malformed input data
  BadMagic,
  TruncatedData,
  UnsupportedMaxval,
  BadHeader,
  BadRecord,
  SyntaxError,
  BadKnots,
  DuplicateFeatureInRule,
  EmptyRuleBase,
  // algorithm preconditions
  InvalidArgument,
  EvenWindow,
  NoTwoPeaks,
  EmptyHistogram,
  TooFewPoints,
  NoSeeds,
  EmptySeeds,
  IncompleteLabels,
  NoExemplars,
  DimensionMismatch,
  EmptyIndex,
  MissingFeature,
};

std::string_view to_string(ErrorCode code) noexcept;

/// True for codes that describe malformed files or text rather than
/// parameters an algorithm cannot work with.
bool is_format_error(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace segkit
