#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hvacrl {

enum class Errc {
  // weather
  TooFewHeaderLines,
  RowFieldCountBelow22,
  NonNumericField,
  TimeOutOfRange,
  DegenerateSplit,
  HoursTooSmall,
  // thermal
  ZoneCountMismatch,
  NonPositiveDt,
  // env
  EmptyWeather,
  ActionOutOfRange,
  EpisodeFinished,
  EnvGroupMissing,
  // tabular
  SpecMismatch,
  MemoryCapExceeded,
  StateSpaceTooLarge,
  // dqn
  DimensionMismatch,
  BufferTooSmall,
  // harness / cli
  InvalidConfig,
  IoFailure,
};

std::string_view errc_name(Errc code) noexcept;

/// Single exception type for the library. `code()` identifies the failure;
/// the message carries row/column or value context where there is any.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace hvacrl
