#include "hvacrl/error.hpp"

namespace hvacrl {

std::string_view errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::TooFewHeaderLines: return "TooFewHeaderLines";
    case Errc::RowFieldCountBelow22: return "RowFieldCountBelow22";
    case Errc::NonNumericField: return "NonNumericField";
    case Errc::TimeOutOfRange: return "TimeOutOfRange";
    case Errc::DegenerateSplit: return "DegenerateSplit";
    case Errc::HoursTooSmall: return "HoursTooSmall";
    case Errc::ZoneCountMismatch: return "ZoneCountMismatch";
    case Errc::NonPositiveDt: return "NonPositiveDt";
    case Errc::EmptyWeather: return "EmptyWeather";
    case Errc::ActionOutOfRange: return "ActionOutOfRange";
    case Errc::EpisodeFinished: return "EpisodeFinished";
    case Errc::EnvGroupMissing: return "EnvGroupMissing";
    case Errc::SpecMismatch: return "SpecMismatch";
    case Errc::MemoryCapExceeded: return "MemoryCapExceeded";
    case Errc::StateSpaceTooLarge: return "StateSpaceTooLarge";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::BufferTooSmall: return "BufferTooSmall";
    case Errc::InvalidConfig: return "InvalidConfig";
    case Errc::IoFailure: return "IoFailure";
  }
  return "Unknown";
}

}  // namespace hvacrl
