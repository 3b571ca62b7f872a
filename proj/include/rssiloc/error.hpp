#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rssiloc {

enum class ErrorCode {
    DegenerateVector,
    InvalidRadius,
    InvalidLayout,
    NonPositiveDistance,
    NonPositiveStrength,
    EmptyBatch,
    IncompleteReadings,
    SingularGroup,
    MixedSources,
    CollinearBeacons,
    MissingRole,
    DuplicateBeacon,
    UnknownRobot,
    InvalidConfig,
    InvalidScenario,
    IoFailure,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above so that
/// callers (the simulator, the CLI) can record or map it without string parsing.
class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

  private:
    ErrorCode code_;
};

}  // namespace rssiloc
