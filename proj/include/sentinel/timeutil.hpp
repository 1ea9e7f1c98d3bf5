#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace sentinel {

using Timestamp = std::chrono::sys_seconds;

// Accepts ISO-8601 (`2018-10-10`, `2018-10-10T20:19:24`, optional fraction,
// `Z` or `+hh:mm` offset, space instead of `T`) and the legacy platform
// format `Wed Oct 10 20:19:24 +0000 2018`. Inputs without an offset are UTC.
// Fractional seconds are truncated.
std::optional<Timestamp> parse_timestamp(std::string_view text);

// Canonical form: `YYYY-MM-DDTHH:MM:SSZ`.
std::string format_timestamp(Timestamp t);

// First day of the platform; account records created earlier are invalid.
inline constexpr Timestamp kPlatformEpoch =
    std::chrono::sys_days{std::chrono::year{2006} / std::chrono::March / 21};

inline double minutes_between(Timestamp from, Timestamp to) {
  return static_cast<double>((to - from).count()) / 60.0;
}

inline constexpr double kDaysPerYear = 365.25;

inline double years_between(Timestamp from, Timestamp to) {
  return static_cast<double>((to - from).count()) / 86400.0 / kDaysPerYear;
}

}  // namespace sentinel
