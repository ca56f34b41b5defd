#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace seisvm {

/// UTC instant as integer nanoseconds since the Unix epoch.
struct UtcTime {
  std::int64_t ns = 0;

  friend constexpr auto operator<=>(UtcTime, UtcTime) = default;
};

constexpr std::int64_t kNanosPerSecond = 1'000'000'000;

/// Parse an RFC 3339 UTC timestamp, e.g. `2002-12-05T06:55:00Z` or
/// `2002-12-05T06:55:00.008Z`. Offsets other than `Z`/`+00:00` are applied.
UtcTime parse_rfc3339(std::string_view text);

/// Format as RFC 3339 with a `Z` suffix. Fractional seconds are printed only
/// when nonzero, with trailing zeros trimmed.
std::string format_rfc3339(UtcTime t);

/// Add a (possibly fractional) number of seconds, rounded to the nearest ns.
UtcTime add_seconds(UtcTime t, double seconds);

/// Difference `a - b` in seconds.
double seconds_between(UtcTime a, UtcTime b);

}  // namespace seisvm
