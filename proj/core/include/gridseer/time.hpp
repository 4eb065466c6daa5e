#pragma once

#include <cstdint>
#include <string>

namespace gridseer {

// Unix seconds, UTC. All timestamps in the project use second precision.
using Instant = std::int64_t;

constexpr Instant kSecondsPerDay = 86400;
constexpr Instant kSecondsPerWeek = 7 * kSecondsPerDay;

// Parses "2019-01-01T00:00:00Z". Throws BadTimestamp on anything else.
Instant parse_iso8601(const std::string& s);

// Formats as "YYYY-MM-DDTHH:MM:SSZ".
std::string format_iso8601(Instant t);

// Bucket starts for calendar aggregation (UTC). Weeks start on Monday.
Instant day_start(Instant t);
Instant week_start(Instant t);
Instant month_start(Instant t);
// End of the bucket containing t (start of the next bucket).
Instant month_end(Instant t);

}  // namespace gridseer
