#include "gridseer/time.hpp"

#include <cstdio>
#include <ctime>

#include "gridseer/errors.hpp"

namespace gridseer {

Instant parse_iso8601(const std::string& s) {
    int y, mo, d, h, mi, sec;
    char z;
    if (std::sscanf(s.c_str(), "%4d-%2d-%2dT%2d:%2d:%2d%c", &y, &mo, &d, &h, &mi, &sec, &z) != 7 ||
        z != 'Z') {
        throw BadTimestamp("'" + s + "' is not YYYY-MM-DDTHH:MM:SSZ");
    }
    if (mo < 1 || mo > 12 || d < 1 || d > 31 || h > 23 || mi > 59 || sec > 60 || h < 0 ||
        mi < 0 || sec < 0) {
        throw BadTimestamp("'" + s + "' has out-of-range fields");
    }
    std::tm tm{};
    tm.tm_year = y - 1900;
    tm.tm_mon = mo - 1;
    tm.tm_mday = d;
    tm.tm_hour = h;
    tm.tm_min = mi;
    tm.tm_sec = sec;
    time_t t = timegm(&tm);
    if (t == static_cast<time_t>(-1)) throw BadTimestamp("'" + s + "' is not representable");
    return static_cast<Instant>(t);
}

std::string format_iso8601(Instant t) {
    time_t tt = static_cast<time_t>(t);
    std::tm tm{};
    gmtime_r(&tt, &tm);
    char buf[80];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02dZ", tm.tm_year + 1900,
                  tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec);
    return buf;
}

namespace {
Instant floor_div(Instant a, Instant b) {
    Instant q = a / b;
    if (a % b != 0 && ((a < 0) != (b < 0))) --q;
    return q;
}
}  // namespace

Instant day_start(Instant t) { return floor_div(t, kSecondsPerDay) * kSecondsPerDay; }

Instant week_start(Instant t) {
    // Epoch (1970-01-01) is a Thursday; shift so weeks begin on Monday.
    Instant days = floor_div(t, kSecondsPerDay);
    Instant dow = ((days + 3) % 7 + 7) % 7;  // Monday = 0
    return (days - dow) * kSecondsPerDay;
}

Instant month_start(Instant t) {
    time_t tt = static_cast<time_t>(t);
    std::tm tm{};
    gmtime_r(&tt, &tm);
    tm.tm_mday = 1;
    tm.tm_hour = tm.tm_min = tm.tm_sec = 0;
    return static_cast<Instant>(timegm(&tm));
}

Instant month_end(Instant t) {
    time_t tt = static_cast<time_t>(t);
    std::tm tm{};
    gmtime_r(&tt, &tm);
    tm.tm_mday = 1;
    tm.tm_hour = tm.tm_min = tm.tm_sec = 0;
    tm.tm_mon += 1;
    return static_cast<Instant>(timegm(&tm));
}

}  // namespace gridseer
