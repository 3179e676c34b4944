#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>

namespace red {

// All times and durations are integer microseconds. Scenario and DAG files
// speak milliseconds (possibly fractional); conversion happens only at the
// I/O boundary so deadline arithmetic never touches floating point.
using usec = std::int64_t;

inline usec ms_to_us(double ms) {
    return static_cast<usec>(std::llround(ms * 1000.0));
}

constexpr usec ms_to_us_int(std::int64_t ms) {
    return ms * 1000;
}

constexpr double us_to_ms(usec us) {
    return static_cast<double>(us) / 1000.0;
}

// Fixed three-decimal millisecond rendering, used by every report writer so
// output bytes do not depend on locale or default float formatting.
inline std::string format_ms(usec us) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%lld.%03lld",
                  static_cast<long long>(us / 1000),
                  static_cast<long long>(us < 0 ? -(us % 1000) : us % 1000));
    return buf;
}

} // namespace red
