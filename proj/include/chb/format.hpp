#pragma once

#include <cstdio>
#include <string>

namespace chb {

/// Shortest-safe round-trip text for a double: 17 significant digits.
inline std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

}  // namespace chb
