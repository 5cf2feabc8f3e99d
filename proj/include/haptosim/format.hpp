#pragma once

#include <cstdio>
#include <string>

namespace haptosim {

/// Round-trip decimal form (17 significant digits).
inline std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// Short tag for an epsilon value, used in file names.
inline std::string eps_tag(double eps) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", eps);
    return buf;
}

} // namespace haptosim
