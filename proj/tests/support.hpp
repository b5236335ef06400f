#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>

namespace nlh::test {

inline constexpr std::uint64_t kSeed = 20240607;

inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
    double m = 0.0;
    for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i)
        m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

inline double max_abs(std::span<const double> a) {
    double m = 0.0;
    for (double x : a) m = std::max(m, std::abs(x));
    return m;
}

inline bool rel_close(double a, double b, double rel, double abs_floor = 0.0) {
    return std::abs(a - b) <= std::max(rel * std::abs(b), abs_floor);
}

}  // namespace nlh::test
