#pragma once

// Internal quadrature helpers on uniform samples.

#include <cstddef>
#include <span>

namespace nlh::detail {

/// Composite Simpson over equally spaced samples; an odd panel count closes
/// with a three-point end correction.
inline double simpson(std::span<const double> y, double h) {
    const std::size_t n = y.size();
    if (n < 2) return 0.0;
    if (n == 2) return 0.5 * h * (y[0] + y[1]);
    const std::size_t intervals = n - 1;
    const std::size_t even = intervals - (intervals % 2);
    double s = y[0] + y[even];
    for (std::size_t i = 1; i < even; ++i) s += (i % 2 ? 4.0 : 2.0) * y[i];
    double total = s * h / 3.0;
    if (even != intervals) {
        const std::size_t k = intervals;
        total += h * (-y[k - 2] + 8.0 * y[k - 1] + 5.0 * y[k]) / 12.0;
    }
    return total;
}

}  // namespace nlh::detail
