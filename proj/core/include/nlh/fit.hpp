#pragma once

#include <span>

namespace nlh {

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    /// Coefficient of determination.
    double r2 = 0.0;
};

/// Ordinary least squares y ~ slope x + intercept. Needs at least two distinct x.
LineFit fit_line(std::span<const double> x, std::span<const double> y);

}  // namespace nlh
