#pragma once

#include <cstdint>
#include <span>
#include <utility>

namespace orbitlab {

struct FitResult {
    double slope = 0.0;
    double intercept = 0.0;
    double stderr_slope = 0.0;
    std::int64_t points = 0;
};

/// Ordinary least squares of log y against log N over (N, y) points with
/// y > 0. Needs >= 3 points and at least two distinct N.
FitResult fit_exponent(std::span<const std::pair<double, double>> points);

}  // namespace orbitlab
