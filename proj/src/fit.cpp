#include "orbitlab/fit.hpp"

#include <cmath>
#include <stdexcept>

namespace orbitlab {

FitResult fit_exponent(std::span<const std::pair<double, double>> points) {
    const std::int64_t n = static_cast<std::int64_t>(points.size());
    if (n < 3) throw std::invalid_argument("fit_exponent: need at least 3 points");
    double sx = 0.0, sy = 0.0;
    for (const auto& [N, y] : points) {
        if (!(N > 0.0) || !(y > 0.0))
            throw std::domain_error("fit_exponent: N and y must be positive");
        sx += std::log(N);
        sy += std::log(y);
    }
    const double mx = sx / static_cast<double>(n), my = sy / static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0;
    for (const auto& [N, y] : points) {
        const double dx = std::log(N) - mx;
        sxx += dx * dx;
        sxy += dx * (std::log(y) - my);
    }
    if (sxx == 0.0) throw std::domain_error("fit_exponent: all N equal");
    FitResult r;
    r.points = n;
    r.slope = sxy / sxx;
    r.intercept = my - r.slope * mx;
    double ssr = 0.0;
    for (const auto& [N, y] : points) {
        const double res = std::log(y) - (r.intercept + r.slope * std::log(N));
        ssr += res * res;
    }
    r.stderr_slope = n > 2 ? std::sqrt(ssr / static_cast<double>(n - 2) / sxx) : 0.0;
    return r;
}

}  // namespace orbitlab
