#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "orbitlab/common.hpp"
#include "orbitlab/fit.hpp"

using namespace orbitlab;

TEST_CASE("exact power laws") {
    std::vector<std::pair<double, double>> quad, flat;
    for (int i = 1; i <= 8; ++i) {
        const double N = std::pow(2.0, i);
        quad.push_back({N, 3.7 * N * N});
        flat.push_back({N, 5.5});
    }
    const auto q = fit_exponent(quad);
    CHECK(q.slope == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(q.stderr_slope <= 1e-10);
    CHECK(q.points == 8);
    CHECK(fit_exponent(flat).slope == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
}

TEST_CASE("slope is invariant under y rescaling") {
    std::vector<std::pair<double, double>> a, b;
    for (int i = 1; i <= 6; ++i) {
        const double N = std::pow(3.0, i);
        const double y = std::pow(N, -0.42) * (1.0 + 0.05 * std::sin(double(i)));
        a.push_back({N, y});
        b.push_back({N, 1234.5 * y});
    }
    CHECK(fit_exponent(a).slope == doctest::Approx(fit_exponent(b).slope).epsilon(1e-12));
}

TEST_CASE("seeded noise keeps the slope near the truth") {
    Rng rng = Rng::seeded(0);
    std::vector<std::pair<double, double>> pts;
    for (int i = 4; i <= 20; ++i) {
        const double N = std::pow(2.0, i);
        const double noise = 1.0 + 0.01 * (2.0 * rng.uniform01() - 1.0);
        pts.push_back({N, std::pow(N, -0.3) * noise});
    }
    const auto r = fit_exponent(pts);
    CHECK(std::abs(r.slope + 0.3) <= 0.02);
    CHECK(std::isfinite(r.stderr_slope));
}

TEST_CASE("degenerate input errors") {
    CHECK_THROWS(fit_exponent(std::vector<std::pair<double, double>>{{1.0, 1.0}, {2.0, 0.5}}));
    CHECK_THROWS(fit_exponent(std::vector<std::pair<double, double>>{{4.0, 1.0}, {4.0, 2.0}, {4.0, 3.0}}));
    CHECK_THROWS(fit_exponent(std::vector<std::pair<double, double>>{{1.0, 1.0}, {2.0, -0.5}, {4.0, 1.0}}));
}
