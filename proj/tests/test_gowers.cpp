#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "orbitlab/gowers.hpp"

using namespace orbitlab;

namespace {

SignalZ random_signal(std::int64_t offset, std::int64_t window, Rng& rng) {
    std::vector<cd> v(static_cast<std::size_t>(window));
    for (auto& z : v) z = cd{rng.uniform01() * 2 - 1, rng.uniform01() * 2 - 1};
    return SignalZ(offset, std::move(v));
}

}  // namespace

TEST_CASE("difference function on indicators") {
    const auto f = SignalZ::indicator(1, 2);
    const auto d1 = difference(f, 1);
    REQUIRE(d1.window() == 1);
    CHECK(d1.lo() == 1);
    CHECK(d1.values[0] == cd{1.0, 0.0});
    const auto d0 = difference(f, 0);
    CHECK(d0.window() == 2);
    CHECK(d0.at(1) == cd{1.0, 0.0});
    CHECK(d0.at(2) == cd{1.0, 0.0});
    CHECK(difference(f, 3).window() == 0);
    // support of Delta_h f lies in supp(f) cap (supp(f) - h)
    const auto dm1 = difference(f, -1);
    CHECK(dm1.lo() == 2);
    CHECK(dm1.window() == 1);
}

TEST_CASE("U^2 hand values and the closed form for intervals") {
    CHECK(u2_fourth(SignalZ::dirac()) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(u2_fourth(SignalZ::indicator(1, 2)) == doctest::Approx(6.0).epsilon(1e-12));
    for (std::int64_t N : {1, 2, 3, 5, 8, 16, 64, 256}) {
        const double want = (2.0 * N * N * N + N) / 3.0;
        CHECK(u2_fourth(SignalZ::indicator(1, N)) == doctest::Approx(want).epsilon(1e-11));
    }
    for (std::int64_t N : {2, 3, 7, 16}) {
        const double want = (2.0 * N * N * N + N) / 3.0;
        CHECK(u2_fourth_bruteforce(SignalZ::indicator(1, N)) == doctest::Approx(want).epsilon(1e-11));
    }
}

TEST_CASE("U^3 hand values") {
    CHECK(u3_eighth(SignalZ::dirac()) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(u3_eighth(SignalZ::indicator(1, 2)) == doctest::Approx(8.0).epsilon(1e-12));
    CHECK(u3_eighth_bruteforce(SignalZ::indicator(1, 2)) == doctest::Approx(8.0).epsilon(1e-12));
}

TEST_CASE("spectral vs brute force on random complex signals") {
    Rng rng = Rng::seeded(101);
    for (int t = 0; t < 40; ++t) {
        const std::int64_t W = 1 + rng.below(32);
        const auto f = random_signal(-rng.below(20), W, rng);
        const double f2 = u2_fourth(f), b2 = u2_fourth_bruteforce(f);
        CHECK(std::abs(f2 - b2) <= 1e-9 * std::max(1.0, std::abs(b2)));
        const double f3 = u3_eighth(f), b3 = u3_eighth_bruteforce(f);
        CHECK(std::abs(f3 - b3) <= 1e-9 * std::max(1.0, std::abs(b3)));
        CHECK(f2 >= 0.0);
        CHECK(f3 >= 0.0);
    }
}

TEST_CASE("hierarchical identity: ||f||_{U^3}^8 = sum_h ||Delta_h f||_{U^2}^4") {
    Rng rng = Rng::seeded(7);
    for (int t = 0; t < 10; ++t) {
        const auto f = random_signal(0, 16, rng);
        double total = 0.0;
        for (std::int64_t h = -15; h <= 15; ++h) total += u2_fourth(difference(f, h));
        CHECK(u3_eighth(f) == doctest::Approx(total).epsilon(1e-11));
    }
}

TEST_CASE("translation invariance") {
    Rng rng = Rng::seeded(3);
    const auto f = random_signal(0, 24, rng);
    for (std::int64_t shift : {-137, 54}) {
        SignalZ g = f;
        g.offset += shift;
        CHECK(u2_fourth(g) == doctest::Approx(u2_fourth(f)).epsilon(1e-12));
        CHECK(u3_eighth(g) == doctest::Approx(u3_eighth(f)).epsilon(1e-12));
    }
}

TEST_CASE("U^2 modulation invariance") {
    Rng rng = Rng::seeded(5);
    const auto f = random_signal(2, 20, rng);
    for (double theta : {0.1234, 0.777}) {
        SignalZ g = f;
        for (std::int64_t i = 0; i < g.window(); ++i)
            g.values[static_cast<std::size_t>(i)] *=
                std::polar(1.0, 2.0 * M_PI * theta * static_cast<double>(g.offset + i));
        CHECK(u2_fourth(g) == doctest::Approx(u2_fourth(f)).epsilon(1e-9));
    }
}

TEST_CASE("homogeneity of the norms") {
    Rng rng = Rng::seeded(9);
    const auto f = random_signal(-3, 18, rng);
    SignalZ g = f;
    for (auto& z : g.values) z *= 2.0;
    CHECK(gowers_norm(g, 2) == doctest::Approx(2.0 * gowers_norm(f, 2)).epsilon(1e-12));
    CHECK(gowers_norm(g, 3) == doctest::Approx(2.0 * gowers_norm(f, 3)).epsilon(1e-12));
    CHECK_THROWS(gowers_norm(f, 4));
}

TEST_CASE("interval U^3 ratio stabilizes") {
    // || 1_[N] ||_{U^3}^8 / N^4 settles as N grows
    double prev = 0.0;
    for (int e = 6; e <= 9; ++e) {
        const std::int64_t N = std::int64_t{1} << e;
        const double ratio = u3_eighth(SignalZ::indicator(1, N)) / std::pow(double(N), 4.0);
        if (e >= 8) CHECK(std::abs(ratio - prev) <= 0.10 * prev);
        prev = ratio;
    }
}

TEST_CASE("mu_N weight") {
    CHECK(mu_weight(3, 0) == doctest::Approx(1.0 / 3.0));
    CHECK(mu_weight(3, 2) == doctest::Approx(1.0 / 9.0));
    CHECK(mu_weight(3, 3) == 0.0);
    for (std::int64_t N : {1, 2, 5, 11}) {
        double total = 0.0;
        for (std::int64_t n = -N; n <= N; ++n) total += mu_weight(N, n);
        CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("serial and parallel U^3 agree bit for bit") {
    Rng rng = Rng::seeded(21);
    const auto f = random_signal(0, 300, rng);
    CHECK(u3_eighth(f, Exec::Serial) == u3_eighth(f, Exec::Parallel));
}
