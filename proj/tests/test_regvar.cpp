#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "orbitlab/regvar.hpp"

using namespace orbitlab;

namespace {
const double kE = std::exp(1.0);
}

TEST_CASE("eval_h on the example families") {
    auto pp = make_pure_power(1.5);
    CHECK(eval_h(pp, 4.0) == 8.0);
    auto xl = make_xlogx();
    CHECK(eval_h(xl, kE) == doctest::Approx(kE).epsilon(1e-14));
    auto pl = make_power_log(1.02, 1.0);
    CHECK(eval_h(pl, 100.0) ==
          doctest::Approx(std::pow(100.0, 1.02) * std::log(100.0)).epsilon(1e-14));
    auto pel = make_power_exp_log(1.02, 0.5, 0.5);
    CHECK(eval_h(pel, 50.0) ==
          doctest::Approx(std::pow(50.0, 1.02) * std::exp(0.5 * std::sqrt(std::log(50.0))))
              .epsilon(1e-14));
    auto pil = make_power_iter_log(1.02, 2);
    CHECK(eval_h(pil, 100.0) ==
          doctest::Approx(std::pow(100.0, 1.02) * std::log(std::log(100.0))).epsilon(1e-14));
}

TEST_CASE("eval_h domain and extension") {
    auto xl = make_xlogx();
    CHECK_THROWS_AS(eval_h(xl, 0.5), std::domain_error);
    CHECK_THROWS_AS(eval_h(xl, std::nan("")), std::domain_error);
    // pinned extension: h(1) = 1, increasing up to x0
    CHECK(eval_h(xl, 1.0) == 1.0);
    double prev = eval_h(xl, 1.0);
    for (double x = 1.05; x < xl.x0 + 1.0; x += 0.05) {
        const double v = eval_h(xl, x);
        CHECK(v > prev);
        CHECK(v >= 1.0);
        prev = v;
    }
}

TEST_CASE("construction rejects out-of-class parameters") {
    CHECK_THROWS_AS(make_pure_power(1.0), std::invalid_argument);   // c=1 needs a log factor
    CHECK_THROWS_AS(make_pure_power(2.0), std::invalid_argument);   // c in [1,2)
    CHECK_THROWS_AS(make_pure_power(1.5, -1.0), std::invalid_argument);
    CHECK_THROWS_AS(make_power_log(1.0, -1.0), std::invalid_argument);  // c=1 needs a>0
    CHECK_THROWS_AS(make_power_log(1.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(make_power_exp_log(1.02, 0.5, 1.5), std::invalid_argument);  // b in (0,1)
    CHECK_THROWS_AS(make_power_iter_log(1.02, 0), std::invalid_argument);
    CHECK_NOTHROW(make_power_log(1.0, 1.0));  // x log x style, admissible at c=1
}

TEST_CASE("inverse_phi examples and residuals") {
    auto pp = make_pure_power(1.5);
    CHECK(inverse_phi(pp, 8.0) == doctest::Approx(4.0).epsilon(1e-13));
    CHECK(inverse_phi(pp, 11.0) == doctest::Approx(std::pow(11.0, 2.0 / 3.0)).epsilon(1e-13));
    auto xl = make_xlogx();
    CHECK(inverse_phi(xl, kE) == doctest::Approx(kE).epsilon(1e-13));
    CHECK_THROWS_AS(inverse_phi(pp, 0.2), std::domain_error);

    // residual contract |h(phi(y)) - y| <= 1e-12 max(1, y), and monotone
    for (const auto& f : {make_pure_power(1.02), make_power_log(1.02, 1.0), make_xlogx(),
                          make_power_exp_log(1.02, 0.5, 0.5), make_power_iter_log(1.02, 2)}) {
        double prev = 0.0;
        for (double y = 1.0; y < 1e9; y *= 7.3) {
            const double x = inverse_phi(f, y);
            CHECK(std::abs(eval_h(f, x) - y) <= 1e-12 * std::max(1.0, y));
            CHECK(x > prev);
            prev = x;
        }
    }
}

TEST_CASE("inverse round-trip on a log grid") {
    for (const auto& f : {make_pure_power(1.02), make_pure_power(1.5), make_power_log(1.02, 1.0),
                          make_xlogx()}) {
        for (double x = f.x0; x <= 1e9; x *= 3.7) {
            const double y = eval_h(f, x);
            CHECK(std::abs(inverse_phi(f, y) - x) <= 1e-9 * x);
        }
    }
}

TEST_CASE("is_member examples") {
    auto pp = make_pure_power(1.5);
    CHECK(is_member(pp, 5));
    CHECK_FALSE(is_member(pp, 4));
    CHECK(is_member(pp, 1));
    // h(4) = 8 and h(16) = 64 are exact integers: the guard must classify them
    CHECK(is_member(pp, 8));
    CHECK(is_member(pp, 64));
    CHECK_FALSE(is_member(pp, 63));
}

TEST_CASE("floor_orbit_upto examples") {
    auto pp = make_pure_power(1.5);
    CHECK(floor_orbit_upto(pp, 12) == std::vector<std::int64_t>{1, 2, 5, 8, 11});
    CHECK(floor_orbit_upto(make_pure_power(1.02), 5) == std::vector<std::int64_t>{1, 2, 3, 4, 5});
    CHECK(floor_orbit_upto(pp, 1) == std::vector<std::int64_t>{1});
    CHECK(floor_orbit_upto(make_xlogx(), 1) == std::vector<std::int64_t>{1});
    // serial and parallel lanes agree exactly
    CHECK(floor_orbit_upto(pp, 100000, Exec::Serial) == floor_orbit_upto(pp, 100000, Exec::Parallel));
}

TEST_CASE("delta_phi examples and telescoping") {
    auto pp = make_pure_power(1.5);
    CHECK(delta_phi(pp, 1) == doctest::Approx(std::pow(2.0, 2.0 / 3.0) - 1.0).epsilon(1e-12));
    CHECK(delta_phi(pp, 8) == doctest::Approx(std::pow(9.0, 2.0 / 3.0) - 4.0).epsilon(1e-12));
    const std::int64_t N = 2000;
    double sum = 0.0;
    for (std::int64_t n = 1; n < N; ++n) sum += delta_phi(pp, n);
    CHECK(sum == doctest::Approx(inverse_phi(pp, N) - inverse_phi(pp, 1)).epsilon(1e-9));
}

TEST_CASE("phi_table matches the scalar inverse and carries exactness flags") {
    auto pp = make_pure_power(1.5);
    const auto t = phi_table(pp, 64);
    for (std::int64_t n = 1; n <= 65; ++n) {
        CHECK(t.phi_at(n) == doctest::Approx(inverse_phi(pp, double(n))).epsilon(1e-12));
        CHECK(t.frac_at(n) >= 0.0);
        CHECK(t.frac_at(n) < 1.0);
    }
    // phi(8) = 4 exactly: fractional part of -phi must be exactly 0
    CHECK(t.frac_at(8) == 0.0);
    CHECK(t.ceil_at(8) == 4);
    CHECK(t.floor_at(8) == 4);
    CHECK(t.frac_at(11) == doctest::Approx(1.0 - (std::pow(11.0, 2.0 / 3.0) - 4.0)).epsilon(1e-12));
    for (std::int64_t n = 1; n <= 64; ++n) CHECK(t.delta_at(n) > 0.0);
    // serial == parallel bit for bit
    const auto ts = phi_table(pp, 4096, Exec::Serial);
    const auto tp = phi_table(pp, 4096, Exec::Parallel);
    CHECK(ts.phi == tp.phi);
    CHECK(ts.delta == tp.delta);
    CHECK(ts.frac_minus_phi == tp.frac_minus_phi);
}

TEST_CASE("orbit identity scan: thresholds and cardinality slack") {
    struct Case {
        RegVarFunction f;
        std::int64_t nstar;
    };
    for (const auto& [f, nstar] : {Case{make_pure_power(1.02), 1}, Case{make_pure_power(1.5), 1},
                                   Case{make_power_log(1.02, 1.0), 1}, Case{make_xlogx(), 2}}) {
        const auto rep = scan_orbit_identities(f, 100000);
        CHECK(rep.indicator_threshold == nstar);
        CHECK(rep.indicator_threshold <= 32);
        CHECK(rep.max_card_slack <= 2);
        CHECK(rep.monotone_threshold <= 2);
    }
}

TEST_CASE("indicator formula equals ceil difference") {
    auto pp = make_pure_power(1.5);
    // orbit within [1, 12] is {1, 2, 5, 8, 11}
    for (std::int64_t n = 1; n <= 12; ++n)
        CHECK(indicator_formula(pp, n) == (is_member(pp, n) ? 1 : 0));
}

TEST_CASE("growth sandwich: log h / log x approaches c") {
    for (const auto& f : {make_pure_power(1.02), make_power_log(1.02, 1.0),
                          make_power_exp_log(1.02, 0.5, 0.5), make_xlogx()}) {
        const double near = std::abs(std::log(eval_h(f, 1e9)) / std::log(1e9) - f.c);
        const double far = std::abs(std::log(eval_h(f, 1e3)) / std::log(1e3) - f.c);
        CHECK(near <= far + 1e-12);
        CHECK(near <= 0.3);
    }
}

TEST_CASE("function spec grammar") {
    CHECK(parse_function_spec("power:c=1.02").family == Family::PurePower);
    CHECK(parse_function_spec("power:c=1.02").c == 1.02);
    auto pl = parse_function_spec("powerlog:c=1.02,a=1");
    CHECK(pl.family == Family::PowerLog);
    CHECK(pl.a == 1.0);
    auto pel = parse_function_spec("powerexplog:c=1.02,a=0.5,b=0.5");
    CHECK(pel.family == Family::PowerExpLog);
    CHECK(pel.b == 0.5);
    auto pil = parse_function_spec("poweriterlog:c=1.02,k=2");
    CHECK(pil.family == Family::PowerIterLog);
    CHECK(pil.k == 2);
    CHECK(parse_function_spec("xlogx").family == Family::XLogX);
    CHECK(parse_function_spec("power:c=1.5,scale=2").scale == 2.0);
    CHECK_THROWS_AS(parse_function_spec("power"), std::invalid_argument);
    CHECK_THROWS_AS(parse_function_spec("power:c=abc"), std::invalid_argument);
    CHECK_THROWS_AS(parse_function_spec("power:c=1.02,zz=1"), std::invalid_argument);
    CHECK_THROWS_AS(parse_function_spec("parabola:c=1.02"), std::invalid_argument);
    CHECK_THROWS_AS(parse_function_spec("xlogx:c=1.5"), std::invalid_argument);
}
