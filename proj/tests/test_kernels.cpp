#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "orbitlab/kernels.hpp"

using namespace orbitlab;

TEST_CASE("KernelParams: window, floor guard and override") {
    const auto p = KernelParams::make(1 << 16, 1.02);
    CHECK(p.epsilon0 == doctest::Approx((23.0 - 22.0 * 1.02) / (40.0 * 1.02)));
    CHECK(p.sigma0 == doctest::Approx(1.0 - 1.0 / 1.02 + p.epsilon0));
    CHECK(p.M >= 2);
    CHECK(p.M == std::max<std::int64_t>(2, (std::int64_t)std::floor(std::pow(65536.0, p.sigma0))));

    // sigma0 sits strictly inside (1 - 1/c, 3/c - 2) over a c grid
    for (double c = 1.001; c < 23.0 / 22.0 - 1e-4; c += 0.003) {
        const auto q = KernelParams::make(1024, c);
        CHECK(q.sigma0 > 1.0 - 1.0 / c);
        CHECK(q.sigma0 < 3.0 / c - 2.0);
    }

    CHECK_THROWS_AS(KernelParams::make(1024, 23.0 / 22.0 + 0.01), std::invalid_argument);
    CHECK_NOTHROW(KernelParams::make(1024, 23.0 / 22.0 + 0.01, 16));
    CHECK_THROWS_AS(KernelParams::make(1024, 1.02, 1), std::invalid_argument);
    CHECK_THROWS_AS(KernelParams::make(1, 1.02), std::invalid_argument);
}

TEST_CASE("sawtooth values and periodicity") {
    CHECK(sawtooth(0.25) == -0.25);
    CHECK(sawtooth(0.0) == -0.5);
    CHECK(sawtooth(-0.25) == 0.25);
    for (double x : {0.13, 0.77, -3.4, 12.9})
        CHECK(sawtooth(x) == doctest::Approx(sawtooth(x + 3.0)).epsilon(1e-12));
}

TEST_CASE("truncated sawtooth: exact zeros, hand value, direct-sum oracle") {
    CHECK(truncated_sawtooth(0.0, 7) == 0.0);
    CHECK(truncated_sawtooth(0.5, 16) == 0.0);
    CHECK(truncated_sawtooth(0.25, 2) == doctest::Approx(-1.0 / M_PI).epsilon(1e-14));
    for (double x : {0.1, 0.37, 0.52, 0.9})
        for (std::int64_t M : {2, 5, 33}) {
            double direct = 0.0;
            for (std::int64_t m = 1; m <= M; ++m)
                direct -= std::sin(2.0 * M_PI * m * x) / (M_PI * m);
            CHECK(truncated_sawtooth(x, M) == doctest::Approx(direct).epsilon(1e-11));
            // odd around integers
            CHECK(truncated_sawtooth(-x, M) == doctest::Approx(-truncated_sawtooth(x, M)).epsilon(1e-11));
        }
}

TEST_CASE("Fourier tail constant stays small") {
    const double c2 = tail_bound_constant(2, 20000);
    const double c64 = tail_bound_constant(64, 20000);
    CHECK(c2 <= 3.0);
    CHECK(c64 <= 3.0);
    CHECK(c64 <= c2 * 1.1);
}

TEST_CASE("build_kernel: hand value at N=4, PurePower c=1.5") {
    auto pp = make_pure_power(1.5);
    const auto k = build_kernel(pp, KernelParams::make(4, 1.5, 4));
    CHECK(k.phi_floor_N == 2);
    // w(1) = 2 (Phi(-phi(2)) - Phi(-phi(1))), computed through std::floor directly
    auto phi_ref = [](double y) { return std::pow(y, 2.0 / 3.0); };
    auto saw_ref = [](double x) { return x - std::floor(x) - 0.5; };
    const double want = 2.0 * (saw_ref(-phi_ref(2.0)) - (-0.5));
    CHECK(k.w[0] == doctest::Approx(want).epsilon(1e-12));
    CHECK(k.w[0] == doctest::Approx(0.82520).epsilon(1e-4));
}

TEST_CASE("kernel split: pointwise additivity and bounded sup") {
    auto f = make_pure_power(1.02);
    const std::int64_t N = 1 << 12;
    const auto t = phi_table(f, N);
    const auto k = build_kernel(f, KernelParams::make(N, 1.02, 64), &t);
    const double tol = 1e-12 * static_cast<double>(N) / static_cast<double>(k.phi_floor_N);
    double sup = 0.0;
    for (std::int64_t i = 0; i < N; ++i) {
        CHECK(std::abs(k.w[i] - k.w_main[i] - k.w_error[i]) <= tol);
        sup = std::max(sup, std::abs(k.w[i]));
    }
    // |w| <= 2 sup|Phi| * N/phi_N = N/phi_N
    CHECK(sup <= static_cast<double>(N) / static_cast<double>(k.phi_floor_N) + 1e-12);
}

TEST_CASE("exact indicator reconstruction through the table") {
    auto f = make_pure_power(1.02);
    const std::int64_t N = 1 << 12;
    const auto t = phi_table(f, N);
    for (std::int64_t n = 1; n <= N; ++n) {
        const double lhs = static_cast<double>(t.ceil_at(n + 1) - t.ceil_at(n));
        const double rhs = t.delta_at(n) + ((t.frac_at(n + 1) - 0.5) - (t.frac_at(n) - 0.5));
        CHECK(std::abs(lhs - rhs) <= 1e-9);
    }
}

TEST_CASE("dyadic slices partition w_main") {
    auto f = make_pure_power(1.02);
    const auto k = build_kernel(f, KernelParams::make(4, 1.02, 4));
    const auto slices = dyadic_main_slices(k);
    REQUIRE(slices.size() == 3);
    CHECK(slices[0].begin == 1);
    CHECK(slices[0].values.size() == 1);
    CHECK(slices[1].begin == 2);
    CHECK(slices[1].values.size() == 2);
    CHECK(slices[2].begin == 4);
    CHECK(slices[2].values.size() == 1);

    const auto k2 = build_kernel(f, KernelParams::make(1000, 1.02, 8));
    std::vector<double> recon(1000, 0.0);
    std::int64_t covered = 0;
    for (const auto& s : dyadic_main_slices(k2)) {
        for (std::size_t j = 0; j < s.values.size(); ++j) {
            CHECK(recon[s.begin - 1 + j] == 0.0);  // disjoint supports
            recon[s.begin - 1 + j] = s.values[j];
            ++covered;
        }
    }
    CHECK(covered == 1000);
    for (std::int64_t i = 0; i < 1000; ++i) CHECK(recon[i] == k2.w_main[i]);
}

TEST_CASE("unweighted kernel L: scaling, support, sup bound") {
    auto f = make_pure_power(1.02);
    for (std::int64_t M : {2LL, 64LL}) {
        for (std::int64_t N : {1 << 10, 1 << 12}) {
            const auto k = build_kernel(f, KernelParams::make(N, 1.02, M));
            const auto slices = dyadic_main_slices(k);
            const double ratio = static_cast<double>(N) / static_cast<double>(k.phi_floor_N);
            for (const auto& s : slices) {
                const auto L = unweighted_kernel_L(k, s.l);
                CHECK(L.lo() >= (std::int64_t{1} << s.l));
                CHECK(L.hi() <= (std::int64_t{1} << (s.l + 1)));
                for (std::size_t j = 0; j < L.values.size(); ++j) {
                    CHECK(ratio * L.values[j].real() ==
                          doctest::Approx(s.values[j]).epsilon(1e-12));
                    CHECK(std::abs(L.values[j]) <= 4.0);
                }
            }
        }
    }
    const auto k = build_kernel(f, KernelParams::make(16, 1.02, 4));
    CHECK_THROWS_AS(unweighted_kernel_L(k, 99), std::domain_error);
}

TEST_CASE("error_l1 decays in M and vanishes for a zero error kernel") {
    auto f = make_pure_power(1.02);
    const std::int64_t N = 1 << 14;
    const auto t = phi_table(f, N);
    const double e4 = error_l1(build_kernel(f, KernelParams::make(N, 1.02, 4), &t));
    const double e64 = error_l1(build_kernel(f, KernelParams::make(N, 1.02, 64), &t));
    const double e1024 = error_l1(build_kernel(f, KernelParams::make(N, 1.02, 1024), &t));
    CHECK(e4 > e64);
    CHECK(e64 > e1024);
    CHECK(e1024 <= e4 / 4.0);

    WeightKernel zero;
    zero.params = KernelParams::make(8, 1.02, 4);
    zero.phi_floor_N = 7;
    zero.w.assign(8, 0.1);
    zero.w_main = zero.w;
    zero.w_error.assign(8, 0.0);
    CHECK(error_l1(zero) == 0.0);
}

TEST_CASE("main term ratio tends to 1/c; the Abel sum tends to 1 - 1/c") {
    CHECK(main_term_ratio(make_pure_power(1.5), 1000000) ==
          doctest::Approx(2.0 / 3.0).epsilon(0.05));
    CHECK(main_term_ratio(make_pure_power(1.02), 1000000) ==
          doctest::Approx(1.0 / 1.02).epsilon(0.05));
    const auto t15 = phi_table(make_pure_power(1.5), 1 << 16);
    CHECK(second_sum_ratio(t15) == doctest::Approx(1.0 - 2.0 / 3.0).epsilon(0.05));
    const auto t102 = phi_table(make_pure_power(1.02), 1 << 16);
    CHECK(second_sum_ratio(t102) == doctest::Approx(1.0 - 1.0 / 1.02).epsilon(0.05));
}

TEST_CASE("summation by parts is an identity") {
    auto f = make_pure_power(1.02);
    const std::int64_t N = 1 << 12;
    const auto t = phi_table(f, N);
    Rng rng = Rng::seeded(11);
    for (int trial = 0; trial < 5; ++trial) {
        std::vector<cd> a(N);
        for (auto& z : a) z = cd{rng.uniform01() * 2 - 1, rng.uniform01() * 2 - 1};
        CHECK(summation_by_parts_residual(t, a) <= 1e-9 * static_cast<double>(N));
        CHECK(summation_by_parts_residual(t, a) <= 1e-12);  // observed: machine-level
    }
}

TEST_CASE("serial and parallel kernel builds agree bit for bit") {
    auto f = make_pure_power(1.02);
    const auto ks = build_kernel(f, KernelParams::make(1 << 12, 1.02, 16), nullptr, Exec::Serial);
    const auto kp = build_kernel(f, KernelParams::make(1 << 12, 1.02, 16), nullptr, Exec::Parallel);
    CHECK(ks.w == kp.w);
    CHECK(ks.w_main == kp.w_main);
    CHECK(ks.w_error == kp.w_error);
}
