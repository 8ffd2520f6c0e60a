// Benchmark of the OpenMP lanes against the serial reference implementations.
// Both lanes use the same fixed block decomposition, so outputs must match
// bit for bit; the table reports times and the speedup.

#include <chrono>
#include <cstdio>
#include <string>

#include "orbitlab/ergodic.hpp"
#include "orbitlab/gowers.hpp"
#include "orbitlab/kernels.hpp"
#include "orbitlab/patterns.hpp"
#include "orbitlab/regvar.hpp"

using namespace orbitlab;

namespace {

using clock_type = std::chrono::steady_clock;

template <class F>
double time_of(F&& f) {
    const auto t0 = clock_type::now();
    f();
    return std::chrono::duration<double>(clock_type::now() - t0).count();
}

void row(const char* name, double serial, double parallel, bool equal) {
    std::printf("%-28s %10.3f s %10.3f s %8.2fx   %s\n", name, serial, parallel,
                serial / parallel, equal ? "outputs equal" : "OUTPUT MISMATCH");
}

}  // namespace

int main() {
    std::printf("%-28s %12s %12s %9s\n", "kernel", "serial", "openmp", "speedup");

    auto f = make_pure_power(1.02);

    {
        PhiTable a, b;
        const double ts = time_of([&] { a = phi_table(f, 1 << 18, Exec::Serial); });
        const double tp = time_of([&] { b = phi_table(f, 1 << 18, Exec::Parallel); });
        row("phi_table 2^18", ts, tp, a.phi == b.phi && a.delta == b.delta);
    }
    {
        const auto table = phi_table(f, 1 << 18);
        WeightKernel a, b;
        const auto params = KernelParams::make(1 << 18, 1.02, 256);
        const double ts = time_of([&] { a = build_kernel(f, params, &table, Exec::Serial); });
        const double tp = time_of([&] { b = build_kernel(f, params, &table, Exec::Parallel); });
        row("build_kernel 2^18 M=256", ts, tp, a.w == b.w && a.w_main == b.w_main);
    }
    {
        Rng rng = Rng::seeded(1);
        std::vector<cd> v(2048);
        for (auto& z : v) z = cd{rng.pm1(), rng.uniform01()};
        const SignalZ sig(0, std::move(v));
        double a = 0, b = 0;
        const double ts = time_of([&] { a = u3_eighth(sig, Exec::Serial); });
        const double tp = time_of([&] { b = u3_eighth(sig, Exec::Parallel); });
        row("u3_eighth W=2048", ts, tp, a == b);
    }
    {
        Rng rng = Rng::seeded(2);
        const auto A = IntegerSet::random(1 << 17, 0.5, rng);
        PatternReport a, b;
        const double ts = time_of([&] { a = count_ap3_full(A, Exec::Serial); });
        const double tp = time_of([&] { b = count_ap3_full(A, Exec::Parallel); });
        row("count_ap3_full 2^17", ts, tp, a.raw_count == b.raw_count);
    }
    {
        Rng rng = Rng::seeded(3);
        const std::int64_t N = 256, K = 4 * N + 1;
        Signal2D g0(-2 * N, -2 * N, K, K), g1 = g0, g2 = g0;
        for (auto& z : g0.values) z = cd{rng.pm1(), 0.0};
        for (auto& z : g1.values) z = cd{rng.pm1(), 0.0};
        for (auto& z : g2.values) z = cd{rng.pm1(), 0.0};
        std::vector<cd> w(N);
        for (auto& z : w) z = cd{rng.pm1(), 0.0};
        cd a, b;
        const double ts = time_of([&] { a = trilinear_corner(g0, g1, g2, w, N, Exec::Serial); });
        const double tp = time_of([&] { b = trilinear_corner(g0, g1, g2, w, N, Exec::Parallel); });
        row("trilinear_corner N=256", ts, tp, a == b);
    }
    {
        const auto table = phi_table(f, 1 << 20);
        const auto k = build_kernel(f, KernelParams::make(1 << 20, 1.02), &table);
        const auto sys = FiniteSystem::cyclic(5, 1, 1);
        const auto obs = FiniteObservable::indicator_point(sys, {0, 0});
        cd a, b;
        const double ts = time_of([&] { a = error_term_average(sys, obs, obs, k, {0, 0}, Exec::Serial); });
        const double tp = time_of([&] { b = error_term_average(sys, obs, obs, k, {0, 0}, Exec::Parallel); });
        row("error_term_average 2^20", ts, tp, a == b);
    }
    return 0;
}
