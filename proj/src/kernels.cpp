#include "orbitlab/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace orbitlab {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

KernelParams KernelParams::make(std::int64_t N, double c, std::optional<std::int64_t> M_override) {
    if (N < 2) throw std::invalid_argument("KernelParams: N must be >= 2");
    if (!(c >= 1.0 && c < 2.0)) throw std::invalid_argument("KernelParams: c must lie in [1, 2)");
    KernelParams p;
    p.N = N;
    p.c = c;
    p.epsilon0 = (23.0 - 22.0 * c) / (40.0 * c);
    p.sigma0 = 1.0 - 1.0 / c + p.epsilon0;
    p.M_override = M_override;
    if (M_override) {
        if (*M_override < 2) throw std::invalid_argument("KernelParams: M must be >= 2");
        p.M = *M_override;
    } else {
        if (!(p.epsilon0 > 0.0))
            throw std::invalid_argument("KernelParams: c >= 23/22 needs an explicit M_override");
        p.M = std::max<std::int64_t>(2, static_cast<std::int64_t>(
                                            std::floor(std::pow(static_cast<double>(N), p.sigma0))));
    }
    if (p.epsilon0 > 0.0) {
        const double lo = 1.0 - 1.0 / c, hi = 3.0 / c - 2.0;
        if (!(p.sigma0 > lo && p.sigma0 < hi))
            throw std::logic_error("KernelParams: sigma0 left its admissible window");
    }
    return p;
}

double sawtooth(double x) {
    if (!std::isfinite(x)) throw std::domain_error("sawtooth: x must be finite");
    return x - std::floor(x) - 0.5;
}

double truncated_sawtooth(double x, std::int64_t M) {
    if (M < 2) throw std::domain_error("truncated_sawtooth: M must be >= 2");
    const double u = x - std::floor(x);
    if (u == 0.0 || u == 0.5) return 0.0;  // sin(2 pi m u) vanishes exactly
    const cd z1 = std::polar(1.0, 2.0 * kPi * u);
    cd z = z1;
    double s = z.imag();
    for (std::int64_t m = 2; m <= M; ++m) {
        z *= z1;
        if ((m & 1023) == 0) z /= std::abs(z);  // keep rotation drift bounded
        s += z.imag() / static_cast<double>(m);
    }
    return -s / kPi;
}

double tail_bound_constant(std::int64_t M, std::int64_t sample_count) {
    if (M < 2) throw std::domain_error("tail_bound_constant: M must be >= 2");
    if (sample_count < 1000) throw std::domain_error("tail_bound_constant: need >= 1000 samples");
    double worst = 0.0;
#pragma omp parallel for schedule(static) reduction(max : worst)
    for (std::int64_t i = 0; i < sample_count; ++i) {
        const double x = (static_cast<double>(i) + 0.5) / static_cast<double>(sample_count);
        const double g = sawtooth(x) - truncated_sawtooth(x, M);
        const double dist = std::min(x, 1.0 - x);
        const double bound = std::min(1.0, 1.0 / (static_cast<double>(M) * dist));
        const double ratio = std::abs(g) / bound;
        if (ratio > worst) worst = ratio;
    }
    return worst;
}

WeightKernel build_kernel(const RegVarFunction& f, const KernelParams& params,
                          const PhiTable* shared, Exec ex) {
    const std::int64_t N = params.N;
    PhiTable local;
    const PhiTable* t = shared;
    if (t == nullptr || t->N < N) {
        local = phi_table(f, N, ex);
        t = &local;
    }
    WeightKernel k;
    k.params = params;
    k.phi_floor_N = t->floor_at(N);
    const double scale = static_cast<double>(N) / static_cast<double>(k.phi_floor_N);
    const std::int64_t M = params.M;

    // Phi and its truncation evaluated once per point; the three kernels are
    // the adjacent differences, so w = w_main + w_error holds by construction.
    std::vector<double> saw(static_cast<std::size_t>(N + 1));
    std::vector<double> trunc(static_cast<std::size_t>(N + 1));
#pragma omp parallel for schedule(static) if (ex == Exec::Parallel)
    for (std::int64_t i = 0; i <= N; ++i) {
        const double u = t->frac_at(i + 1);
        saw[static_cast<std::size_t>(i)] = u - 0.5;
        trunc[static_cast<std::size_t>(i)] = truncated_sawtooth(u, M);
    }

    k.w.resize(static_cast<std::size_t>(N));
    k.w_main.resize(static_cast<std::size_t>(N));
    k.w_error.resize(static_cast<std::size_t>(N));
#pragma omp parallel for schedule(static) if (ex == Exec::Parallel)
    for (std::int64_t i = 0; i < N; ++i) {
        const double p1 = saw[static_cast<std::size_t>(i)], p2 = saw[static_cast<std::size_t>(i + 1)];
        const double s1 = trunc[static_cast<std::size_t>(i)], s2 = trunc[static_cast<std::size_t>(i + 1)];
        k.w[static_cast<std::size_t>(i)] = scale * (p2 - p1);
        k.w_main[static_cast<std::size_t>(i)] = scale * (s2 - s1);
        k.w_error[static_cast<std::size_t>(i)] = scale * ((p2 - s2) - (p1 - s1));
    }
    return k;
}

std::vector<KernelSlice> dyadic_main_slices(const WeightKernel& k) {
    const std::int64_t N = k.params.N;
    std::vector<KernelSlice> out;
    for (int l = 0; (std::int64_t{1} << l) <= N; ++l) {
        const std::int64_t lo = std::int64_t{1} << l;
        const std::int64_t hi = std::min(std::int64_t{1} << (l + 1), N + 1);
        KernelSlice s;
        s.l = l;
        s.begin = lo;
        s.values.assign(k.w_main.begin() + (lo - 1), k.w_main.begin() + (hi - 1));
        out.push_back(std::move(s));
    }
    return out;
}

SignalZ unweighted_kernel_L(const WeightKernel& k, int l) {
    const auto slices = dyadic_main_slices(k);
    if (l < 0 || l >= static_cast<int>(slices.size()))
        throw std::domain_error("unweighted_kernel_L: slice index out of range");
    const KernelSlice& s = slices[static_cast<std::size_t>(l)];
    const double inv = static_cast<double>(k.phi_floor_N) / static_cast<double>(k.params.N);
    std::vector<cd> vals(s.values.size());
    for (std::size_t i = 0; i < s.values.size(); ++i) vals[i] = cd{inv * s.values[i], 0.0};
    return SignalZ(s.begin, std::move(vals));
}

double error_l1(const WeightKernel& k, Exec ex) {
    const std::int64_t N = k.params.N;
    const double total = block_sum<double>(
        0, N, [&](std::int64_t i) { return std::abs(k.w_error[static_cast<std::size_t>(i)]); }, ex);
    return total / static_cast<double>(N);
}

double main_term_ratio(const RegVarFunction& f, std::int64_t N) {
    if (N < 2) throw std::domain_error("main_term_ratio: N must be >= 2");
    const double dphi = delta_phi(f, N);
    return static_cast<double>(N) * dphi / static_cast<double>(floor_phi(f, N));
}

double second_sum_ratio(const PhiTable& t, std::int64_t n_start) {
    const std::int64_t N = t.N;
    if (n_start < 1 || n_start >= N) throw std::domain_error("second_sum_ratio: bad n_start");
    const double total = block_sum<double>(n_start, N, [&](std::int64_t n) {
        return static_cast<double>(n) * (t.delta_at(n) - t.delta_at(n + 1));
    });
    return total / static_cast<double>(t.floor_at(N));
}

double summation_by_parts_residual(const PhiTable& t, std::span<const cd> a) {
    const std::int64_t N = t.N;
    if (static_cast<std::int64_t>(a.size()) != N)
        throw std::invalid_argument("summation_by_parts_residual: sequence length must be N");
    const double phiN = static_cast<double>(t.floor_at(N));
    const cd lhs = block_sum<cd>(0, N, [&](std::int64_t i) {
        return t.delta[static_cast<std::size_t>(i)] * a[static_cast<std::size_t>(i)];
    });
    std::vector<cd> prefix(static_cast<std::size_t>(N));
    cd run{};
    for (std::int64_t i = 0; i < N; ++i) {
        run += a[static_cast<std::size_t>(i)];
        prefix[static_cast<std::size_t>(i)] = run;
    }
    const cd boundary = t.delta_at(N) * prefix[static_cast<std::size_t>(N - 1)];
    const cd abel = block_sum<cd>(1, N, [&](std::int64_t n) {
        return (t.delta_at(n) - t.delta_at(n + 1)) * prefix[static_cast<std::size_t>(n - 1)];
    });
    return std::abs(lhs - boundary - abel) / phiN;
}

}  // namespace orbitlab
