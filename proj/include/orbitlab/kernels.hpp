#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "orbitlab/common.hpp"
#include "orbitlab/regvar.hpp"
#include "orbitlab/signal.hpp"

namespace orbitlab {

/// Truncation parameters for the Fourier split of the sawtooth.
///
/// epsilon0 = (23 - 22c)/(40c) and sigma0 = 1 - 1/c + epsilon0 realize the
/// admissible window (1 - 1/c, 3/c - 2); M couples to N as floor(N^sigma0)
/// with a floor of 2. M_override decouples M for decay-in-M experiments.
struct KernelParams {
    std::int64_t N = 2;
    double c = 1.02;
    double epsilon0 = 0.0;
    double sigma0 = 0.0;
    std::int64_t M = 2;
    std::optional<std::int64_t> M_override;

    static KernelParams make(std::int64_t N, double c,
                             std::optional<std::int64_t> M_override = {});
};

/// w_N and its exact split into the truncated-Fourier main part and the
/// Fourier-tail error part. Arrays are indexed by n-1 for n in [N].
/// Immutable after construction.
struct WeightKernel {
    KernelParams params;
    std::int64_t phi_floor_N = 1;
    std::vector<double> w;
    std::vector<double> w_main;
    std::vector<double> w_error;
};

/// Phi(x) = {x} - 1/2. At integers this is the sawtooth value -1/2, not the
/// Fourier-series value 0; the mismatch lives in w_error by construction.
double sawtooth(double x);

/// Sum_{0<|m|<=M} e(-mx)/(2 pi i m) = -sum_{m<=M} sin(2 pi m x)/(pi m).
double truncated_sawtooth(double x, std::int64_t M);

/// Fitted constant: max over midpoint samples of
/// |Phi(x) - truncated_sawtooth(x, M)| / min(1, 1/(M ||x||)).
double tail_bound_constant(std::int64_t M, std::int64_t sample_count);

/// Builds w, w_main, w_error for h at the given parameters. `shared` may hold
/// a phi table for some N' >= params.N to amortize table construction across
/// a sweep; pass nullptr to build one internally.
WeightKernel build_kernel(const RegVarFunction& f, const KernelParams& params,
                          const PhiTable* shared = nullptr, Exec ex = Exec::Parallel);

/// One dyadic restriction of w_main: support [2^l, min(2^{l+1}, N+1)).
struct KernelSlice {
    int l = 0;
    std::int64_t begin = 1;            // first n of the slice
    std::vector<double> values;        // w_main on [begin, begin + size)
};

/// All dyadic slices; they partition [N] and sum to w_main pointwise.
std::vector<KernelSlice> dyadic_main_slices(const WeightKernel& k);

/// L_{N,l} = (floor(phi(N))/N) * w_main,l as a signal on [2^l, 2^{l+1}).
SignalZ unweighted_kernel_L(const WeightKernel& k, int l);

/// (1/N) sum_n |w_error(n)|.
double error_l1(const WeightKernel& k, Exec ex = Exec::Parallel);

/// N (phi(N+1) - phi(N)) / floor(phi(N)); tends to 1/c.
double main_term_ratio(const RegVarFunction& f, std::int64_t N);

/// sum_{n=n_start}^{N-1} n (dphi(n) - dphi(n+1)) / floor(phi(N)); tends to
/// 1 - 1/c. Uses the table's quad-accurate deltas.
double second_sum_ratio(const PhiTable& t, std::int64_t n_start = 1);

/// | (1/floor(phi(N))) sum dphi(n) a_n  -  boundary - Abel |, the summation
/// by parts identity residual for an arbitrary sequence a.
double summation_by_parts_residual(const PhiTable& t, std::span<const cd> a);

}  // namespace orbitlab
