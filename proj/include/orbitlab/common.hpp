#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace orbitlab {

using cd = std::complex<double>;

/// Raised when a floating-point computation cannot resolve a floor/integer
/// decision even after escalating to extended precision.
struct PrecisionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Raised when an iterative solver (bracketing / Newton) exhausts its budget.
struct ConvergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Raised when a resonance test lands in the ambiguous band between the
/// exact-resonance tolerance and the clearly-non-resonant regime.
struct AmbiguousResonanceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Execution lane. Parallel uses OpenMP with a fixed block decomposition so
/// results are bit-identical to the serial lane regardless of thread count.
enum class Exec { Serial, Parallel };

namespace detail {
constexpr std::int64_t kSumBlock = 4096;

template <class T, class F>
T pairwise_sum_range(std::int64_t lo, std::int64_t hi, F&& f) {
    if (hi - lo <= 32) {
        T s{};
        for (std::int64_t i = lo; i < hi; ++i) s += f(i);
        return s;
    }
    const std::int64_t mid = lo + (hi - lo) / 2;
    return pairwise_sum_range<T>(lo, mid, f) + pairwise_sum_range<T>(mid, hi, f);
}

template <class T>
T pairwise_merge(const std::vector<T>& parts, std::size_t lo, std::size_t hi) {
    if (hi - lo == 1) return parts[lo];
    const std::size_t mid = lo + (hi - lo) / 2;
    return pairwise_merge(parts, lo, mid) + pairwise_merge(parts, mid, hi);
}
}  // namespace detail

/// Deterministic tree-structured sum of f(lo), ..., f(hi-1).
///
/// The index space is cut into fixed blocks of 4096; blocks are summed with a
/// fixed pairwise tree and merged with another fixed tree, so the result does
/// not depend on Exec or on OMP_NUM_THREADS.
template <class T, class F>
T block_sum(std::int64_t lo, std::int64_t hi, F&& f, Exec ex = Exec::Parallel) {
    if (hi <= lo) return T{};
    const std::int64_t n = hi - lo;
    const std::int64_t nblocks = (n + detail::kSumBlock - 1) / detail::kSumBlock;
    if (nblocks == 1) return detail::pairwise_sum_range<T>(lo, hi, f);
    std::vector<T> parts(static_cast<std::size_t>(nblocks));
    if (ex == Exec::Parallel) {
#pragma omp parallel for schedule(static)
        for (std::int64_t b = 0; b < nblocks; ++b) {
            const std::int64_t blo = lo + b * detail::kSumBlock;
            const std::int64_t bhi = std::min(hi, blo + detail::kSumBlock);
            parts[static_cast<std::size_t>(b)] = detail::pairwise_sum_range<T>(blo, bhi, f);
        }
    } else {
        for (std::int64_t b = 0; b < nblocks; ++b) {
            const std::int64_t blo = lo + b * detail::kSumBlock;
            const std::int64_t bhi = std::min(hi, blo + detail::kSumBlock);
            parts[static_cast<std::size_t>(b)] = detail::pairwise_sum_range<T>(blo, bhi, f);
        }
    }
    return detail::pairwise_merge(parts, 0, parts.size());
}

/// Pairwise sum of an already materialized array.
template <class T>
T pairwise_sum(const std::vector<T>& v, Exec ex = Exec::Serial) {
    return block_sum<T>(0, static_cast<std::int64_t>(v.size()),
                        [&](std::int64_t i) { return v[static_cast<std::size_t>(i)]; }, ex);
}

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// xoshiro256** seeded through splitmix64. Splittable: child streams are
/// derived from (seed, stream id) so experiment cells are independent and
/// reproducible regardless of evaluation order.
struct Rng {
    std::uint64_t s[4];

    static Rng seeded(std::uint64_t seed) {
        Rng r;
        std::uint64_t sm = seed;
        for (auto& w : r.s) w = splitmix64(sm);
        return r;
    }

    Rng split(std::uint64_t stream) const {
        std::uint64_t sm = s[0] ^ (0x9e3779b97f4a7c15ULL * (stream + 1));
        Rng r;
        for (auto& w : r.s) w = splitmix64(sm);
        return r;
    }

    std::uint64_t next() {
        auto rotl = [](std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); };
        const std::uint64_t result = rotl(s[1] * 5, 7) * 9;
        const std::uint64_t t = s[1] << 17;
        s[2] ^= s[0];
        s[3] ^= s[1];
        s[1] ^= s[2];
        s[0] ^= s[3];
        s[2] ^= t;
        s[3] = rotl(s[3], 45);
        return result;
    }

    /// Uniform in [0, 1), 53-bit mantissa, identical on any platform.
    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Uniform in {-1, +1}.
    double pm1() { return (next() & 1) ? 1.0 : -1.0; }

    std::int64_t below(std::int64_t n) { return static_cast<std::int64_t>(next() % static_cast<std::uint64_t>(n)); }
};

}  // namespace orbitlab
