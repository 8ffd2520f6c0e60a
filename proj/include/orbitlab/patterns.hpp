#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "orbitlab/common.hpp"
#include "orbitlab/kernels.hpp"
#include "orbitlab/regvar.hpp"
#include "orbitlab/signal.hpp"

namespace orbitlab {

/// Subset of [1, N] as a bitset (bit i-1 <-> integer i).
struct IntegerSet {
    std::int64_t N = 0;
    std::vector<std::uint64_t> words;

    static IntegerSet empty(std::int64_t N);
    static IntegerSet full(std::int64_t N);
    static IntegerSet from_elements(std::int64_t N, const std::vector<std::int64_t>& xs);
    static IntegerSet random(std::int64_t N, double density, Rng& rng);

    bool contains(std::int64_t x) const {
        if (x < 1 || x > N) return false;
        return (words[static_cast<std::size_t>((x - 1) >> 6)] >> ((x - 1) & 63)) & 1;
    }
    void insert(std::int64_t x);
    std::int64_t size() const;
    std::vector<std::int64_t> elements() const;
};

/// Subset of [1, N]^2, one bit row per y.
struct GridSet {
    std::int64_t N = 0;
    std::int64_t words_per_row = 0;
    std::vector<std::uint64_t> words;

    static GridSet empty(std::int64_t N);
    static GridSet full(std::int64_t N);
    static GridSet random(std::int64_t N, double density, Rng& rng);

    const std::uint64_t* row(std::int64_t y) const {  // y in [1, N]
        return words.data() + (y - 1) * words_per_row;
    }
    bool contains(std::int64_t x, std::int64_t y) const {
        if (x < 1 || x > N || y < 1 || y > N) return false;
        return (row(y)[(x - 1) >> 6] >> ((x - 1) & 63)) & 1;
    }
    void insert(std::int64_t x, std::int64_t y);
    std::int64_t size() const;
};

enum class PatternShape { AP3Sparse, AP3Full, AP3Cyclic, CornerSparse, CornerFull };

const char* pattern_shape_name(PatternShape s);

struct Decomposition {
    double gamma_term = 0.0;
    double p_term = 0.0;
    double error_term = 0.0;
    double residual = 0.0;
};

struct PatternReport {
    std::int64_t raw_count = 0;
    double normalized = 0.0;
    PatternShape shape = PatternShape::AP3Full;
    std::optional<Decomposition> decomposition;
};

/// #{(x, d) : d in N_h cap [N], {x, x+d, x+2d} subset A}; patterns leaving
/// [N] count as absent. Normalized by N * |N_h cap [N]|.
PatternReport count_ap3_sparse(const IntegerSet& A, const RegVarFunction& f,
                               Exec ex = Exec::Parallel);

/// Same with d in [N]; normalized by N^2.
PatternReport count_ap3_full(const IntegerSet& A, Exec ex = Exec::Parallel);

/// Count over Z_q x Z_q (n = 0 included), membership reduced mod q.
PatternReport count_ap3_cyclic(const IntegerSet& A, std::int64_t q, Exec ex = Exec::Parallel);

/// Corners (x, y), (x+d, y), (x, y+d) with d in N_h cap [N].
PatternReport count_corners_sparse(const GridSet& A, const RegVarFunction& f,
                                   Exec ex = Exec::Parallel);

/// Corners with d in [N]; normalized by N^3.
PatternReport count_corners_full(const GridSet& A, Exec ex = Exec::Parallel);

/// The change-of-variables split of the sparse 3-AP average: gamma_term is
/// the boundary term of summation by parts, p_term the (nonnegative) Abel
/// remainder from n*, error_term the w_N-weighted average, and residual the
/// leftover, expected to be O(1/phi(N)).
PatternReport sparse_count_decomposition(const IntegerSet& A, const RegVarFunction& f,
                                         Exec ex = Exec::Parallel);

/// Ascending greedy scan admitting a point iff it completes no pattern.
IntegerSet greedy_free_set_ap3(std::int64_t N, const RegVarFunction& f);
GridSet greedy_free_set_corner(std::int64_t N, const RegVarFunction& f);

/// Finitely supported signal on Z^2; row-major with x1 fastest.
struct Signal2D {
    std::int64_t off1 = 0, off2 = 0;
    std::int64_t n1 = 0, n2 = 0;
    std::vector<cd> values;

    Signal2D() = default;
    Signal2D(std::int64_t o1, std::int64_t o2, std::int64_t ext1, std::int64_t ext2)
        : off1(o1), off2(o2), n1(ext1), n2(ext2),
          values(static_cast<std::size_t>(ext1 * ext2)) {}

    cd at(std::int64_t x1, std::int64_t x2) const {
        const std::int64_t i1 = x1 - off1, i2 = x2 - off2;
        if (i1 < 0 || i1 >= n1 || i2 < 0 || i2 >= n2) return {};
        return values[static_cast<std::size_t>(i2 * n1 + i1)];
    }
    cd& ref(std::int64_t x1, std::int64_t x2) {
        return values[static_cast<std::size_t>((x2 - off2) * n1 + (x1 - off1))];
    }
};

/// E_{x in [+-2N], n in [N]} f0(x) f1(x+n) f2(x+2n) weight(n).
/// weight[n-1] is the weight at n. Signals valued +-1 on the full window take
/// an exact popcount path.
cd trilinear_ap3(const SignalZ& f0, const SignalZ& f1, const SignalZ& f2,
                 std::span<const cd> weight, std::int64_t N, Exec ex = Exec::Parallel);

/// E_{x in [+-2N]^2, n in [N]} f0(x) f1(x+n e1) f2(x+n e2) weight(n).
cd trilinear_corner(const Signal2D& f0, const Signal2D& f1, const Signal2D& f2,
                    std::span<const cd> weight, std::int64_t N, Exec ex = Exec::Parallel);

/// E_{x in [+-2N^2], n in [N]} f0(x) f1(x+n^2) weight(n).
cd trilinear_square(const SignalZ& f0, const SignalZ& f1, std::span<const cd> weight,
                    std::int64_t N, Exec ex = Exec::Parallel);

/// The same forms with weight w_N from a built kernel.
cd trilinear_weighted_ap3(const SignalZ& f0, const SignalZ& f1, const SignalZ& f2,
                          const WeightKernel& k, Exec ex = Exec::Parallel);
cd trilinear_weighted_corner(const Signal2D& f0, const Signal2D& f1, const Signal2D& f2,
                             const WeightKernel& k, Exec ex = Exec::Parallel);
cd trilinear_weighted_square(const SignalZ& f0, const SignalZ& f1, const WeightKernel& k,
                             Exec ex = Exec::Parallel);

/// |form| / (N^{-1/2} ||f3||_{U^3}) for 1-bounded inputs; f3 supported in
/// [1, N]. Zero norm with a nonzero form raises.
double u3_control_ratio_ap3(const SignalZ& f0, const SignalZ& f1, const SignalZ& f2,
                            const SignalZ& f3, std::int64_t N, Exec ex = Exec::Parallel);
double u3_control_ratio_corner(const Signal2D& f0, const Signal2D& f1, const Signal2D& f2,
                               const SignalZ& f3, std::int64_t N, Exec ex = Exec::Parallel);
double u3_control_ratio_square(const SignalZ& f0, const SignalZ& f1, const SignalZ& f3,
                               std::int64_t N, Exec ex = Exec::Parallel);

/// C exp(-chi (log N)^(1/9)); N >= e so the exponent stays real-positive.
double roth_bound(double N, double C, double chi);
/// C exp(-chi (log N)^(1/600)).
double corner_bound(double N, double C, double chi);
/// alpha_3(M) = C1 exp(-tau (log M)^(1/9)).
double alpha3_density(double M, double C1, double tau);
/// 6 alpha_3(N^{chi/4}), the density transfer step.
double alpha3_transfer(double N, double chi, double C1, double tau);
/// C log(N) exp(-chi (log N)^(1/9)), the relative-density bound in the primes.
double roth_primes_bound(double N, double C, double chi);

}  // namespace orbitlab
