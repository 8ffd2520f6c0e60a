#include "orbitlab/patterns.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

#include "orbitlab/gowers.hpp"

namespace orbitlab {

namespace {

using u64 = std::uint64_t;

std::int64_t words_for(std::int64_t bits) { return (bits + 63) >> 6; }

// All bit buffers below carry two zero guard words past their logical end,
// so a shifted 64-bit read never needs a bounds check.
inline u64 read_bits(const u64* w, std::int64_t bitpos) {
    const std::int64_t q = bitpos >> 6;
    const int r = static_cast<int>(bitpos & 63);
    if (r == 0) return w[q];
    return (w[q] >> r) | (w[q + 1] << (64 - r));
}

// #{ i in [0, len) : a[i] & b[i+s] & c[i+t] }
std::int64_t and3_popcount(const u64* a, const u64* b, std::int64_t s, const u64* c,
                           std::int64_t t, std::int64_t len) {
    if (len <= 0) return 0;
    std::int64_t count = 0;
    const std::int64_t full = len >> 6;
    const std::int64_t qs = s >> 6, qt = t >> 6;
    const int rs = static_cast<int>(s & 63), rt = static_cast<int>(t & 63);
    const u64* bw = b + qs;
    const u64* cw = c + qt;
    if (rs == 0 && rt == 0) {
        for (std::int64_t w = 0; w < full; ++w) count += std::popcount(a[w] & bw[w] & cw[w]);
    } else if (rt == 0) {
        for (std::int64_t w = 0; w < full; ++w)
            count += std::popcount(a[w] & ((bw[w] >> rs) | (bw[w + 1] << (64 - rs))) & cw[w]);
    } else if (rs == 0) {
        for (std::int64_t w = 0; w < full; ++w)
            count += std::popcount(a[w] & bw[w] & ((cw[w] >> rt) | (cw[w + 1] << (64 - rt))));
    } else {
        for (std::int64_t w = 0; w < full; ++w)
            count += std::popcount(a[w] & ((bw[w] >> rs) | (bw[w + 1] << (64 - rs))) &
                                   ((cw[w] >> rt) | (cw[w + 1] << (64 - rt))));
    }
    const int rem = static_cast<int>(len & 63);
    if (rem) {
        const u64 mask = (u64{1} << rem) - 1;
        const u64 x = a[full] & read_bits(b, full * 64 + s) & read_bits(c, full * 64 + t);
        count += std::popcount(x & mask);
    }
    return count;
}

// sum_{i in [0, len)} s0(i) s1(i+s) s2(i+t) for +-1 signs stored as bits
// (bit = 1 <-> value -1): len - 2 * popcount of the xor.
std::int64_t sign3_sum(const u64* a, const u64* b, std::int64_t s, const u64* c, std::int64_t t,
                       std::int64_t len) {
    if (len <= 0) return 0;
    std::int64_t ones = 0;
    const std::int64_t full = len >> 6;
    const std::int64_t qs = s >> 6, qt = t >> 6;
    const int rs = static_cast<int>(s & 63), rt = static_cast<int>(t & 63);
    const u64* bw = b + qs;
    const u64* cw = c + qt;
    if (rs == 0 && rt == 0) {
        for (std::int64_t w = 0; w < full; ++w) ones += std::popcount(a[w] ^ bw[w] ^ cw[w]);
    } else if (rt == 0) {
        for (std::int64_t w = 0; w < full; ++w)
            ones += std::popcount(a[w] ^ ((bw[w] >> rs) | (bw[w + 1] << (64 - rs))) ^ cw[w]);
    } else if (rs == 0) {
        for (std::int64_t w = 0; w < full; ++w)
            ones += std::popcount(a[w] ^ bw[w] ^ ((cw[w] >> rt) | (cw[w + 1] << (64 - rt))));
    } else {
        for (std::int64_t w = 0; w < full; ++w)
            ones += std::popcount(a[w] ^ ((bw[w] >> rs) | (bw[w + 1] << (64 - rs))) ^
                                  ((cw[w] >> rt) | (cw[w + 1] << (64 - rt))));
    }
    const int rem = static_cast<int>(len & 63);
    if (rem) {
        const u64 mask = (u64{1} << rem) - 1;
        const u64 x = a[full] ^ read_bits(b, full * 64 + s) ^ read_bits(c, full * 64 + t);
        ones += std::popcount(x & mask);
    }
    return len - 2 * ones;
}

std::int64_t sign2_sum(const u64* a, const u64* b, std::int64_t s, std::int64_t len) {
    if (len <= 0) return 0;
    std::int64_t ones = 0;
    const std::int64_t full = len >> 6;
    const std::int64_t qs = s >> 6;
    const int rs = static_cast<int>(s & 63);
    const u64* bw = b + qs;
    if (rs == 0) {
        for (std::int64_t w = 0; w < full; ++w) ones += std::popcount(a[w] ^ bw[w]);
    } else {
        for (std::int64_t w = 0; w < full; ++w)
            ones += std::popcount(a[w] ^ ((bw[w] >> rs) | (bw[w + 1] << (64 - rs))));
    }
    const int rem = static_cast<int>(len & 63);
    if (rem) {
        const u64 mask = (u64{1} << rem) - 1;
        ones += std::popcount((a[full] ^ read_bits(b, full * 64 + s)) & mask);
    }
    return len - 2 * ones;
}

}  // namespace

IntegerSet IntegerSet::empty(std::int64_t N) {
    if (N < 0) throw std::domain_error("IntegerSet: N must be >= 0");
    IntegerSet s;
    s.N = N;
    s.words.assign(static_cast<std::size_t>(words_for(N) + 2), 0);  // guard words
    return s;
}

IntegerSet IntegerSet::full(std::int64_t N) {
    IntegerSet s = empty(N);
    for (std::int64_t x = 1; x <= N; ++x) s.insert(x);
    return s;
}

IntegerSet IntegerSet::from_elements(std::int64_t N, const std::vector<std::int64_t>& xs) {
    IntegerSet s = empty(N);
    for (std::int64_t x : xs) {
        if (x < 1 || x > N) throw std::domain_error("IntegerSet: element outside [1, N]");
        s.insert(x);
    }
    return s;
}

IntegerSet IntegerSet::random(std::int64_t N, double density, Rng& rng) {
    IntegerSet s = empty(N);
    for (std::int64_t x = 1; x <= N; ++x)
        if (rng.uniform01() < density) s.insert(x);
    return s;
}

void IntegerSet::insert(std::int64_t x) {
    words[static_cast<std::size_t>((x - 1) >> 6)] |= u64{1} << ((x - 1) & 63);
}

std::int64_t IntegerSet::size() const {
    std::int64_t c = 0;
    for (u64 w : words) c += std::popcount(w);
    return c;
}

std::vector<std::int64_t> IntegerSet::elements() const {
    std::vector<std::int64_t> out;
    for (std::int64_t x = 1; x <= N; ++x)
        if (contains(x)) out.push_back(x);
    return out;
}

GridSet GridSet::empty(std::int64_t N) {
    if (N < 0) throw std::domain_error("GridSet: N must be >= 0");
    GridSet g;
    g.N = N;
    g.words_per_row = words_for(N) + 2;  // rows carry guard words
    g.words.assign(static_cast<std::size_t>(g.words_per_row * std::max<std::int64_t>(N, 0)), 0);
    return g;
}

GridSet GridSet::full(std::int64_t N) {
    GridSet g = empty(N);
    for (std::int64_t y = 1; y <= N; ++y)
        for (std::int64_t x = 1; x <= N; ++x) g.insert(x, y);
    return g;
}

GridSet GridSet::random(std::int64_t N, double density, Rng& rng) {
    GridSet g = empty(N);
    for (std::int64_t y = 1; y <= N; ++y)
        for (std::int64_t x = 1; x <= N; ++x)
            if (rng.uniform01() < density) g.insert(x, y);
    return g;
}

void GridSet::insert(std::int64_t x, std::int64_t y) {
    words[static_cast<std::size_t>((y - 1) * words_per_row + ((x - 1) >> 6))] |= u64{1} << ((x - 1) & 63);
}

std::int64_t GridSet::size() const {
    std::int64_t c = 0;
    for (u64 w : words) c += std::popcount(w);
    return c;
}

const char* pattern_shape_name(PatternShape s) {
    switch (s) {
        case PatternShape::AP3Sparse: return "ap3-sparse";
        case PatternShape::AP3Full: return "ap3-full";
        case PatternShape::AP3Cyclic: return "ap3-cyclic";
        case PatternShape::CornerSparse: return "corner-sparse";
        case PatternShape::CornerFull: return "corner-full";
    }
    return "?";
}

namespace {

// #{ x : x, x+d, x+2d in A }, exact.
std::int64_t ap3_count_at(const IntegerSet& A, std::int64_t d) {
    return and3_popcount(A.words.data(), A.words.data(), d, A.words.data(), 2 * d, A.N - 2 * d);
}

std::int64_t corner_count_at(const GridSet& A, std::int64_t d) {
    if (d >= A.N) return 0;
    std::int64_t c = 0;
    for (std::int64_t y = 1; y + d <= A.N; ++y)
        c += and3_popcount(A.row(y), A.row(y), d, A.row(y + d), 0, A.N - d);
    return c;
}

}  // namespace

PatternReport count_ap3_sparse(const IntegerSet& A, const RegVarFunction& f, Exec ex) {
    const auto orbit = floor_orbit_upto(f, std::max<std::int64_t>(A.N, 1), ex);
    PatternReport r;
    r.shape = PatternShape::AP3Sparse;
    r.raw_count = block_sum<std::int64_t>(
        0, static_cast<std::int64_t>(orbit.size()),
        [&](std::int64_t i) { return ap3_count_at(A, orbit[static_cast<std::size_t>(i)]); }, ex);
    const double denom = static_cast<double>(A.N) * static_cast<double>(orbit.size());
    r.normalized = denom > 0 ? static_cast<double>(r.raw_count) / denom : 0.0;
    return r;
}

PatternReport count_ap3_full(const IntegerSet& A, Exec ex) {
    PatternReport r;
    r.shape = PatternShape::AP3Full;
    r.raw_count = block_sum<std::int64_t>(
        1, A.N + 1, [&](std::int64_t d) { return ap3_count_at(A, d); }, ex);
    r.normalized = A.N > 0 ? static_cast<double>(r.raw_count) /
                                 (static_cast<double>(A.N) * static_cast<double>(A.N))
                           : 0.0;
    return r;
}

PatternReport count_ap3_cyclic(const IntegerSet& A, std::int64_t q, Exec ex) {
    if (q < 2) throw std::domain_error("count_ap3_cyclic: q must be >= 2");
    // Membership reduced mod q, doubled buffer so rotations are shifted reads.
    const std::int64_t nw = words_for(q);
    std::vector<u64> twice(static_cast<std::size_t>(words_for(2 * q) + 2), 0);
    auto set_bit = [&](std::int64_t i) {
        twice[static_cast<std::size_t>(i >> 6)] |= u64{1} << (i & 63);
    };
    std::vector<u64> base(static_cast<std::size_t>(nw + 2), 0);
    for (std::int64_t x = 1; x <= A.N; ++x)
        if (A.contains(x)) {
            const std::int64_t rsd = x % q;
            base[static_cast<std::size_t>(rsd >> 6)] |= u64{1} << (rsd & 63);
        }
    for (std::int64_t i = 0; i < q; ++i)
        if ((base[static_cast<std::size_t>(i >> 6)] >> (i & 63)) & 1) {
            set_bit(i);
            set_bit(i + q);
        }
    PatternReport r;
    r.shape = PatternShape::AP3Cyclic;
    r.raw_count = block_sum<std::int64_t>(
        0, q,
        [&](std::int64_t n) {
            return and3_popcount(base.data(), twice.data(), n, twice.data(), (2 * n) % q, q);
        },
        ex);
    r.normalized = static_cast<double>(r.raw_count) / (static_cast<double>(q) * static_cast<double>(q));
    return r;
}

PatternReport count_corners_sparse(const GridSet& A, const RegVarFunction& f, Exec ex) {
    const auto orbit = floor_orbit_upto(f, std::max<std::int64_t>(A.N, 1), ex);
    PatternReport r;
    r.shape = PatternShape::CornerSparse;
    r.raw_count = block_sum<std::int64_t>(
        0, static_cast<std::int64_t>(orbit.size()),
        [&](std::int64_t i) { return corner_count_at(A, orbit[static_cast<std::size_t>(i)]); }, ex);
    const double denom =
        static_cast<double>(A.N) * static_cast<double>(A.N) * static_cast<double>(orbit.size());
    r.normalized = denom > 0 ? static_cast<double>(r.raw_count) / denom : 0.0;
    return r;
}

PatternReport count_corners_full(const GridSet& A, Exec ex) {
    PatternReport r;
    r.shape = PatternShape::CornerFull;
    r.raw_count = block_sum<std::int64_t>(
        1, A.N + 1, [&](std::int64_t d) { return corner_count_at(A, d); }, ex);
    const double n = static_cast<double>(A.N);
    r.normalized = A.N > 0 ? static_cast<double>(r.raw_count) / (n * n * n) : 0.0;
    return r;
}

PatternReport sparse_count_decomposition(const IntegerSet& A, const RegVarFunction& f, Exec ex) {
    const std::int64_t N = A.N;
    if (N < 4) throw std::domain_error("sparse_count_decomposition: N must be >= 4");
    const PhiTable t = phi_table(f, N, ex);
    const auto orbit = floor_orbit_upto(f, N, ex);
    const auto scan = scan_orbit_identities(f, N);
    const std::int64_t n_star = std::max(scan.indicator_threshold, scan.monotone_threshold);
    const double phiN = static_cast<double>(t.floor_at(N));
    const double dN = static_cast<double>(N);

    // cnt(n) = #{x : x, x+n, x+2n in A} for every n, exact.
    std::vector<std::int64_t> cnt(static_cast<std::size_t>(N + 1), 0);
#pragma omp parallel for schedule(static) if (ex == Exec::Parallel)
    for (std::int64_t n = 1; n <= N; ++n) cnt[static_cast<std::size_t>(n)] = ap3_count_at(A, n);

    PatternReport r;
    r.shape = PatternShape::AP3Sparse;
    r.raw_count = block_sum<std::int64_t>(
        0, static_cast<std::int64_t>(orbit.size()),
        [&](std::int64_t i) { return cnt[static_cast<std::size_t>(orbit[static_cast<std::size_t>(i)])]; },
        ex);
    const double denom = dN * static_cast<double>(orbit.size());
    r.normalized = denom > 0 ? static_cast<double>(r.raw_count) / denom : 0.0;

    Decomposition d;
    const double mean_full = block_sum<double>(1, N + 1, [&](std::int64_t n) {
                                 return static_cast<double>(cnt[static_cast<std::size_t>(n)]);
                             }) / (dN * dN);
    d.gamma_term = dN * t.delta_at(N) / phiN * mean_full;

    // prefix_cnt(n) = sum_{m<=n} cnt(m)
    std::vector<double> prefix(static_cast<std::size_t>(N + 1), 0.0);
    for (std::int64_t n = 1; n <= N; ++n)
        prefix[static_cast<std::size_t>(n)] =
            prefix[static_cast<std::size_t>(n - 1)] + static_cast<double>(cnt[static_cast<std::size_t>(n)]);
    d.p_term = block_sum<double>(n_star, N, [&](std::int64_t n) {
                   return (t.delta_at(n) - t.delta_at(n + 1)) * prefix[static_cast<std::size_t>(n)];
               }) / (phiN * dN);

    // w_N(n) phrased directly as the sawtooth differences of the table.
    d.error_term = block_sum<double>(1, N + 1, [&](std::int64_t n) {
                       const double w =
                           dN * ((t.frac_at(n + 1) - 0.5) - (t.frac_at(n) - 0.5)) / phiN;
                       return w * static_cast<double>(cnt[static_cast<std::size_t>(n)]);
                   }) / (dN * dN);

    d.residual = r.normalized - d.gamma_term - d.p_term - d.error_term;
    r.decomposition = d;
    return r;
}

IntegerSet greedy_free_set_ap3(std::int64_t N, const RegVarFunction& f) {
    if (N < 1) throw std::domain_error("greedy_free_set_ap3: N must be >= 1");
    const auto orbit = floor_orbit_upto(f, N);
    IntegerSet s = IntegerSet::empty(N);
    for (std::int64_t x = 1; x <= N; ++x) {
        bool blocked = false;
        for (std::int64_t d : orbit) {
            if (2 * d >= x) break;
            if (s.contains(x - d) && s.contains(x - 2 * d)) {
                blocked = true;
                break;
            }
        }
        if (!blocked) s.insert(x);
    }
    return s;
}

GridSet greedy_free_set_corner(std::int64_t N, const RegVarFunction& f) {
    if (N < 1) throw std::domain_error("greedy_free_set_corner: N must be >= 1");
    const auto orbit = floor_orbit_upto(f, N);
    GridSet s = GridSet::empty(N);
    for (std::int64_t y = 1; y <= N; ++y)
        for (std::int64_t x = 1; x <= N; ++x) {
            bool blocked = false;
            for (std::int64_t d : orbit) {
                if (d >= y) break;
                if (s.contains(x, y - d) && x + d <= N && s.contains(x + d, y - d)) {
                    blocked = true;
                    break;
                }
            }
            if (!blocked) s.insert(x, y);
        }
    return s;
}

namespace {

void require_window(const SignalZ& s, std::int64_t lo, std::int64_t hi, const char* what) {
    if (s.window() == 0) return;
    if (s.lo() < lo || s.hi() - 1 > hi)
        throw std::invalid_argument(std::string(what) + ": signal support violates the window");
}

void require_window2(const Signal2D& s, std::int64_t lo, std::int64_t hi, const char* what) {
    if (s.n1 == 0 || s.n2 == 0) return;
    if (s.off1 < lo || s.off1 + s.n1 - 1 > hi || s.off2 < lo || s.off2 + s.n2 - 1 > hi)
        throw std::invalid_argument(std::string(what) + ": signal support violates the window");
}

struct Pm1Bits {
    bool ok = false;
    std::vector<u64> bits;  // bit = 1 <-> value -1
    std::int64_t nwords = 0;
};

// +-1 on the complete window [lo, hi]; anything else disables the fast path.
Pm1Bits pm1_bits(const SignalZ& s, std::int64_t lo, std::int64_t hi) {
    Pm1Bits out;
    if (s.lo() != lo || s.hi() - 1 != hi) return out;
    const std::int64_t len = hi - lo + 1;
    out.nwords = words_for(len);
    out.bits.assign(static_cast<std::size_t>(out.nwords + 2), 0);
    for (std::int64_t i = 0; i < len; ++i) {
        const cd v = s.values[static_cast<std::size_t>(i)];
        if (v.imag() != 0.0 || (v.real() != 1.0 && v.real() != -1.0)) return out;
        if (v.real() < 0.0) out.bits[static_cast<std::size_t>(i >> 6)] |= u64{1} << (i & 63);
    }
    out.ok = true;
    return out;
}

struct Pm1Grid {
    bool ok = false;
    std::vector<u64> bits;  // rows of K bits
    std::int64_t nwords_row = 0;
    std::int64_t rows = 0;
};

Pm1Grid pm1_grid(const Signal2D& s, std::int64_t lo, std::int64_t hi) {
    Pm1Grid out;
    const std::int64_t len = hi - lo + 1;
    if (s.off1 != lo || s.off2 != lo || s.n1 != len || s.n2 != len) return out;
    out.nwords_row = words_for(len) + 2;  // guard words per row
    out.rows = len;
    out.bits.assign(static_cast<std::size_t>(out.nwords_row * len), 0);
    for (std::int64_t y = 0; y < len; ++y)
        for (std::int64_t x = 0; x < len; ++x) {
            const cd v = s.values[static_cast<std::size_t>(y * len + x)];
            if (v.imag() != 0.0 || (v.real() != 1.0 && v.real() != -1.0)) return out;
            if (v.real() < 0.0)
                out.bits[static_cast<std::size_t>(y * out.nwords_row + (x >> 6))] |= u64{1}
                                                                                    << (x & 63);
        }
    out.ok = true;
    return out;
}

}  // namespace

cd trilinear_ap3(const SignalZ& f0, const SignalZ& f1, const SignalZ& f2,
                 std::span<const cd> weight, std::int64_t N, Exec ex) {
    if (static_cast<std::int64_t>(weight.size()) != N)
        throw std::invalid_argument("trilinear_ap3: weight must have length N");
    require_window(f0, -2 * N, 2 * N, "trilinear_ap3");
    require_window(f1, -2 * N, 2 * N, "trilinear_ap3");
    require_window(f2, -2 * N, 2 * N, "trilinear_ap3");
    const double norm = static_cast<double>(4 * N + 1) * static_cast<double>(N);

    const Pm1Bits b0 = pm1_bits(f0, -2 * N, 2 * N);
    if (b0.ok) {
        const Pm1Bits b1 = pm1_bits(f1, -2 * N, 2 * N);
        const Pm1Bits b2 = pm1_bits(f2, -2 * N, 2 * N);
        if (b1.ok && b2.ok) {
            const cd total = block_sum<cd>(
                1, N + 1,
                [&](std::int64_t n) {
                    const std::int64_t g = sign3_sum(b0.bits.data(), b1.bits.data(), n,
                                                     b2.bits.data(), 2 * n, 4 * N + 1 - 2 * n);
                    return weight[static_cast<std::size_t>(n - 1)] * static_cast<double>(g);
                },
                ex);
            return total / norm;
        }
    }

    const cd total = block_sum<cd>(
        1, N + 1,
        [&](std::int64_t n) {
            const cd w = weight[static_cast<std::size_t>(n - 1)];
            if (w == cd{}) return cd{};
            const std::int64_t lo = std::max({f0.lo(), f1.lo() - n, f2.lo() - 2 * n});
            const std::int64_t hi = std::min({f0.hi(), f1.hi() - n, f2.hi() - 2 * n});
            cd inner{};
            for (std::int64_t x = lo; x < hi; ++x)
                inner += f0.values[static_cast<std::size_t>(x - f0.offset)] *
                         f1.values[static_cast<std::size_t>(x + n - f1.offset)] *
                         f2.values[static_cast<std::size_t>(x + 2 * n - f2.offset)];
            return w * inner;
        },
        ex);
    return total / norm;
}

cd trilinear_corner(const Signal2D& f0, const Signal2D& f1, const Signal2D& f2,
                    std::span<const cd> weight, std::int64_t N, Exec ex) {
    if (static_cast<std::int64_t>(weight.size()) != N)
        throw std::invalid_argument("trilinear_corner: weight must have length N");
    require_window2(f0, -2 * N, 2 * N, "trilinear_corner");
    require_window2(f1, -2 * N, 2 * N, "trilinear_corner");
    require_window2(f2, -2 * N, 2 * N, "trilinear_corner");
    const double K = static_cast<double>(4 * N + 1);
    const double norm = K * K * static_cast<double>(N);

    const Pm1Grid g0 = pm1_grid(f0, -2 * N, 2 * N);
    if (g0.ok) {
        const Pm1Grid g1 = pm1_grid(f1, -2 * N, 2 * N);
        const Pm1Grid g2 = pm1_grid(f2, -2 * N, 2 * N);
        if (g1.ok && g2.ok) {
            const std::int64_t wpr = g0.nwords_row;
            const cd total = block_sum<cd>(
                1, N + 1,
                [&](std::int64_t n) {
                    const std::int64_t len = 4 * N + 1 - n;
                    std::int64_t g = 0;
                    for (std::int64_t y = 0; y < len; ++y)
                        g += sign3_sum(g0.bits.data() + y * wpr, g1.bits.data() + y * wpr, n,
                                       g2.bits.data() + (y + n) * wpr, 0, len);
                    return weight[static_cast<std::size_t>(n - 1)] * static_cast<double>(g);
                },
                ex);
            return total / norm;
        }
    }

    const cd total = block_sum<cd>(
        1, N + 1,
        [&](std::int64_t n) {
            const cd w = weight[static_cast<std::size_t>(n - 1)];
            if (w == cd{}) return cd{};
            const std::int64_t lo1 = std::max(f0.off1, f1.off1 - n);
            const std::int64_t hi1 = std::min(f0.off1 + f0.n1, f1.off1 + f1.n1 - n);
            const std::int64_t lo2 = std::max(f0.off2, f2.off2 - n);
            const std::int64_t hi2 = std::min(f0.off2 + f0.n2, f2.off2 + f2.n2 - n);
            cd inner{};
            for (std::int64_t x2 = lo2; x2 < hi2; ++x2)
                for (std::int64_t x1 = lo1; x1 < hi1; ++x1)
                    inner += f0.at(x1, x2) * f1.at(x1 + n, x2) * f2.at(x1, x2 + n);
            return w * inner;
        },
        ex);
    return total / norm;
}

cd trilinear_square(const SignalZ& f0, const SignalZ& f1, std::span<const cd> weight,
                    std::int64_t N, Exec ex) {
    if (static_cast<std::int64_t>(weight.size()) != N)
        throw std::invalid_argument("trilinear_square: weight must have length N");
    const std::int64_t R = 2 * N * N;
    require_window(f0, -R, R, "trilinear_square");
    require_window(f1, -R, R, "trilinear_square");
    const double norm = static_cast<double>(2 * R + 1) * static_cast<double>(N);

    const Pm1Bits b0 = pm1_bits(f0, -R, R);
    if (b0.ok) {
        const Pm1Bits b1 = pm1_bits(f1, -R, R);
        if (b1.ok) {
            const cd total = block_sum<cd>(
                1, N + 1,
                [&](std::int64_t n) {
                    const std::int64_t g = sign2_sum(b0.bits.data(), b1.bits.data(), n * n,
                                                     2 * R + 1 - n * n);
                    return weight[static_cast<std::size_t>(n - 1)] * static_cast<double>(g);
                },
                ex);
            return total / norm;
        }
    }

    const cd total = block_sum<cd>(
        1, N + 1,
        [&](std::int64_t n) {
            const cd w = weight[static_cast<std::size_t>(n - 1)];
            if (w == cd{}) return cd{};
            const std::int64_t sq = n * n;
            const std::int64_t lo = std::max(f0.lo(), f1.lo() - sq);
            const std::int64_t hi = std::min(f0.hi(), f1.hi() - sq);
            cd inner{};
            for (std::int64_t x = lo; x < hi; ++x)
                inner += f0.values[static_cast<std::size_t>(x - f0.offset)] *
                         f1.values[static_cast<std::size_t>(x + sq - f1.offset)];
            return w * inner;
        },
        ex);
    return total / norm;
}

namespace {

std::vector<cd> kernel_weight(const WeightKernel& k) {
    std::vector<cd> w(k.w.size());
    for (std::size_t i = 0; i < k.w.size(); ++i) w[i] = cd{k.w[i], 0.0};
    return w;
}

}  // namespace

cd trilinear_weighted_ap3(const SignalZ& f0, const SignalZ& f1, const SignalZ& f2,
                          const WeightKernel& k, Exec ex) {
    const auto w = kernel_weight(k);
    return trilinear_ap3(f0, f1, f2, w, k.params.N, ex);
}

cd trilinear_weighted_corner(const Signal2D& f0, const Signal2D& f1, const Signal2D& f2,
                             const WeightKernel& k, Exec ex) {
    const auto w = kernel_weight(k);
    return trilinear_corner(f0, f1, f2, w, k.params.N, ex);
}

cd trilinear_weighted_square(const SignalZ& f0, const SignalZ& f1, const WeightKernel& k, Exec ex) {
    const auto w = kernel_weight(k);
    return trilinear_square(f0, f1, w, k.params.N, ex);
}

namespace {

void require_bounded(const SignalZ& s, const char* what) {
    for (const cd& v : s.values)
        if (std::abs(v) > 1.0 + 1e-9)
            throw std::invalid_argument(std::string(what) + ": signal is not 1-bounded");
}

void require_bounded2(const Signal2D& s, const char* what) {
    for (const cd& v : s.values)
        if (std::abs(v) > 1.0 + 1e-9)
            throw std::invalid_argument(std::string(what) + ": signal is not 1-bounded");
}

std::vector<cd> weight_from_signal(const SignalZ& f3, std::int64_t N, const char* what) {
    if (f3.window() != 0 && (f3.lo() < 1 || f3.hi() - 1 > N))
        throw std::invalid_argument(std::string(what) + ": f3 must be supported in [1, N]");
    std::vector<cd> w(static_cast<std::size_t>(N));
    for (std::int64_t n = 1; n <= N; ++n) w[static_cast<std::size_t>(n - 1)] = f3.at(n);
    return w;
}

double ratio_of(double form_abs, double norm3, std::int64_t N, const char* what) {
    if (norm3 == 0.0) {
        if (form_abs > 1e-12)
            throw std::runtime_error(std::string(what) + ": zero U^3 norm with a nonzero form");
        return 0.0;
    }
    return form_abs * std::sqrt(static_cast<double>(N)) / norm3;
}

}  // namespace

double u3_control_ratio_ap3(const SignalZ& f0, const SignalZ& f1, const SignalZ& f2,
                            const SignalZ& f3, std::int64_t N, Exec ex) {
    require_bounded(f0, "u3_control_ratio");
    require_bounded(f1, "u3_control_ratio");
    require_bounded(f2, "u3_control_ratio");
    require_bounded(f3, "u3_control_ratio");
    const auto w = weight_from_signal(f3, N, "u3_control_ratio");
    const cd form = trilinear_ap3(f0, f1, f2, w, N, ex);
    return ratio_of(std::abs(form), gowers_norm(f3, 3, ex), N, "u3_control_ratio");
}

double u3_control_ratio_corner(const Signal2D& f0, const Signal2D& f1, const Signal2D& f2,
                               const SignalZ& f3, std::int64_t N, Exec ex) {
    require_bounded2(f0, "u3_control_ratio");
    require_bounded2(f1, "u3_control_ratio");
    require_bounded2(f2, "u3_control_ratio");
    require_bounded(f3, "u3_control_ratio");
    const auto w = weight_from_signal(f3, N, "u3_control_ratio");
    const cd form = trilinear_corner(f0, f1, f2, w, N, ex);
    return ratio_of(std::abs(form), gowers_norm(f3, 3, ex), N, "u3_control_ratio");
}

double u3_control_ratio_square(const SignalZ& f0, const SignalZ& f1, const SignalZ& f3,
                               std::int64_t N, Exec ex) {
    require_bounded(f0, "u3_control_ratio");
    require_bounded(f1, "u3_control_ratio");
    require_bounded(f3, "u3_control_ratio");
    const auto w = weight_from_signal(f3, N, "u3_control_ratio");
    const cd form = trilinear_square(f0, f1, w, N, ex);
    return ratio_of(std::abs(form), gowers_norm(f3, 3, ex), N, "u3_control_ratio");
}

namespace {

double check_bound_args(double N, double C, double chi, const char* what) {
    if (!(C > 0.0) || !(chi > 0.0)) throw std::domain_error(std::string(what) + ": C, chi must be > 0");
    const double e = std::exp(1.0);
    if (!(N >= e * (1.0 - 1e-12)))
        throw std::domain_error(std::string(what) + ": N must be >= e");
    return std::log(N);
}

}  // namespace

double roth_bound(double N, double C, double chi) {
    const double L = check_bound_args(N, C, chi, "roth_bound");
    return C * std::exp(-chi * std::pow(L, 1.0 / 9.0));
}

double corner_bound(double N, double C, double chi) {
    const double L = check_bound_args(N, C, chi, "corner_bound");
    return C * std::exp(-chi * std::pow(L, 1.0 / 600.0));
}

double alpha3_density(double M, double C1, double tau) {
    const double L = check_bound_args(M, C1, tau, "alpha3_density");
    return C1 * std::exp(-tau * std::pow(L, 1.0 / 9.0));
}

double alpha3_transfer(double N, double chi, double C1, double tau) {
    check_bound_args(N, C1, tau, "alpha3_transfer");
    if (!(chi > 0.0)) throw std::domain_error("alpha3_transfer: chi must be > 0");
    return 6.0 * C1 * std::exp(-tau * std::pow(chi / 4.0 * std::log(N), 1.0 / 9.0));
}

double roth_primes_bound(double N, double C, double chi) {
    const double L = check_bound_args(N, C, chi, "roth_primes_bound");
    return C * L * std::exp(-chi * std::pow(L, 1.0 / 9.0));
}

}  // namespace orbitlab
