#include "orbitlab/ergodic.hpp"

#include <quadmath.h>

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace orbitlab {

namespace {
constexpr double kTwoPi = 6.28318530717958647692;

std::int64_t mod_pos(std::int64_t a, std::int64_t q) {
    const std::int64_t r = a % q;
    return r < 0 ? r + q : r;
}

// {a * coord} in [0, 1); exact for rational coords, 128-bit product else
// (a reaches 1e12 on square orbits, past double's exact range).
double frac_mul(__int128 a, const RotationCoord& coord) {
    if (coord.exact) {
        const std::int64_t q = coord.exact->den;
        __int128 am = a % q;
        if (am < 0) am += q;
        const __int128 r = am * coord.exact->num % q;
        const std::int64_t rr = mod_pos(static_cast<std::int64_t>(r), q);
        return static_cast<double>(rr) / static_cast<double>(q);
    }
    const __float128 t = (__float128)a * (__float128)coord.value;
    return static_cast<double>(t - floorq(t));
}

}  // namespace

FiniteSystem FiniteSystem::cyclic(std::int64_t q, std::int64_t u, std::int64_t v) {
    if (q < 2) throw std::domain_error("FiniteSystem: q must be >= 2");
    FiniteSystem s;
    s.q = q;
    s.d = 1;
    s.u = {mod_pos(u, q), 0};
    s.v = {mod_pos(v, q), 0};
    return s;
}

FiniteSystem FiniteSystem::product(std::int64_t q, std::array<std::int64_t, 2> u,
                                   std::array<std::int64_t, 2> v) {
    if (q < 2) throw std::domain_error("FiniteSystem: q must be >= 2");
    FiniteSystem s;
    s.q = q;
    s.d = 2;
    s.u = {mod_pos(u[0], q), mod_pos(u[1], q)};
    s.v = {mod_pos(v[0], q), mod_pos(v[1], q)};
    return s;
}

std::int64_t FiniteSystem::index(std::array<std::int64_t, 2> x) const {
    const std::int64_t a = mod_pos(x[0], q);
    if (d == 1) return a;
    return mod_pos(x[1], q) * q + a;
}

std::array<std::int64_t, 2> FiniteSystem::step(std::array<std::int64_t, 2> x,
                                               const std::array<std::int64_t, 2>& shift,
                                               std::int64_t times) const {
    const std::int64_t t = mod_pos(times, q);
    return {mod_pos(x[0] + t * shift[0], q), mod_pos(x[1] + t * shift[1], q)};
}

FiniteObservable FiniteObservable::indicator_point(const FiniteSystem& sys,
                                                   std::array<std::int64_t, 2> p) {
    FiniteObservable f;
    f.values.assign(static_cast<std::size_t>(sys.points()), cd{});
    f.values[static_cast<std::size_t>(sys.index(p))] = cd{1.0, 0.0};
    return f;
}

FiniteObservable FiniteObservable::constant(const FiniteSystem& sys, cd value) {
    FiniteObservable f;
    f.values.assign(static_cast<std::size_t>(sys.points()), value);
    return f;
}

double FiniteObservable::sup_norm() const {
    double m = 0.0;
    for (const cd& v : values) m = std::max(m, std::abs(v));
    return m;
}

cd FiniteObservable::mean() const {
    cd s{};
    for (const cd& v : values) s += v;
    return s / static_cast<double>(values.size());
}

FiniteObservable translate(const FiniteSystem& sys, const FiniteObservable& f,
                           std::array<std::int64_t, 2> shift) {
    FiniteObservable g;
    g.values.resize(f.values.size());
    if (sys.d == 1) {
        for (std::int64_t x = 0; x < sys.q; ++x)
            g.values[static_cast<std::size_t>(x)] =
                f.values[static_cast<std::size_t>(mod_pos(x + shift[0], sys.q))];
    } else {
        for (std::int64_t y = 0; y < sys.q; ++y)
            for (std::int64_t x = 0; x < sys.q; ++x)
                g.values[static_cast<std::size_t>(y * sys.q + x)] = f.values[static_cast<std::size_t>(
                    mod_pos(y + shift[1], sys.q) * sys.q + mod_pos(x + shift[0], sys.q))];
    }
    return g;
}

RotationCoord RotationCoord::rational(std::int64_t p, std::int64_t q) {
    if (q < 1) throw std::domain_error("RotationCoord: denominator must be >= 1");
    const std::int64_t g = std::gcd(p < 0 ? -p : p, q);
    RotationCoord c;
    c.exact = Fraction{p / (g ? g : 1), q / (g ? g : 1)};
    c.value = static_cast<double>(p) / static_cast<double>(q);
    return c;
}

double TorusObservable::l1_norm() const {
    double s = 0.0;
    for (const auto& [k, v] : coeffs) s += std::abs(v);
    return s;
}

cd TorusObservable::eval(double theta) const {
    cd s{};
    for (const auto& [k, v] : coeffs)
        s += v * std::polar(1.0, kTwoPi * static_cast<double>(k) * theta);
    return s;
}

namespace {

cd finite_pair_at(const FiniteSystem& sys, const FiniteObservable& f, const FiniteObservable& g,
                  std::array<std::int64_t, 2> x, std::int64_t a) {
    const auto xt = sys.step(x, sys.u, a);
    const auto xs = sys.step(x, sys.v, a);
    return f.values[static_cast<std::size_t>(sys.index(xt))] *
           g.values[static_cast<std::size_t>(sys.index(xs))];
}

cd torus_pair_at(const TorusSystem& sys, const TorusObservable& f, const TorusObservable& g,
                 std::int64_t a) {
    const double t1 = sys.x1 + frac_mul(a, sys.alpha);
    const double t2 = sys.x2 + frac_mul(a, sys.beta);
    return f.eval(t1) * g.eval(t2);
}

}  // namespace

cd bilinear_average(const FiniteSystem& sys, const FiniteObservable& f, const FiniteObservable& g,
                    OrbitKind orbit, const RegVarFunction* h, std::int64_t N,
                    std::array<std::int64_t, 2> x, Exec ex) {
    if (N < 1) throw std::domain_error("bilinear_average: N must be >= 1");
    if (orbit == OrbitKind::Full) {
        const cd s = block_sum<cd>(
            1, N + 1, [&](std::int64_t n) { return finite_pair_at(sys, f, g, x, n); }, ex);
        return s / static_cast<double>(N);
    }
    if (h == nullptr) throw std::invalid_argument("bilinear_average: FloorH needs h");
    const auto orb = floor_orbit_upto(*h, N, ex);
    if (orb.empty()) return {};
    const cd s = block_sum<cd>(
        0, static_cast<std::int64_t>(orb.size()),
        [&](std::int64_t i) { return finite_pair_at(sys, f, g, x, orb[static_cast<std::size_t>(i)]); },
        ex);
    return s / static_cast<double>(orb.size());
}

cd bilinear_average(const TorusSystem& sys, const TorusObservable& f, const TorusObservable& g,
                    OrbitKind orbit, const RegVarFunction* h, std::int64_t N, Exec ex) {
    if (N < 1) throw std::domain_error("bilinear_average: N must be >= 1");
    if (orbit == OrbitKind::Full) {
        const cd s = block_sum<cd>(
            1, N + 1, [&](std::int64_t n) { return torus_pair_at(sys, f, g, n); }, ex);
        return s / static_cast<double>(N);
    }
    if (h == nullptr) throw std::invalid_argument("bilinear_average: FloorH needs h");
    const auto orb = floor_orbit_upto(*h, N, ex);
    if (orb.empty()) return {};
    const cd s = block_sum<cd>(
        0, static_cast<std::int64_t>(orb.size()),
        [&](std::int64_t i) { return torus_pair_at(sys, f, g, orb[static_cast<std::size_t>(i)]); }, ex);
    return s / static_cast<double>(orb.size());
}

cd bilinear_limit_exact(const TorusSystem& sys, const TorusObservable& f,
                        const TorusObservable& g) {
    cd limit{};
    for (const auto& [k, fk] : f.coeffs) {
        for (const auto& [l, gl] : g.coeffs) {
            bool resonant;
            if (sys.alpha.exact && sys.beta.exact) {
                const std::int64_t q1 = sys.alpha.exact->den, q2 = sys.beta.exact->den;
                const __int128 num = (__int128)k * sys.alpha.exact->num * q2 +
                                     (__int128)l * sys.beta.exact->num * q1;
                resonant = num % ((__int128)q1 * q2) == 0;
            } else {
                const double t = static_cast<double>(k) * sys.alpha.value +
                                 static_cast<double>(l) * sys.beta.value;
                const double dist = std::abs(t - std::round(t));
                if (dist > 1e-10 && dist < 1e-6)
                    throw AmbiguousResonanceError(
                        "bilinear_limit_exact: k alpha + l beta is too close to an integer to classify");
                resonant = dist <= 1e-10;
            }
            if (resonant)
                limit += fk * gl *
                         std::polar(1.0, kTwoPi * (static_cast<double>(k) * sys.x1 +
                                                   static_cast<double>(l) * sys.x2));
        }
    }
    return limit;
}

cd square_orbit_average(const FiniteSystem& sys, const FiniteObservable& f, SquareOrbit orbit,
                        const RegVarFunction* h, std::int64_t N, std::array<std::int64_t, 2> x,
                        Exec ex) {
    if (N < 1) throw std::domain_error("square_orbit_average: N must be >= 1");
    if (orbit == SquareOrbit::FloorHSquared && h == nullptr)
        throw std::invalid_argument("square_orbit_average: FloorHSquared needs h");
    const cd s = block_sum<cd>(
        1, N + 1,
        [&](std::int64_t n) {
            const std::int64_t a = orbit == SquareOrbit::Squares ? n : floor_h(*h, n);
            // reduce a mod q before squaring so a^2 never overflows
            const std::int64_t am = mod_pos(a, sys.q);
            const auto xt = sys.step(x, sys.u, am * am);
            return f.values[static_cast<std::size_t>(sys.index(xt))];
        },
        ex);
    return s / static_cast<double>(N);
}

cd square_orbit_average(const TorusSystem& sys, const TorusObservable& f, SquareOrbit orbit,
                        const RegVarFunction* h, std::int64_t N, Exec ex) {
    if (N < 1) throw std::domain_error("square_orbit_average: N must be >= 1");
    if (orbit == SquareOrbit::FloorHSquared && h == nullptr)
        throw std::invalid_argument("square_orbit_average: FloorHSquared needs h");
    const cd s = block_sum<cd>(
        1, N + 1,
        [&](std::int64_t n) {
            const std::int64_t a = orbit == SquareOrbit::Squares ? n : floor_h(*h, n);
            const double theta = sys.x1 + frac_mul((__int128)a * a, sys.alpha);
            return f.eval(theta);
        },
        ex);
    return s / static_cast<double>(N);
}

cd error_term_average(const FiniteSystem& sys, const FiniteObservable& f,
                      const FiniteObservable& g, const WeightKernel& kernel,
                      std::array<std::int64_t, 2> x, Exec ex) {
    const std::int64_t N = kernel.params.N;
    const cd s = block_sum<cd>(
        1, N + 1,
        [&](std::int64_t n) {
            return kernel.w[static_cast<std::size_t>(n - 1)] * finite_pair_at(sys, f, g, x, n);
        },
        ex);
    return s / static_cast<double>(N);
}

cd error_term_average(const TorusSystem& sys, const TorusObservable& f, const TorusObservable& g,
                      const WeightKernel& kernel, Exec ex) {
    const std::int64_t N = kernel.params.N;
    const cd s = block_sum<cd>(
        1, N + 1,
        [&](std::int64_t n) {
            return kernel.w[static_cast<std::size_t>(n - 1)] * torus_pair_at(sys, f, g, n);
        },
        ex);
    return s / static_cast<double>(N);
}

cd error_term_average_square(const FiniteSystem& sys, const FiniteObservable& f,
                             const WeightKernel& kernel, std::array<std::int64_t, 2> x, Exec ex) {
    const std::int64_t N = kernel.params.N;
    const cd s = block_sum<cd>(
        1, N + 1,
        [&](std::int64_t n) {
            const std::int64_t am = mod_pos(n, sys.q);
            const auto xt = sys.step(x, sys.u, am * am);
            return kernel.w[static_cast<std::size_t>(n - 1)] *
                   f.values[static_cast<std::size_t>(sys.index(xt))];
        },
        ex);
    return s / static_cast<double>(N);
}

std::vector<std::pair<std::int64_t, cd>> lacunary_sample(
    double lambda, int k_max, const std::function<cd(std::int64_t)>& op) {
    if (!(lambda > 1.0 && lambda <= 2.0))
        throw std::domain_error("lacunary_sample: lambda must lie in (1, 2]");
    std::vector<std::pair<std::int64_t, cd>> out;
    double p = 1.0;
    std::int64_t prev = 0;
    for (int k = 0; k <= k_max; ++k) {
        const std::int64_t Nk = static_cast<std::int64_t>(std::floor(p));
        if (Nk != prev) {
            out.emplace_back(Nk, op(Nk));
            prev = Nk;
        }
        p *= lambda;
    }
    return out;
}

}  // namespace orbitlab
