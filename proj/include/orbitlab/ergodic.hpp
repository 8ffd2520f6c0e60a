#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "orbitlab/common.hpp"
#include "orbitlab/kernels.hpp"
#include "orbitlab/regvar.hpp"

namespace orbitlab {

/// Z_q^d (d in {1,2}) with the commuting translations T: x -> x+u and
/// S: x -> x+v. Powers are applied by modular reduction of the exponent,
/// never by iteration.
struct FiniteSystem {
    std::int64_t q = 2;
    int d = 1;
    std::array<std::int64_t, 2> u{1, 0};
    std::array<std::int64_t, 2> v{1, 0};

    static FiniteSystem cyclic(std::int64_t q, std::int64_t u, std::int64_t v);
    static FiniteSystem product(std::int64_t q, std::array<std::int64_t, 2> u,
                                std::array<std::int64_t, 2> v);
    std::int64_t points() const { return d == 1 ? q : q * q; }
    std::int64_t index(std::array<std::int64_t, 2> x) const;
    std::array<std::int64_t, 2> step(std::array<std::int64_t, 2> x,
                                     const std::array<std::int64_t, 2>& shift,
                                     std::int64_t times) const;
};

struct FiniteObservable {
    std::vector<cd> values;  // indexed by FiniteSystem::index

    static FiniteObservable indicator_point(const FiniteSystem& sys, std::array<std::int64_t, 2> p);
    static FiniteObservable constant(const FiniteSystem& sys, cd value);
    double sup_norm() const;
    cd mean() const;
};

/// f composed with a translation, i.e. x -> f(x + shift).
FiniteObservable translate(const FiniteSystem& sys, const FiniteObservable& f,
                           std::array<std::int64_t, 2> shift);

struct Fraction {
    std::int64_t num = 0;
    std::int64_t den = 1;
};

/// A rotation angle; rationals supplied as exact fractions take the exact
/// resonance path.
struct RotationCoord {
    double value = 0.0;
    std::optional<Fraction> exact;

    static RotationCoord irrational(double v) { return {v, std::nullopt}; }
    static RotationCoord rational(std::int64_t p, std::int64_t q);
};

/// Two commuting rotations of T^2: T shifts the first coordinate by alpha,
/// S the second by beta; f reads the first coordinate, g the second.
struct TorusSystem {
    RotationCoord alpha, beta;
    double x1 = 0.0, x2 = 0.0;
};

/// Trigonometric polynomial: finitely many Fourier coefficients.
struct TorusObservable {
    std::vector<std::pair<std::int64_t, cd>> coeffs;

    double l1_norm() const;  // certifies the sup-norm bound
    cd eval(double theta) const;
};

enum class OrbitKind { Full, FloorH };
enum class SquareOrbit { Squares, FloorHSquared };

/// (1/|I|) sum_{n in I} f(T^{a(n)} x) g(S^{a(n)} x); I = [N] for Full and
/// N_h cap [N] (as a set) for FloorH.
cd bilinear_average(const FiniteSystem& sys, const FiniteObservable& f, const FiniteObservable& g,
                    OrbitKind orbit, const RegVarFunction* h, std::int64_t N,
                    std::array<std::int64_t, 2> x, Exec ex = Exec::Parallel);
cd bilinear_average(const TorusSystem& sys, const TorusObservable& f, const TorusObservable& g,
                    OrbitKind orbit, const RegVarFunction* h, std::int64_t N,
                    Exec ex = Exec::Parallel);

/// Closed-form Cesaro limit of the full bilinear torus average:
/// sum over resonant pairs k alpha + l beta in Z of f_hat(k) g_hat(l)
/// e(k x1 + l x2). Near-misses inside (1e-10, 1e-6) raise.
cd bilinear_limit_exact(const TorusSystem& sys, const TorusObservable& f,
                        const TorusObservable& g);

/// (1/N) sum_{n<=N} f(T^{a(n)^2} x) with a(n) = n or floor(h(n)).
cd square_orbit_average(const FiniteSystem& sys, const FiniteObservable& f, SquareOrbit orbit,
                        const RegVarFunction* h, std::int64_t N, std::array<std::int64_t, 2> x,
                        Exec ex = Exec::Parallel);
cd square_orbit_average(const TorusSystem& sys, const TorusObservable& f, SquareOrbit orbit,
                        const RegVarFunction* h, std::int64_t N, Exec ex = Exec::Parallel);

/// E_N((f_n))(x) = E_{n in [N]} w_N(n) f_n(x) with f_n = f o T^n . g o S^n.
cd error_term_average(const FiniteSystem& sys, const FiniteObservable& f,
                      const FiniteObservable& g, const WeightKernel& kernel,
                      std::array<std::int64_t, 2> x, Exec ex = Exec::Parallel);
cd error_term_average(const TorusSystem& sys, const TorusObservable& f, const TorusObservable& g,
                      const WeightKernel& kernel, Exec ex = Exec::Parallel);

/// Same error term along the square orbit, f_n = f o T^{n^2}.
cd error_term_average_square(const FiniteSystem& sys, const FiniteObservable& f,
                             const WeightKernel& kernel, std::array<std::int64_t, 2> x,
                             Exec ex = Exec::Parallel);

/// Evaluates op at N_k = floor(lambda^k), k = 0..k_max, deduplicated.
std::vector<std::pair<std::int64_t, cd>> lacunary_sample(
    double lambda, int k_max, const std::function<cd(std::int64_t)>& op);

}  // namespace orbitlab
