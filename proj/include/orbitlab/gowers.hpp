#pragma once

#include <cstdint>

#include "orbitlab/common.hpp"
#include "orbitlab/signal.hpp"

namespace orbitlab {

/// Delta_h f(x) = f(x) conj(f(x+h)).
SignalZ difference(const SignalZ& f, std::int64_t h);

/// ||f||_{U^2}^4 via the additive-quadruple identity: the signal is zero
/// padded to a power of two >= 2W-1 (no wraparound) and the energy is
/// (1/K) sum_j |F_j|^4.
double u2_fourth(const SignalZ& f);

/// Direct triple loop over (x, h1, h2); reference oracle, window <= 128.
double u2_fourth_bruteforce(const SignalZ& f);

/// ||f||_{U^3}^8 = sum_h ||Delta_h f||_{U^2}^4. The h > 0 and h < 0 halves
/// agree exactly (Delta_{-h} f is a translated conjugate of Delta_h f), so
/// only one sign is evaluated. Window capped at 2^20.
double u3_eighth(const SignalZ& f, Exec ex = Exec::Parallel);

/// Direct sum over (x, h1, h2, h3); reference oracle, window <= 64.
double u3_eighth_bruteforce(const SignalZ& f);

/// (u2_fourth)^(1/4) or (u3_eighth)^(1/8); s in {2, 3}.
double gowers_norm(const SignalZ& f, int s, Exec ex = Exec::Parallel);

/// mu_N(n) = (N - |n|)/N^2 on |n| <= N-1, else 0.
double mu_weight(std::int64_t N, std::int64_t n);

}  // namespace orbitlab
