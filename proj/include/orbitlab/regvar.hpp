#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "orbitlab/common.hpp"

namespace orbitlab {

enum class Family { PurePower, PowerLog, PowerExpLog, PowerIterLog, XLogX };

const char* family_name(Family f);

/// A c-regularly varying orbit generator h. Supported shapes:
///
///   PurePower      h(x) = C x^c
///   PowerLog       h(x) = C x^c (log x)^a
///   PowerExpLog    h(x) = C x^c exp(a (log x)^b),  b in (0,1)
///   PowerIterLog   h(x) = C x^c log(log(...log x)),  k iterations
///   XLogX          h(x) = C x log x
///
/// h is evaluated exactly on [x0, inf); on [1, x0) it is replaced by the
/// increasing linear segment through (1, 1) and (x0, h(x0)), which keeps
/// orbit enumeration total without affecting any asymptotic quantity.
struct RegVarFunction {
    Family family = Family::PurePower;
    double c = 1.5;
    double scale = 1.0;
    double a = 0.0;  // PowerLog / PowerExpLog exponent
    double b = 0.5;  // PowerExpLog inner exponent
    int k = 1;       // PowerIterLog iteration count
    double x0 = 0.0;  // <= 0 means choose per family at construction
    double eval_floor_guard = 1e-8;

    // derived at construction
    double h_x0 = 1.0;
    double ext_slope = 0.0;  // slope of the linear extension, 0 when x0 == 1
};

RegVarFunction make_pure_power(double c, double scale = 1.0);
RegVarFunction make_power_log(double c, double a, double scale = 1.0);
RegVarFunction make_power_exp_log(double c, double a, double b, double scale = 1.0);
RegVarFunction make_power_iter_log(double c, int k, double scale = 1.0);
RegVarFunction make_xlogx(double scale = 1.0);

/// Parses the CLI grammar `family(:key=value(,key=value)*)?` with families
/// power, powerlog, powerexplog, poweriterlog, xlogx and keys c, a, b, k,
/// scale. Throws std::invalid_argument on malformed input.
RegVarFunction parse_function_spec(const std::string& spec);

double eval_h(const RegVarFunction& f, double x);
double eval_h_deriv(const RegVarFunction& f, double x);

/// Compositional inverse: returns x with h(x) = y to relative residual 1e-13.
double inverse_phi(const RegVarFunction& f, double y);

/// floor(h(k)) with the near-integer guard: double evaluation first, escalated
/// to 128-bit floats when within eval_floor_guard of an integer. Throws
/// PrecisionError when even extended precision cannot classify the value.
std::int64_t floor_h(const RegVarFunction& f, std::int64_t k);

/// floor(-phi(n)) - floor(-phi(n+1)), the sawtooth-ready indicator formula.
std::int64_t indicator_formula(const RegVarFunction& f, std::int64_t n);

/// Membership in N_h = { floor(h(k)) : k in N }. Evaluates both the indicator
/// formula and the candidate check k = ceil(phi(n)), floor(h(k)) == n, and
/// throws if the two routes disagree.
bool is_member(const RegVarFunction& f, std::int64_t n);

/// N_h intersected with [1, N], ascending, deduplicated.
std::vector<std::int64_t> floor_orbit_upto(const RegVarFunction& f, std::int64_t N,
                                           Exec ex = Exec::Parallel);

/// phi(n+1) - phi(n).
double delta_phi(const RegVarFunction& f, std::int64_t n);

/// floor(phi(n)) with the near-integer guard.
std::int64_t floor_phi(const RegVarFunction& f, std::int64_t n);

/// Per-n table of phi values with quad-precision differences. delta[n-1] is
/// phi(n+1)-phi(n) formed before rounding to double, so second differences
/// keep full relative accuracy; frac_minus_phi[n-1] is {-phi(n)} with exact
/// integers detected (value 0 there).
struct PhiTable {
    std::int64_t N = 0;
    std::vector<double> phi;              // phi(n), n = 1..N+1
    std::vector<double> frac_minus_phi;   // {-phi(n)}, n = 1..N+1
    std::vector<double> delta;            // phi(n+1)-phi(n), n = 1..N
    std::vector<std::int64_t> ceil_phi;   // ceil(phi(n)), n = 1..N+1
    std::int64_t phi_floor_N = 0;         // floor(phi(N))

    double phi_at(std::int64_t n) const { return phi[static_cast<std::size_t>(n - 1)]; }
    double frac_at(std::int64_t n) const { return frac_minus_phi[static_cast<std::size_t>(n - 1)]; }
    double delta_at(std::int64_t n) const { return delta[static_cast<std::size_t>(n - 1)]; }
    std::int64_t ceil_at(std::int64_t n) const { return ceil_phi[static_cast<std::size_t>(n - 1)]; }
    std::int64_t floor_at(std::int64_t n) const {
        return ceil_at(n) - (frac_at(n) == 0.0 ? 0 : 1);
    }
};

PhiTable phi_table(const RegVarFunction& f, std::int64_t N, Exec ex = Exec::Parallel);

/// Empirical thresholds for the identities the change of variables rests on.
struct OrbitScanReport {
    std::int64_t indicator_threshold = 1;  // n* for the floor-difference identity
    std::int64_t monotone_threshold = 1;   // delta_phi nonincreasing from here on
    std::int64_t max_card_slack = 0;       // max | |N_h cap [N]| - floor(phi(N)) |
};

OrbitScanReport scan_orbit_identities(const RegVarFunction& f, std::int64_t limit);

}  // namespace orbitlab
