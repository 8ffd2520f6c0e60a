#include "orbitlab/regvar.hpp"

#include <quadmath.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>

namespace orbitlab {

namespace {

using f128 = __float128;

// Relative distance below which a 128-bit value is accepted as an exact
// integer, and the band above it that is reported as unresolvable. The quad
// evaluations carry ~1e-32 relative error, so 1e-30 leaves margin.
constexpr double kQuadExactRel = 1e-30;
constexpr double kQuadAmbiguousRel = 1e-26;

double iter_log(double x, int k) {
    double v = x;
    for (int i = 0; i < k; ++i) v = std::log(v);
    return v;
}

// h on the smooth region [x0, inf).
double eval_smooth(const RegVarFunction& f, double x) {
    switch (f.family) {
        case Family::PurePower:
            return f.scale * std::pow(x, f.c);
        case Family::PowerLog:
            return f.scale * std::pow(x, f.c) * std::pow(std::log(x), f.a);
        case Family::PowerExpLog:
            return f.scale * std::pow(x, f.c) * std::exp(f.a * std::pow(std::log(x), f.b));
        case Family::PowerIterLog:
            return f.scale * std::pow(x, f.c) * iter_log(x, f.k);
        case Family::XLogX:
            return f.scale * x * std::log(x);
    }
    return 0.0;
}

struct HPair {
    double h;   // h(x)
    double ld;  // h'(x)/h(x)
};

HPair eval_pair(const RegVarFunction& f, double x) {
    switch (f.family) {
        case Family::PurePower:
            return {f.scale * std::pow(x, f.c), f.c / x};
        case Family::PowerLog: {
            const double L = std::log(x);
            const double La = f.a == 1.0 ? L : std::pow(L, f.a);
            return {f.scale * std::pow(x, f.c) * La, f.c / x + f.a / (x * L)};
        }
        case Family::PowerExpLog: {
            const double L = std::log(x);
            const double Lb = std::pow(L, f.b);
            return {f.scale * std::pow(x, f.c) * std::exp(f.a * Lb), f.c / x + f.a * f.b * (Lb / L) / x};
        }
        case Family::PowerIterLog: {
            double prod = x;
            double v = x;
            for (int i = 0; i < f.k; ++i) {
                v = std::log(v);
                prod *= v;
            }
            return {f.scale * std::pow(x, f.c) * v, f.c / x + 1.0 / prod};
        }
        case Family::XLogX: {
            const double L = std::log(x);
            return {f.scale * x * L, 1.0 / x + 1.0 / (x * L)};
        }
    }
    return {0.0, 0.0};
}

struct HPairQ {
    f128 h;
    f128 ld;
};

HPairQ eval_pair_q(const RegVarFunction& f, f128 x) {
    const f128 c = f.c, scale = f.scale;
    switch (f.family) {
        case Family::PurePower:
            return {scale * powq(x, c), c / x};
        case Family::PowerLog: {
            const f128 L = logq(x);
            const f128 La = f.a == 1.0 ? L : powq(L, (f128)f.a);
            return {scale * powq(x, c) * La, c / x + (f128)f.a / (x * L)};
        }
        case Family::PowerExpLog: {
            const f128 L = logq(x);
            const f128 Lb = powq(L, (f128)f.b);
            return {scale * powq(x, c) * expq((f128)f.a * Lb), c / x + (f128)f.a * (f128)f.b * (Lb / L) / x};
        }
        case Family::PowerIterLog: {
            f128 prod = x;
            f128 v = x;
            for (int i = 0; i < f.k; ++i) {
                v = logq(v);
                prod *= v;
            }
            return {scale * powq(x, c) * v, c / x + 1 / prod};
        }
        case Family::XLogX: {
            const f128 L = logq(x);
            return {scale * x * L, 1 / x + 1 / (x * L)};
        }
    }
    return {0, 0};
}

f128 eval_smooth_q(const RegVarFunction& f, f128 x) { return eval_pair_q(f, x).h; }

double h_at_one(const RegVarFunction& f) { return f.x0 > 1.0 ? 1.0 : f.scale; }

f128 eval_h_q(const RegVarFunction& f, f128 x) {
    if (f.x0 > 1.0 && x < (f128)f.x0) {
        const f128 slope = (eval_smooth_q(f, (f128)f.x0) - 1) / ((f128)f.x0 - 1);
        return 1 + (x - 1) * slope;
    }
    return eval_smooth_q(f, x);
}

// Newton on the smooth region; h is convex and increasing there, so the
// iteration converges from any seed >= x0. Runs to stagnation, which leaves
// the root at machine accuracy; a bisection bracket is the fallback.
double newton_smooth(const RegVarFunction& f, double y, double seed) {
    double x = std::max(f.x0, seed);
    double best = x;
    double best_r = std::numeric_limits<double>::infinity();
    for (int it = 0; it < 60; ++it) {
        const HPair p = eval_pair(f, x);
        const double r = p.h - y;
        if (std::abs(r) < best_r) {
            best_r = std::abs(r);
            best = x;
        }
        if (r == 0.0) break;
        double nx = x - r / (p.h * p.ld);
        if (!std::isfinite(nx) || nx == x) break;
        if (nx < f.x0) nx = f.x0;
        x = nx;
    }
    if (best_r <= 1e-12 * std::max(1.0, std::abs(y))) return best;

    double lo = f.x0, hi = std::max(f.x0 * 2.0, 2.0);
    int guard = 0;
    while (eval_smooth(f, hi) < y) {
        hi *= 2.0;
        if (++guard > 1100) throw ConvergenceError("inverse_phi: could not bracket the root");
    }
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        (eval_smooth(f, mid) < y ? lo : hi) = mid;
    }
    if (std::abs(eval_smooth(f, hi) - y) <= 1e-12 * std::max(1.0, std::abs(y))) return hi;
    std::ostringstream os;
    os << "inverse_phi: failed to converge for y=" << y << " (" << family_name(f.family) << ")";
    throw ConvergenceError(os.str());
}

f128 inverse_phi_q(const RegVarFunction& f, f128 y, double seed) {
    if (f.x0 > 1.0) {
        const f128 hx0 = eval_smooth_q(f, (f128)f.x0);
        if (y <= hx0) {
            const f128 slope = (hx0 - 1) / ((f128)f.x0 - 1);
            return 1 + (y - 1) / slope;
        }
    }
    f128 x = (f128)std::max(f.x0, seed);
    for (int it = 0; it < 10; ++it) {
        const HPairQ p = eval_pair_q(f, x);
        f128 nx = x - (p.h - y) / (p.h * p.ld);
        if (nx < (f128)f.x0) nx = (f128)f.x0;
        const f128 step = fabsq(nx - x);
        x = nx;
        // Once a step is below ~1e-20 relative, the post-step error is
        // already under the quad noise floor (quadratic convergence).
        if (step <= (f128)1e-20 * fabsq(x)) break;
    }
    return x;
}

struct IntClass {
    bool exact;  // value is an integer to quad accuracy
    std::int64_t rounded;
    f128 value;
};

IntClass classify_quad(f128 v, const char* what) {
    const f128 r = roundq(v);
    const f128 dist = fabsq(v - r);
    const f128 s = fmaxq(1, fabsq(v));
    IntClass out{false, static_cast<std::int64_t>(r), v};
    if (dist < (f128)kQuadExactRel * s) {
        out.exact = true;
        return out;
    }
    if (dist < (f128)kQuadAmbiguousRel * s) {
        std::ostringstream os;
        os << what << ": extended precision cannot separate value from integer " << (long long)out.rounded;
        throw PrecisionError(os.str());
    }
    return out;
}

bool near_integer(double v, double guard) {
    return std::abs(v - std::round(v)) < guard * std::max(1.0, std::abs(v));
}

// Validates monotonicity and convexity on a log grid of [x0, hi].
void validate_shape(const RegVarFunction& f, double hi) {
    const int points = 160;
    const double lo = f.x0;
    double prev = eval_smooth(f, lo);
    for (int i = 1; i <= points; ++i) {
        const double x = lo * std::pow(hi / lo, static_cast<double>(i) / points);
        const double v = eval_smooth(f, x);
        if (!(v > prev))
            throw std::invalid_argument("RegVarFunction: h is not strictly increasing on the sampled grid");
        const double d = x * 1e-3;
        const double second = eval_smooth(f, x - d) + eval_smooth(f, x + d) - 2.0 * v;
        if (!(second > 0.0))
            throw std::invalid_argument("RegVarFunction: h is not strictly convex on the sampled grid");
        prev = v;
    }
}

RegVarFunction finalize(RegVarFunction f) {
    if (!(f.c >= 1.0 && f.c < 2.0)) throw std::invalid_argument("RegVarFunction: c must lie in [1, 2)");
    if (!(f.scale > 0.0) || !std::isfinite(f.scale))
        throw std::invalid_argument("RegVarFunction: scale must be positive");
    if (f.family == Family::PurePower && f.c == 1.0)
        throw std::invalid_argument("RegVarFunction: c = 1 requires a positive log factor (a > 0)");
    if (f.c == 1.0 && (f.family == Family::PowerLog || f.family == Family::PowerExpLog) && !(f.a > 0.0))
        throw std::invalid_argument("RegVarFunction: c = 1 requires a > 0");
    if (f.family == Family::PowerExpLog && !(f.b > 0.0 && f.b < 1.0))
        throw std::invalid_argument("RegVarFunction: b must lie in (0, 1)");
    if (f.family == Family::PowerIterLog && f.k < 1)
        throw std::invalid_argument("RegVarFunction: k must be >= 1");

    if (f.x0 <= 0.0) {
        switch (f.family) {
            case Family::PurePower:
                f.x0 = 1.0;
                break;
            case Family::PowerIterLog: {
                double t = 1.0;
                for (int i = 0; i < f.k; ++i) t = std::exp(t);
                f.x0 = t;
                break;
            }
            default:
                f.x0 = std::exp(1.0);
                break;
        }
    }
    if (f.x0 < 1.0) throw std::invalid_argument("RegVarFunction: x0 must be >= 1");

    // Negative log exponents push the convex region outward; widen x0 until
    // the sampled checks pass, giving up if that leaves the desk scale.
    bool ok = false;
    for (int attempt = 0; attempt < 28 && f.x0 <= 1e8; ++attempt) {
        bool pass = true;
        try {
            validate_shape(f, std::max(1e10, f.x0 * 1e4));
        } catch (const std::invalid_argument&) {
            pass = false;
        }
        if (pass && eval_smooth(f, f.x0) >= 1.0) {
            ok = true;
            break;
        }
        f.x0 *= 2.0;
    }
    if (!ok) {
        validate_shape(f, std::max(1e10, f.x0 * 1e4));  // rethrow with message
        throw std::invalid_argument("RegVarFunction: no valid x0 with h(x0) >= 1 at desk scale");
    }

    f.h_x0 = eval_smooth(f, f.x0);
    if (f.x0 > 1.0) {
        if (!(f.h_x0 > 1.0))
            throw std::invalid_argument("RegVarFunction: h(x0) must exceed 1 for the pinned extension");
        f.ext_slope = (f.h_x0 - 1.0) / (f.x0 - 1.0);
    } else {
        if (!(f.scale >= 1.0))
            throw std::invalid_argument("RegVarFunction: h(1) = scale must be >= 1 when x0 = 1");
        f.ext_slope = 0.0;
    }
    return f;
}

}  // namespace

const char* family_name(Family f) {
    switch (f) {
        case Family::PurePower: return "power";
        case Family::PowerLog: return "powerlog";
        case Family::PowerExpLog: return "powerexplog";
        case Family::PowerIterLog: return "poweriterlog";
        case Family::XLogX: return "xlogx";
    }
    return "?";
}

RegVarFunction make_pure_power(double c, double scale) {
    RegVarFunction f;
    f.family = Family::PurePower;
    f.c = c;
    f.scale = scale;
    return finalize(f);
}

RegVarFunction make_power_log(double c, double a, double scale) {
    RegVarFunction f;
    f.family = Family::PowerLog;
    f.c = c;
    f.a = a;
    f.scale = scale;
    return finalize(f);
}

RegVarFunction make_power_exp_log(double c, double a, double b, double scale) {
    RegVarFunction f;
    f.family = Family::PowerExpLog;
    f.c = c;
    f.a = a;
    f.b = b;
    f.scale = scale;
    return finalize(f);
}

RegVarFunction make_power_iter_log(double c, int k, double scale) {
    RegVarFunction f;
    f.family = Family::PowerIterLog;
    f.c = c;
    f.k = k;
    f.scale = scale;
    return finalize(f);
}

RegVarFunction make_xlogx(double scale) {
    RegVarFunction f;
    f.family = Family::XLogX;
    f.c = 1.0;
    f.scale = scale;
    return finalize(f);
}

RegVarFunction parse_function_spec(const std::string& spec) {
    const auto colon = spec.find(':');
    const std::string fam = spec.substr(0, colon);
    std::optional<double> c, a, b, scale;
    std::optional<int> k;
    if (colon != std::string::npos) {
        std::string rest = spec.substr(colon + 1);
        std::stringstream ss(rest);
        std::string kv;
        while (std::getline(ss, kv, ',')) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos) throw std::invalid_argument("function spec: expected key=value in '" + kv + "'");
            const std::string key = kv.substr(0, eq);
            const std::string val = kv.substr(eq + 1);
            char* end = nullptr;
            const double num = std::strtod(val.c_str(), &end);
            if (end == val.c_str() || *end != '\0')
                throw std::invalid_argument("function spec: bad numeric value '" + val + "'");
            if (key == "c") c = num;
            else if (key == "a") a = num;
            else if (key == "b") b = num;
            else if (key == "k") k = static_cast<int>(num);
            else if (key == "scale") scale = num;
            else throw std::invalid_argument("function spec: unknown key '" + key + "'");
        }
    }
    const double sc = scale.value_or(1.0);
    if (fam == "power") {
        if (!c) throw std::invalid_argument("function spec: power requires c");
        return make_pure_power(*c, sc);
    }
    if (fam == "powerlog") {
        if (!c) throw std::invalid_argument("function spec: powerlog requires c");
        return make_power_log(*c, a.value_or(1.0), sc);
    }
    if (fam == "powerexplog") {
        if (!c) throw std::invalid_argument("function spec: powerexplog requires c");
        return make_power_exp_log(*c, a.value_or(0.5), b.value_or(0.5), sc);
    }
    if (fam == "poweriterlog") {
        if (!c) throw std::invalid_argument("function spec: poweriterlog requires c");
        return make_power_iter_log(*c, k.value_or(1), sc);
    }
    if (fam == "xlogx") {
        if (c && *c != 1.0) throw std::invalid_argument("function spec: xlogx has c = 1");
        return make_xlogx(sc);
    }
    throw std::invalid_argument("function spec: unknown family '" + fam + "'");
}

double eval_h(const RegVarFunction& f, double x) {
    if (!std::isfinite(x) || x < 1.0) throw std::domain_error("eval_h: x must be finite and >= 1");
    if (f.x0 > 1.0 && x < f.x0) return 1.0 + (x - 1.0) * f.ext_slope;
    return eval_smooth(f, x);
}

double eval_h_deriv(const RegVarFunction& f, double x) {
    if (!std::isfinite(x) || x < 1.0) throw std::domain_error("eval_h_deriv: x must be finite and >= 1");
    if (f.x0 > 1.0 && x < f.x0) return f.ext_slope;
    const HPair p = eval_pair(f, x);
    return p.h * p.ld;
}

double inverse_phi(const RegVarFunction& f, double y) {
    const double y_min = h_at_one(f);
    if (!std::isfinite(y) || y < y_min * (1.0 - 1e-12))
        throw std::domain_error("inverse_phi: y must be finite and >= h(1)");
    if (f.x0 > 1.0 && y <= f.h_x0) return 1.0 + (y - 1.0) / f.ext_slope;
    const double seed = std::pow(y / f.scale, 1.0 / f.c);
    return newton_smooth(f, y, seed);
}

std::int64_t floor_h(const RegVarFunction& f, std::int64_t k) {
    if (k < 1) throw std::domain_error("floor_h: k must be >= 1");
    const double hd = eval_h(f, static_cast<double>(k));
    if (!near_integer(hd, f.eval_floor_guard)) return static_cast<std::int64_t>(std::floor(hd));
    const IntClass c = classify_quad(eval_h_q(f, (f128)k), "floor_h");
    if (c.exact) return c.rounded;
    return static_cast<std::int64_t>(floorq(c.value));
}

namespace {

// ceil(phi(n)) with the same double-first, quad-escalation policy.
std::int64_t ceil_phi_guarded(const RegVarFunction& f, std::int64_t n) {
    const double p = inverse_phi(f, static_cast<double>(n));
    if (!near_integer(p, f.eval_floor_guard)) return static_cast<std::int64_t>(std::ceil(p));
    const IntClass c = classify_quad(inverse_phi_q(f, (f128)n, p), "inverse_phi");
    if (c.exact) return c.rounded;
    return static_cast<std::int64_t>(ceilq(c.value));
}

}  // namespace

std::int64_t indicator_formula(const RegVarFunction& f, std::int64_t n) {
    if (n < 1) throw std::domain_error("indicator_formula: n must be >= 1");
    // floor(-y) = -ceil(y), so the formula reduces to a ceil difference.
    return ceil_phi_guarded(f, n + 1) - ceil_phi_guarded(f, n);
}

bool is_member(const RegVarFunction& f, std::int64_t n) {
    if (n < 1) throw std::domain_error("is_member: n must be >= 1");
    const std::int64_t k = ceil_phi_guarded(f, n);
    const bool direct = k >= 1 && floor_h(f, k) == n;
    const std::int64_t formula = indicator_formula(f, n);
    if (formula != (direct ? 1 : 0)) {
        std::ostringstream os;
        os << "is_member: indicator formula (" << (long long)formula
           << ") disagrees with the candidate check at n = " << (long long)n;
        throw std::runtime_error(os.str());
    }
    return direct;
}

std::vector<std::int64_t> floor_orbit_upto(const RegVarFunction& f, std::int64_t N, Exec ex) {
    if (N < 1) throw std::domain_error("floor_orbit_upto: N must be >= 1");
    const std::int64_t k_max = ceil_phi_guarded(f, N + 1) - 1;
    if (k_max < 1) return {};
    std::vector<std::int64_t> vals(static_cast<std::size_t>(k_max));
    std::exception_ptr err;
    if (ex == Exec::Parallel) {
#pragma omp parallel for schedule(static)
        for (std::int64_t k = 1; k <= k_max; ++k) {
            try {
                vals[static_cast<std::size_t>(k - 1)] = floor_h(f, k);
            } catch (...) {
#pragma omp critical
                if (!err) err = std::current_exception();
            }
        }
        if (err) std::rethrow_exception(err);
    } else {
        for (std::int64_t k = 1; k <= k_max; ++k) vals[static_cast<std::size_t>(k - 1)] = floor_h(f, k);
    }
    // floor(h(k)) is nondecreasing, so dedup suffices.
    vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
    while (!vals.empty() && vals.back() > N) vals.pop_back();
    return vals;
}

double delta_phi(const RegVarFunction& f, std::int64_t n) {
    if (n < 1) throw std::domain_error("delta_phi: n must be >= 1");
    return inverse_phi(f, static_cast<double>(n + 1)) - inverse_phi(f, static_cast<double>(n));
}

std::int64_t floor_phi(const RegVarFunction& f, std::int64_t n) {
    if (n < 1) throw std::domain_error("floor_phi: n must be >= 1");
    const double p = inverse_phi(f, static_cast<double>(n));
    if (!near_integer(p, f.eval_floor_guard)) return static_cast<std::int64_t>(std::floor(p));
    const IntClass c = classify_quad(inverse_phi_q(f, (f128)n, p), "inverse_phi");
    if (c.exact) return c.rounded;
    return static_cast<std::int64_t>(floorq(c.value));
}

PhiTable phi_table(const RegVarFunction& f, std::int64_t N, Exec ex) {
    if (N < 1) throw std::domain_error("phi_table: N must be >= 1");
    const std::int64_t count = N + 1;
    std::vector<f128> pq(static_cast<std::size_t>(count));
    const std::int64_t block = 1 << 14;
    const std::int64_t nblocks = (count + block - 1) / block;
    std::exception_ptr err;
    // Double Newton seeded from the neighbouring root, then two quad steps.
    auto run_block = [&](std::int64_t bidx) {
        const std::int64_t lo = bidx * block;  // index i <-> n = i+1
        const std::int64_t hi = std::min(count, lo + block);
        double xd = inverse_phi(f, static_cast<double>(lo + 1));
        pq[static_cast<std::size_t>(lo)] = inverse_phi_q(f, (f128)(lo + 1), xd);
        for (std::int64_t i = lo + 1; i < hi; ++i) {
            const double y = static_cast<double>(i + 1);
            if (f.x0 > 1.0 && y <= f.h_x0) {
                xd = 1.0 + (y - 1.0) / f.ext_slope;
            } else {
                for (int s = 0; s < 4; ++s) {
                    const HPair p = eval_pair(f, xd);
                    const double step = (p.h - y) / (p.h * p.ld);
                    const double nx = std::max(f.x0, xd - step);
                    if (nx == xd) break;
                    xd = nx;
                    if (std::abs(step) <= 1e-11 * xd) break;
                }
            }
            pq[static_cast<std::size_t>(i)] = inverse_phi_q(f, (f128)y, xd);
            xd = static_cast<double>(pq[static_cast<std::size_t>(i)]);
        }
    };
    if (ex == Exec::Parallel) {
#pragma omp parallel for schedule(static)
        for (std::int64_t b = 0; b < nblocks; ++b) {
            try {
                run_block(b);
            } catch (...) {
#pragma omp critical
                if (!err) err = std::current_exception();
            }
        }
        if (err) std::rethrow_exception(err);
    } else {
        for (std::int64_t b = 0; b < nblocks; ++b) run_block(b);
    }

    PhiTable t;
    t.N = N;
    t.phi.resize(static_cast<std::size_t>(count));
    t.frac_minus_phi.resize(static_cast<std::size_t>(count));
    t.delta.resize(static_cast<std::size_t>(N));
    t.ceil_phi.resize(static_cast<std::size_t>(count));
    auto derive = [&](std::int64_t i) {
        const f128 v = pq[static_cast<std::size_t>(i)];
        const IntClass c = classify_quad(v, "phi_table");
        t.phi[static_cast<std::size_t>(i)] = static_cast<double>(v);
        if (c.exact) {
            t.frac_minus_phi[static_cast<std::size_t>(i)] = 0.0;
            t.ceil_phi[static_cast<std::size_t>(i)] = c.rounded;
        } else {
            const f128 m = -v;
            t.frac_minus_phi[static_cast<std::size_t>(i)] = static_cast<double>(m - floorq(m));
            t.ceil_phi[static_cast<std::size_t>(i)] = static_cast<std::int64_t>(floorq(v)) + 1;
        }
        if (i < N)
            t.delta[static_cast<std::size_t>(i)] =
                static_cast<double>(pq[static_cast<std::size_t>(i + 1)] - v);
    };
    if (ex == Exec::Parallel) {
#pragma omp parallel for schedule(static)
        for (std::int64_t i = 0; i < count; ++i) {
            try {
                derive(i);
            } catch (...) {
#pragma omp critical
                if (!err) err = std::current_exception();
            }
        }
        if (err) std::rethrow_exception(err);
    } else {
        for (std::int64_t i = 0; i < count; ++i) derive(i);
    }
    const IntClass cN = classify_quad(pq[static_cast<std::size_t>(N - 1)], "phi_table");
    t.phi_floor_N = cN.exact ? cN.rounded : static_cast<std::int64_t>(floorq(cN.value));
    return t;
}

OrbitScanReport scan_orbit_identities(const RegVarFunction& f, std::int64_t limit) {
    if (limit < 2) throw std::domain_error("scan_orbit_identities: limit must be >= 2");
    OrbitScanReport rep;

    // One incremental pass over n: double roots polished to stagnation, with
    // quad escalation near integers, interleaved with the orbit walk.
    std::int64_t walk_k = 1;
    std::int64_t walk_floor = floor_h(f, 1);
    std::int64_t card = 0;

    double prev_root = 0.0, prev_delta_d = 0.0;
    std::int64_t prev_ceil = 0;
    bool prev_exact = false;
    std::int64_t last_bad = 0, last_increase = 0, slack = 0;

    for (std::int64_t n = 1; n <= limit + 1; ++n) {
        const double y = static_cast<double>(n);
        double root;
        if (f.x0 > 1.0 && y <= f.h_x0) {
            root = 1.0 + (y - 1.0) / f.ext_slope;
        } else if (n == 1 || prev_root == 0.0) {
            root = inverse_phi(f, y);
        } else {
            root = prev_root;
            for (int s = 0; s < 8; ++s) {
                const HPair p = eval_pair(f, std::max(f.x0, root));
                const double nx = std::max(f.x0, root - (p.h - y) / (p.h * p.ld));
                if (nx == root) break;
                root = nx;
            }
        }
        std::int64_t cphi;
        bool exact = false;
        if (near_integer(root, f.eval_floor_guard)) {
            const IntClass c = classify_quad(inverse_phi_q(f, (f128)n, root), "inverse_phi");
            exact = c.exact;
            cphi = c.exact ? c.rounded : static_cast<std::int64_t>(floorq(c.value)) + 1;
            root = static_cast<double>(c.value);
        } else {
            cphi = static_cast<std::int64_t>(std::ceil(root));
        }

        if (n >= 2) {
            // indicator formula vs direct membership at m = n-1
            const std::int64_t m = n - 1;
            while (walk_floor < m) walk_floor = floor_h(f, ++walk_k);
            const bool member = walk_floor == m;
            if (member) ++card;
            const std::int64_t formula = cphi - prev_ceil;
            if (formula != (member ? 1 : 0)) last_bad = m;

            const std::int64_t floor_phi_m = prev_exact ? prev_ceil : prev_ceil - 1;
            slack = std::max(slack, std::abs(card - floor_phi_m));

            const double delta_d = root - prev_root;
            if (n >= 3) {
                // double deltas carry ~eps * phi of noise; only count clear increases
                const double tol = 8e-16 * std::max(1.0, root);
                if (delta_d > prev_delta_d + tol) last_increase = m - 1;
            }
            prev_delta_d = delta_d;
        }
        prev_root = root;
        prev_ceil = cphi;
        prev_exact = exact;
    }

    rep.indicator_threshold = last_bad + 1;
    rep.max_card_slack = slack;
    rep.monotone_threshold = last_increase + 1;
    return rep;
}

}  // namespace orbitlab
