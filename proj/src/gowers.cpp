#include "orbitlab/gowers.hpp"

#include <cmath>
#include <stdexcept>

#include "orbitlab/fft.hpp"

namespace orbitlab {

SignalZ difference(const SignalZ& f, std::int64_t h) {
    const std::int64_t lo = std::max(f.lo(), f.lo() - h);
    const std::int64_t hi = std::min(f.hi(), f.hi() - h);
    if (hi <= lo) return SignalZ{};
    std::vector<cd> vals(static_cast<std::size_t>(hi - lo));
    for (std::int64_t x = lo; x < hi; ++x)
        vals[static_cast<std::size_t>(x - lo)] =
            f.values[static_cast<std::size_t>(x - f.offset)] *
            std::conj(f.values[static_cast<std::size_t>(x + h - f.offset)]);
    return SignalZ(lo, std::move(vals));
}

namespace {

double u2_fourth_with_plan(const SignalZ& f, const Fft& plan, std::vector<cd>& buf) {
    const std::size_t W = f.values.size();
    if (W == 0) return 0.0;
    const std::size_t K = plan.size();
    buf.assign(K, cd{});
    for (std::size_t i = 0; i < W; ++i) buf[i] = f.values[i];
    plan.forward(buf.data());
    double s = 0.0;
    for (std::size_t j = 0; j < K; ++j) {
        const double m2 = buf[j].real() * buf[j].real() + buf[j].imag() * buf[j].imag();
        s += m2 * m2;
    }
    return s / static_cast<double>(K);
}

}  // namespace

double u2_fourth(const SignalZ& f) {
    const std::size_t W = f.values.size();
    if (W == 0) return 0.0;
    const Fft plan(Fft::next_pow2(2 * W - 1));
    std::vector<cd> buf;
    return u2_fourth_with_plan(f, plan, buf);
}

double u2_fourth_bruteforce(const SignalZ& f) {
    const std::int64_t W = f.window();
    if (W == 0) return 0.0;
    if (W > 128) throw std::invalid_argument("u2_fourth_bruteforce: window capped at 128");
    cd s{};
    for (std::int64_t x = f.lo(); x < f.hi(); ++x)
        for (std::int64_t h1 = -(W - 1); h1 <= W - 1; ++h1)
            for (std::int64_t h2 = -(W - 1); h2 <= W - 1; ++h2)
                s += f.at(x) * std::conj(f.at(x + h1)) * std::conj(f.at(x + h2)) * f.at(x + h1 + h2);
    return s.real();
}

double u3_eighth(const SignalZ& f, Exec ex) {
    const std::int64_t W = f.window();
    if (W == 0) return 0.0;
    if (W > (std::int64_t{1} << 20)) throw std::invalid_argument("u3_eighth: window capped at 2^20");
    const Fft plan(Fft::next_pow2(static_cast<std::size_t>(2 * W - 1)));
    const double at_zero = [&] {
        std::vector<cd> buf;
        return u2_fourth_with_plan(difference(f, 0), plan, buf);
    }();
    const double positive = block_sum<double>(
        1, W,
        [&](std::int64_t h) {
            thread_local std::vector<cd> buf;
            return u2_fourth_with_plan(difference(f, h), plan, buf);
        },
        ex);
    return at_zero + 2.0 * positive;
}

double u3_eighth_bruteforce(const SignalZ& f) {
    const std::int64_t W = f.window();
    if (W == 0) return 0.0;
    if (W > 64) throw std::invalid_argument("u3_eighth_bruteforce: window capped at 64");
    cd s{};
    for (std::int64_t x = f.lo(); x < f.hi(); ++x)
        for (std::int64_t h1 = -(W - 1); h1 <= W - 1; ++h1)
            for (std::int64_t h2 = -(W - 1); h2 <= W - 1; ++h2)
                for (std::int64_t h3 = -(W - 1); h3 <= W - 1; ++h3) {
                    s += f.at(x) * std::conj(f.at(x + h1)) * std::conj(f.at(x + h2)) *
                         f.at(x + h1 + h2) * std::conj(f.at(x + h3)) * f.at(x + h1 + h3) *
                         f.at(x + h2 + h3) * std::conj(f.at(x + h1 + h2 + h3));
                }
    return s.real();
}

double gowers_norm(const SignalZ& f, int s, Exec ex) {
    if (s == 2) return std::pow(u2_fourth(f), 0.25);
    if (s == 3) return std::pow(u3_eighth(f, ex), 0.125);
    throw std::invalid_argument("gowers_norm: s must be 2 or 3");
}

double mu_weight(std::int64_t N, std::int64_t n) {
    if (N < 1) throw std::domain_error("mu_weight: N must be >= 1");
    const std::int64_t a = n < 0 ? -n : n;
    if (a > N - 1) return 0.0;
    return static_cast<double>(N - a) / (static_cast<double>(N) * static_cast<double>(N));
}

}  // namespace orbitlab
