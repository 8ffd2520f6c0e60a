#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "orbitlab/common.hpp"

namespace orbitlab {

/// A finitely supported complex function on the integers: a dense window
/// [offset, offset + values.size()) of values, zero outside.
struct SignalZ {
    std::int64_t offset = 0;
    std::vector<cd> values;
    std::optional<double> declared_bound;

    SignalZ() = default;
    SignalZ(std::int64_t off, std::vector<cd> vals, std::optional<double> bound = {})
        : offset(off), values(std::move(vals)), declared_bound(bound) {
        for (const cd& v : values)
            if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
                throw std::invalid_argument("SignalZ: values must be finite");
        if (declared_bound) {
            for (const cd& v : values)
                if (std::abs(v) > *declared_bound * (1.0 + 1e-12))
                    throw std::invalid_argument("SignalZ: declared bound violated");
        }
    }

    std::int64_t window() const { return static_cast<std::int64_t>(values.size()); }
    std::int64_t lo() const { return offset; }
    std::int64_t hi() const { return offset + window(); }  // exclusive

    cd at(std::int64_t x) const {
        const std::int64_t i = x - offset;
        if (i < 0 || i >= window()) return {};
        return values[static_cast<std::size_t>(i)];
    }

    /// 1 on [lo, lo+count), 0 elsewhere.
    static SignalZ indicator(std::int64_t lo, std::int64_t count) {
        return SignalZ(lo, std::vector<cd>(static_cast<std::size_t>(count), cd{1.0, 0.0}), 1.0);
    }

    /// A single 1 at position x.
    static SignalZ dirac(std::int64_t x = 0) { return indicator(x, 1); }

    static SignalZ from_real(std::int64_t off, const std::vector<double>& v,
                             std::optional<double> bound = {}) {
        std::vector<cd> vals(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) vals[i] = cd{v[i], 0.0};
        return SignalZ(off, std::move(vals), bound);
    }
};

}  // namespace orbitlab
