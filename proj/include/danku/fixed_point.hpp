#ifndef DANKU_FIXED_POINT_HPP
#define DANKU_FIXED_POINT_HPP

#include <danku/errors.hpp>

#include <compare>
#include <cstdint>
#include <limits>
#include <string>

namespace danku {

/// Power-of-two denominator shared by every value in a contract.
struct Scale {
    int bits = 20;

    constexpr std::int64_t denominator() const noexcept { return std::int64_t{1} << bits; }

    void validate() const {
        if (bits < 0 || bits > 40) {
            throw ConfigError("scale_bits", "must lie in [0, 40], got " + std::to_string(bits));
        }
    }

    friend bool operator==(const Scale&, const Scale&) = default;
};

/// Signed 64-bit mantissa; the represented value is `mantissa / 2^bits` for
/// the scale in effect. Arithmetic never leaves the integers.
struct FixedPoint {
    std::int64_t mantissa = 0;

    static FixedPoint from_int(std::int64_t value, Scale scale) {
        std::int64_t m = 0;
        if (__builtin_mul_overflow(value, scale.denominator(), &m)) {
            throw ArithmeticOverflowError("integer " + std::to_string(value) + " does not fit at scale 2^" +
                                          std::to_string(scale.bits));
        }
        return FixedPoint{m};
    }

    static constexpr FixedPoint one(Scale scale) noexcept { return FixedPoint{scale.denominator()}; }

    /// For reports and test oracles only.
    double to_double(Scale scale) const noexcept {
        return static_cast<double>(mantissa) / static_cast<double>(scale.denominator());
    }

    friend constexpr auto operator<=>(const FixedPoint&, const FixedPoint&) = default;
};

inline FixedPoint fp_add(FixedPoint a, FixedPoint b) {
    std::int64_t m = 0;
    if (__builtin_add_overflow(a.mantissa, b.mantissa, &m)) {
        throw ArithmeticOverflowError("fixed-point addition overflow");
    }
    return FixedPoint{m};
}

/// `(a * b) / 2^bits` with a truncating division, never a shift, so negative
/// products round toward zero as EVM `sdiv` does.
inline FixedPoint fp_mul(FixedPoint a, FixedPoint b, Scale scale) {
    const __int128 product = static_cast<__int128>(a.mantissa) * b.mantissa;
    const __int128 q = product / scale.denominator();
    if (q > std::numeric_limits<std::int64_t>::max() || q < std::numeric_limits<std::int64_t>::min()) {
        throw ArithmeticOverflowError("fixed-point multiplication overflow");
    }
    return FixedPoint{static_cast<std::int64_t>(q)};
}

/// `(a * 2^bits) / b`, truncating toward zero.
inline FixedPoint fp_div(FixedPoint a, FixedPoint b, Scale scale) {
    if (b.mantissa == 0) {
        throw ArithmeticOverflowError("fixed-point division by zero");
    }
    const __int128 q = static_cast<__int128>(a.mantissa) * scale.denominator() / b.mantissa;
    if (q > std::numeric_limits<std::int64_t>::max() || q < std::numeric_limits<std::int64_t>::min()) {
        throw ArithmeticOverflowError("fixed-point division overflow");
    }
    return FixedPoint{static_cast<std::int64_t>(q)};
}

inline constexpr FixedPoint relu(FixedPoint x) noexcept {
    return x.mantissa > 0 ? x : FixedPoint{0};
}

}  // namespace danku

#endif  // DANKU_FIXED_POINT_HPP
