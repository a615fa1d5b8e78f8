#ifndef DANKU_FRACTION_HPP
#define DANKU_FRACTION_HPP

#include <danku/errors.hpp>

#include <charconv>
#include <cstdint>
#include <numeric>
#include <string>
#include <string_view>

namespace danku {

/// Small reduced non-negative rational, used for configured ratios.
struct Fraction {
    std::int64_t num = 0;
    std::int64_t den = 1;

    static Fraction reduced(std::int64_t num, std::int64_t den) {
        if (den == 0) {
            throw Error("fraction with zero denominator");
        }
        if (den < 0) {
            num = -num;
            den = -den;
        }
        const std::int64_t g = std::gcd(num, den);
        return g == 0 ? Fraction{0, 1} : Fraction{num / g, den / g};
    }

    /// Accepts "4/5", "80/100", "0.8" or "1".
    static Fraction parse(std::string_view text) {
        auto to_int = [&](std::string_view digits) {
            std::int64_t v = 0;
            auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), v);
            if (ec != std::errc{} || ptr != digits.data() + digits.size() || digits.empty()) {
                throw Error("invalid fraction '" + std::string(text) + "'");
            }
            return v;
        };
        if (auto slash = text.find('/'); slash != std::string_view::npos) {
            return reduced(to_int(text.substr(0, slash)), to_int(text.substr(slash + 1)));
        }
        if (auto dot = text.find('.'); dot != std::string_view::npos) {
            const std::string_view whole = text.substr(0, dot);
            const std::string_view frac = text.substr(dot + 1);
            if (frac.size() > 15) {
                throw Error("too many decimal places in '" + std::string(text) + "'");
            }
            std::int64_t den = 1;
            for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
            const std::int64_t w = whole.empty() ? 0 : to_int(whole);
            const std::int64_t f = frac.empty() ? 0 : to_int(frac);
            return reduced(w * den + f, den);
        }
        return reduced(to_int(text), 1);
    }

    double to_double() const noexcept { return static_cast<double>(num) / static_cast<double>(den); }

    std::string to_string() const { return std::to_string(num) + "/" + std::to_string(den); }

    friend bool operator==(const Fraction&, const Fraction&) = default;
};

}  // namespace danku

#endif  // DANKU_FRACTION_HPP
