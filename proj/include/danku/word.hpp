#ifndef DANKU_WORD_HPP
#define DANKU_WORD_HPP

#include <danku/errors.hpp>
#include <danku/keccak.hpp>

#include <boost/multiprecision/cpp_int.hpp>

#include <array>
#include <cstdint>
#include <limits>
#include <string>
#include <string_view>

namespace danku {

/// A 32-byte EVM word, big-endian.
using Word = std::array<std::uint8_t, 32>;

using Uint256 = boost::multiprecision::uint256_t;

inline Word word_from_int(std::int64_t value) noexcept {
    Word w;
    w.fill(value < 0 ? 0xFF : 0x00);
    auto bits = static_cast<std::uint64_t>(value);
    for (int i = 0; i < 8; ++i) {
        w[31 - i] = static_cast<std::uint8_t>(bits >> (8 * i));
    }
    return w;
}

inline Word word_from_uint(std::uint64_t value) noexcept {
    Word w{};
    for (int i = 0; i < 8; ++i) {
        w[31 - i] = static_cast<std::uint8_t>(value >> (8 * i));
    }
    return w;
}

inline Word word_from_uint256(const Uint256& value) {
    Word w{};
    Uint256 v = value;
    for (int i = 31; i >= 0; --i) {
        w[i] = static_cast<std::uint8_t>(v & 0xFF);
        v >>= 8;
    }
    return w;
}

inline Uint256 uint256_from_word(const Word& w) {
    Uint256 v = 0;
    for (std::uint8_t b : w) {
        v = (v << 8) | b;
    }
    return v;
}

/// `uint(w) mod modulus`, reading the word as an unsigned big-endian integer.
inline std::uint64_t word_mod(const Word& w, std::uint64_t modulus) {
    if (modulus == 0) {
        throw OutOfRangeError("word_mod: zero modulus");
    }
    unsigned __int128 rem = 0;
    for (std::uint8_t b : w) {
        rem = ((rem << 8) | b) % modulus;
    }
    return static_cast<std::uint64_t>(rem);
}

inline std::string to_hex(const Word& w) {
    static constexpr char kDigits[] = "0123456789abcdef";
    std::string out;
    out.reserve(64);
    for (std::uint8_t b : w) {
        out.push_back(kDigits[b >> 4]);
        out.push_back(kDigits[b & 0x0F]);
    }
    return out;
}

/// Parses exactly 64 hex digits, with an optional `0x` prefix.
inline Word word_from_hex(std::string_view text) {
    if (text.starts_with("0x") || text.starts_with("0X")) {
        text.remove_prefix(2);
    }
    if (text.size() != 64) {
        throw Error("expected 64 hex digits, got " + std::to_string(text.size()));
    }
    auto nibble = [](char c) -> std::uint8_t {
        if (c >= '0' && c <= '9') return static_cast<std::uint8_t>(c - '0');
        if (c >= 'a' && c <= 'f') return static_cast<std::uint8_t>(c - 'a' + 10);
        if (c >= 'A' && c <= 'F') return static_cast<std::uint8_t>(c - 'A' + 10);
        throw Error(std::string("invalid hex digit '") + c + "'");
    };
    Word w{};
    for (std::size_t i = 0; i < 32; ++i) {
        w[i] = static_cast<std::uint8_t>((nibble(text[2 * i]) << 4) | nibble(text[2 * i + 1]));
    }
    return w;
}

/// Decimal or `0x`-prefixed hex text to a 256-bit unsigned value.
inline Uint256 parse_uint256(std::string_view text) {
    if (text.empty()) {
        throw Error("empty integer literal");
    }
    Uint256 v = 0;
    const bool hex = text.starts_with("0x") || text.starts_with("0X");
    if (hex) {
        text.remove_prefix(2);
        if (text.empty() || text.size() > 64) {
            throw Error("hex literal must have 1..64 digits");
        }
    }
    const Uint256 base = hex ? 16 : 10;
    for (char c : text) {
        unsigned digit = 0;
        if (c >= '0' && c <= '9') {
            digit = static_cast<unsigned>(c - '0');
        } else if (hex && c >= 'a' && c <= 'f') {
            digit = static_cast<unsigned>(c - 'a' + 10);
        } else if (hex && c >= 'A' && c <= 'F') {
            digit = static_cast<unsigned>(c - 'A' + 10);
        } else {
            throw Error(std::string("invalid digit '") + c + "' in integer literal");
        }
        using boost::multiprecision::uint512_t;
        const uint512_t next = uint512_t(v) * uint512_t(base) + digit;
        if (next > uint512_t((std::numeric_limits<Uint256>::max)())) {
            throw Error("integer literal exceeds 256 bits");
        }
        v = static_cast<Uint256>(next);
    }
    return v;
}

}  // namespace danku

#endif  // DANKU_WORD_HPP
