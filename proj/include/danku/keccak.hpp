#ifndef DANKU_KECCAK_HPP
#define DANKU_KECCAK_HPP

#include <array>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <span>

namespace danku {

using Digest = std::array<std::uint8_t, 32>;

namespace detail {

inline constexpr std::array<std::uint64_t, 24> kKeccakRoundConstants = {
    0x0000000000000001ULL, 0x0000000000008082ULL, 0x800000000000808aULL,
    0x8000000080008000ULL, 0x000000000000808bULL, 0x0000000080000001ULL,
    0x8000000080008081ULL, 0x8000000000008009ULL, 0x000000000000008aULL,
    0x0000000000000088ULL, 0x0000000080008009ULL, 0x000000008000000aULL,
    0x000000008000808bULL, 0x800000000000008bULL, 0x8000000000008089ULL,
    0x8000000000008003ULL, 0x8000000000008002ULL, 0x8000000000000080ULL,
    0x000000000000800aULL, 0x800000008000000aULL, 0x8000000080008081ULL,
    0x8000000000008080ULL, 0x0000000080000001ULL, 0x8000000080008008ULL};

// Rotation offsets and lane permutation for the combined rho/pi step,
// walking the pi cycle starting from lane 1.
inline constexpr std::array<int, 24> kRho = {1,  3,  6,  10, 15, 21, 28, 36,
                                             45, 55, 2,  14, 27, 41, 56, 8,
                                             25, 43, 62, 18, 39, 61, 20, 44};
inline constexpr std::array<int, 24> kPi = {10, 7,  11, 17, 18, 3,  5,  16,
                                            8,  21, 24, 4,  15, 23, 19, 13,
                                            12, 2,  20, 14, 22, 9,  6,  1};

inline void keccak_f1600(std::array<std::uint64_t, 25>& a) noexcept {
    for (std::uint64_t rc : kKeccakRoundConstants) {
        std::array<std::uint64_t, 5> c{};
        for (int x = 0; x < 5; ++x) {
            c[x] = a[x] ^ a[x + 5] ^ a[x + 10] ^ a[x + 15] ^ a[x + 20];
        }
        for (int x = 0; x < 5; ++x) {
            const std::uint64_t d = c[(x + 4) % 5] ^ std::rotl(c[(x + 1) % 5], 1);
            for (int y = 0; y < 25; y += 5) {
                a[y + x] ^= d;
            }
        }

        std::uint64_t carry = a[1];
        for (int i = 0; i < 24; ++i) {
            const int j = kPi[i];
            const std::uint64_t tmp = a[j];
            a[j] = std::rotl(carry, kRho[i]);
            carry = tmp;
        }

        for (int y = 0; y < 25; y += 5) {
            std::array<std::uint64_t, 5> row{};
            for (int x = 0; x < 5; ++x) {
                row[x] = a[y + x];
            }
            for (int x = 0; x < 5; ++x) {
                a[y + x] = row[x] ^ (~row[(x + 1) % 5] & row[(x + 2) % 5]);
            }
        }

        a[0] ^= rc;
    }
}

}  // namespace detail

/// Incremental Keccak-256 with the original Keccak padding (0x01 ... 0x80),
/// i.e. the variant Ethereum exposes as `keccak256`, not NIST SHA3-256.
class Keccak256 {
public:
    static constexpr std::size_t kRate = 136;

    Keccak256& update(std::span<const std::uint8_t> data) noexcept {
        for (std::uint8_t byte : data) {
            absorb_byte(byte);
        }
        return *this;
    }

    Digest finalize() noexcept {
        absorb_pad(pos_, 0x01);
        absorb_pad(kRate - 1, 0x80);
        detail::keccak_f1600(state_);

        Digest out{};
        for (std::size_t i = 0; i < out.size(); ++i) {
            out[i] = static_cast<std::uint8_t>(state_[i / 8] >> (8 * (i % 8)));
        }
        state_ = {};
        pos_ = 0;
        return out;
    }

private:
    void absorb_pad(std::size_t offset, std::uint8_t value) noexcept {
        state_[offset / 8] ^= static_cast<std::uint64_t>(value) << (8 * (offset % 8));
    }

    void absorb_byte(std::uint8_t byte) noexcept {
        absorb_pad(pos_, byte);
        if (++pos_ == kRate) {
            detail::keccak_f1600(state_);
            pos_ = 0;
        }
    }

    std::array<std::uint64_t, 25> state_{};
    std::size_t pos_ = 0;
};

inline Digest keccak256(std::span<const std::uint8_t> data) noexcept {
    return Keccak256{}.update(data).finalize();
}

}  // namespace danku

#endif  // DANKU_KECCAK_HPP
