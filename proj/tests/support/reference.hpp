#ifndef DANKU_TESTS_REFERENCE_HPP
#define DANKU_TESTS_REFERENCE_HPP

// Test-only reference implementations. These deliberately avoid the library
// code paths they are compared against.

#include <danku/keccak.hpp>
#include <danku/word.hpp>

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <vector>

namespace danku::reference {

/// Re-mines `count` honest blocks: keccak(seed word, parent, number word).
inline std::vector<Digest> mine_hashes(std::uint64_t seed, std::uint64_t count) {
    std::vector<Digest> hashes;
    Digest parent{};
    for (std::uint64_t n = 0; n < count; ++n) {
        std::vector<std::uint8_t> pre(96, 0);
        for (int i = 0; i < 8; ++i) {
            pre[31 - i] = static_cast<std::uint8_t>(seed >> (8 * i));
            pre[95 - i] = static_cast<std::uint8_t>(n >> (8 * i));
        }
        std::copy(parent.begin(), parent.end(), pre.begin() + 32);
        parent = keccak256(pre);
        hashes.push_back(parent);
    }
    return hashes;
}

struct Split {
    std::vector<std::uint64_t> training;
    std::vector<std::uint64_t> testing;
};

/// Straight-line transcription of the selection listing.
inline Split select_indexes(const std::vector<Digest>& hashes,
                            std::uint64_t group_count,
                            std::uint64_t training_count,
                            std::uint64_t at_block) {
    using boost::multiprecision::cpp_int;
    std::vector<std::uint64_t> array;
    for (std::uint64_t i = 0; i < group_count; ++i) array.push_back(i);
    std::uint64_t array_length = group_count;
    Split out;
    std::uint64_t block_i = 0;
    std::uint64_t t_index = 0;
    while (t_index < training_count) {
        const Digest h = keccak256(hashes[at_block - block_i]);
        cpp_int value = 0;
        for (std::uint8_t b : h) value = value * 256 + b;
        const auto random_index = static_cast<std::uint64_t>(value % array_length);
        out.training.push_back(array[random_index]);
        array[random_index] = array[array_length - 1];
        array_length--;
        block_i++;
        t_index++;
    }
    t_index = 0;
    while (t_index < group_count - training_count) {
        out.testing.push_back(array[array_length - 1]);
        array_length--;
        t_index++;
    }
    return out;
}

}  // namespace danku::reference

#endif  // DANKU_TESTS_REFERENCE_HPP
