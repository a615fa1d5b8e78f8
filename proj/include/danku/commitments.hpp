#ifndef DANKU_COMMITMENTS_HPP
#define DANKU_COMMITMENTS_HPP

#include <danku/errors.hpp>
#include <danku/keccak.hpp>
#include <danku/word.hpp>

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace danku {

struct DataPoint {
    std::vector<std::int64_t> inputs;
    std::int64_t label = 0;

    friend bool operator==(const DataPoint&, const DataPoint&) = default;
};

/// Ordered batch of points; committed and revealed as a unit.
struct DataGroup {
    std::vector<DataPoint> points;

    std::size_t input_dim() const noexcept {
        return points.empty() ? 0 : points.front().inputs.size();
    }

    friend bool operator==(const DataGroup&, const DataGroup&) = default;
};

struct Nonce {
    Uint256 value = 0;

    friend bool operator==(const Nonce&, const Nonce&) = default;
};

/// A data group together with the nonce it was committed under.
struct SaltedGroup {
    DataGroup group;
    Nonce nonce;

    friend bool operator==(const SaltedGroup&, const SaltedGroup&) = default;
};

/// Draws a uniform 256-bit nonce from four 64-bit outputs of `rng`.
template <class Rng>
Nonce random_nonce(Rng& rng) {
    static_assert(Rng::max() == std::numeric_limits<std::uint64_t>::max() && Rng::min() == 0,
                  "nonce generation expects a full-range 64-bit engine");
    Uint256 v = 0;
    for (int i = 0; i < 4; ++i) {
        v = (v << 64) | Uint256(static_cast<std::uint64_t>(rng()));
    }
    return Nonce{v};
}

inline void validate_group(const DataGroup& group) {
    if (group.points.empty()) {
        throw MalformedGroupError("data group has no points");
    }
    const std::size_t dim = group.input_dim();
    for (std::size_t i = 0; i < group.points.size(); ++i) {
        if (group.points[i].inputs.size() != dim) {
            throw MalformedGroupError("point " + std::to_string(i) + " has " +
                                      std::to_string(group.points[i].inputs.size()) +
                                      " inputs, expected " + std::to_string(dim));
        }
    }
}

/// Canonical commitment payload: every input then the label of each point in
/// order, then the nonce, each as a 32-byte big-endian two's-complement word.
inline std::vector<std::uint8_t> serialize_data_group(const DataGroup& group, const Nonce& nonce) {
    validate_group(group);
    const std::size_t words = group.points.size() * (group.input_dim() + 1) + 1;
    std::vector<std::uint8_t> out;
    out.reserve(32 * words);
    auto append = [&out](const Word& w) { out.insert(out.end(), w.begin(), w.end()); };
    for (const DataPoint& p : group.points) {
        for (std::int64_t x : p.inputs) {
            append(word_from_int(x));
        }
        append(word_from_int(p.label));
    }
    append(word_from_uint256(nonce.value));
    return out;
}

inline Digest hash_data_group(const DataGroup& group, const Nonce& nonce) {
    return keccak256(serialize_data_group(group, nonce));
}

inline bool verify_reveal(const Digest& commitment, const DataGroup& group, const Nonce& nonce) {
    try {
        return hash_data_group(group, nonce) == commitment;
    } catch (const MalformedGroupError&) {
        return false;
    }
}

inline bool verify_reveal(const Digest& commitment, const SaltedGroup& reveal) {
    return verify_reveal(commitment, reveal.group, reveal.nonce);
}

/// Splits `points` into consecutive groups of `group_size`; the point count
/// must divide evenly.
inline std::vector<DataGroup> make_groups(const std::vector<DataPoint>& points, std::size_t group_size) {
    if (group_size == 0 || points.size() % group_size != 0) {
        throw MalformedGroupError("cannot split " + std::to_string(points.size()) +
                                  " points into groups of " + std::to_string(group_size));
    }
    std::vector<DataGroup> groups(points.size() / group_size);
    for (std::size_t i = 0; i < points.size(); ++i) {
        groups[i / group_size].points.push_back(points[i]);
    }
    return groups;
}

}  // namespace danku

#endif  // DANKU_COMMITMENTS_HPP
