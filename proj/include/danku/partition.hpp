#ifndef DANKU_PARTITION_HPP
#define DANKU_PARTITION_HPP

#include <danku/chain.hpp>
#include <danku/errors.hpp>
#include <danku/fraction.hpp>
#include <danku/keccak.hpp>
#include <danku/word.hpp>

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <set>
#include <span>
#include <string>
#include <thread>
#include <vector>

namespace danku {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

struct PartitionConfig {
    std::uint64_t group_count = 0;
    Fraction training_fraction{4, 5};
    std::uint64_t block_limit = 5;

    void validate() const {
        if (group_count == 0) {
            throw ConfigError("group_count", "must be positive");
        }
        if (training_fraction.num <= 0 || training_fraction.num >= training_fraction.den) {
            throw ConfigError("training_fraction", "must lie strictly between 0 and 1");
        }
        if ((static_cast<__int128>(group_count) * training_fraction.num) % training_fraction.den != 0) {
            throw ConfigError("training_fraction", std::to_string(group_count) + " x " +
                                                       training_fraction.to_string() +
                                                       " is not an integer group count");
        }
        const std::uint64_t k = training_count();
        if (k == 0 || k >= group_count) {
            throw ConfigError("training_fraction", "training split must leave both partitions non-empty");
        }
        if (block_limit == 0) {
            throw ConfigError("block_limit", "must be positive");
        }
    }

    std::uint64_t training_count() const noexcept {
        return static_cast<std::uint64_t>(static_cast<__int128>(group_count) * training_fraction.num /
                                          training_fraction.den);
    }

    std::uint64_t testing_count() const noexcept { return group_count - training_count(); }
};

struct PartitionResult {
    std::vector<std::uint64_t> training_indexes;
    std::vector<std::uint64_t> testing_indexes;

    friend bool operator==(const PartitionResult&, const PartitionResult&) = default;
};

/// The single place the selection hash is chosen: `uint(keccak256(blockhash)) mod modulus`.
inline std::uint64_t selection_value(const Digest& blockhash, std::uint64_t modulus) {
    return word_mod(keccak256(blockhash), modulus);
}

/// Anything exposing `blockhash(number) -> const Digest&`-compatible lookup.
template <class Source>
concept BlockHashSource = requires(const Source& s, std::uint64_t n) {
    { s.blockhash(n) } -> std::convertible_to<Digest>;
};

/// Block-hash-seeded swap-remove selection. Training slot t draws from the
/// hash of block `at_block - t` modulo the shrinking working length; testing
/// indexes are then read from the tail of the working array downward.
template <BlockHashSource Source>
PartitionResult randomly_select_index(std::span<const std::uint64_t> indexes,
                                      std::uint64_t training_count,
                                      const Source& chain,
                                      std::uint64_t at_block) {
    if (training_count == 0 || training_count >= indexes.size()) {
        throw OutOfRangeError("training count " + std::to_string(training_count) +
                              " must lie in [1, " + std::to_string(indexes.size()) + ")");
    }
    if (at_block + 1 < training_count) {
        throw OutOfRangeError("partition at block " + std::to_string(at_block) + " needs " +
                              std::to_string(training_count) + " prior block hashes");
    }

    std::vector<std::uint64_t> array(indexes.begin(), indexes.end());
    std::size_t array_length = array.size();

    PartitionResult result;
    result.training_indexes.reserve(training_count);
    for (std::uint64_t t = 0; t < training_count; ++t) {
        const std::size_t r = selection_value(chain.blockhash(at_block - t), array_length);
        result.training_indexes.push_back(array[r]);
        array[r] = array[array_length - 1];
        --array_length;
    }
    result.testing_indexes.reserve(array_length);
    while (array_length > 0) {
        result.testing_indexes.push_back(array[array_length - 1]);
        --array_length;
    }
    return result;
}

template <BlockHashSource Source>
PartitionResult randomly_select_index(const PartitionConfig& config, const Source& chain, std::uint64_t at_block) {
    config.validate();
    std::vector<std::uint64_t> indexes(config.group_count);
    std::iota(indexes.begin(), indexes.end(), std::uint64_t{0});
    return randomly_select_index(indexes, config.training_count(), chain, at_block);
}

inline BigInt binomial(std::uint64_t n, std::uint64_t k) {
    if (k > n) return 0;
    k = std::min(k, n - k);
    BigInt c = 1;
    for (std::uint64_t i = 1; i <= k; ++i) {
        c = c * (n - k + i) / i;
    }
    return c;
}

struct ExactProbability {
    Rational exact;
    double value = 0.0;
};

/// Organizer's chance of an ideal training set within L attempts, computed as
/// `L * prod_{n=G-k+1}^{G} (G-n+1)/n`. This is a union bound over attempts and
/// may exceed 1 for large L.
inline ExactProbability exact_ideal_probability(const PartitionConfig& config) {
    config.validate();
    const std::uint64_t g = config.group_count;
    const std::uint64_t first = g - config.training_count() + 1;
    Rational product = 1;
    for (std::uint64_t n = first; n <= g; ++n) {
        product *= Rational(BigInt(g - n + 1), BigInt(n));
    }
    Rational p = product * config.block_limit;
    return {p, p.convert_to<double>()};
}

/// `1 - (1 - 1/C(G,k))^L`: L independent attempts, at least one ideal.
inline ExactProbability exact_complement_probability(const PartitionConfig& config) {
    config.validate();
    const Rational miss = 1 - Rational(BigInt(1), binomial(config.group_count, config.training_count()));
    Rational all_miss = 1;
    for (std::uint64_t i = 0; i < config.block_limit; ++i) {
        all_miss *= miss;
    }
    Rational p = 1 - all_miss;
    return {p, p.convert_to<double>()};
}

enum class AttemptMode {
    /// Attempts at L consecutive heights; hash windows overlap.
    Overlapping,
    /// Attempts spaced by k blocks so no block hash is shared.
    Disjoint,
};

struct MonteCarloEstimate {
    std::uint64_t trials = 0;
    std::uint64_t successes = 0;
    double estimate = 0.0;
    double standard_error = 0.0;
};

inline std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

namespace detail {

inline bool ideal_within_limit(const PartitionConfig& config,
                               std::span<const std::uint64_t> indexes,
                               const std::vector<std::uint64_t>& sorted_target,
                               std::uint64_t chain_seed,
                               AttemptMode mode) {
    const std::uint64_t k = config.training_count();
    const std::uint64_t stride = mode == AttemptMode::Overlapping ? 1 : k;
    const std::uint64_t last_at = (k - 1) + stride * (config.block_limit - 1);

    ChainState chain(chain_seed);
    while (chain.height() <= last_at) {
        chain.mine_block();
    }
    std::vector<std::uint64_t> training;
    for (std::uint64_t j = 0; j < config.block_limit; ++j) {
        training = randomly_select_index(indexes, k, chain, (k - 1) + stride * j).training_indexes;
        std::sort(training.begin(), training.end());
        if (training == sorted_target) {
            return true;
        }
    }
    return false;
}

}  // namespace detail

/// Simulates an organizer who may trigger partitioning at any of L heights
/// and wins if any attempt's training set equals `target` as a set. Each
/// trial uses a fresh chain seeded from `splitmix64(seed + trial)`; the result
/// does not depend on `threads`.
inline MonteCarloEstimate monte_carlo_ideal_probability(const PartitionConfig& config,
                                                        const std::set<std::uint64_t>& target,
                                                        std::uint64_t trials,
                                                        std::uint64_t seed,
                                                        AttemptMode mode = AttemptMode::Overlapping,
                                                        unsigned threads = 0) {
    config.validate();
    if (target.size() != config.training_count()) {
        throw ConfigError("target", "target training set has " + std::to_string(target.size()) +
                                        " indexes, expected " + std::to_string(config.training_count()));
    }
    if (*target.rbegin() >= config.group_count) {
        throw ConfigError("target", "index out of range");
    }
    if (trials == 0) {
        throw ConfigError("trials", "must be at least 1");
    }

    std::vector<std::uint64_t> indexes(config.group_count);
    std::iota(indexes.begin(), indexes.end(), std::uint64_t{0});
    const std::vector<std::uint64_t> sorted_target(target.begin(), target.end());

    if (threads == 0) {
        threads = std::max(1U, std::thread::hardware_concurrency());
    }
    threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, trials));

    std::vector<std::uint64_t> successes(threads, 0);
    auto work = [&](unsigned worker) {
        const std::uint64_t begin = trials * worker / threads;
        const std::uint64_t end = trials * (worker + 1) / threads;
        std::uint64_t local = 0;
        for (std::uint64_t trial = begin; trial < end; ++trial) {
            local += detail::ideal_within_limit(config, indexes, sorted_target, splitmix64(seed + trial), mode);
        }
        successes[worker] = local;
    };
    if (threads == 1) {
        work(0);
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (unsigned w = 0; w < threads; ++w) {
            pool.emplace_back(work, w);
        }
    }

    MonteCarloEstimate out;
    out.trials = trials;
    out.successes = std::accumulate(successes.begin(), successes.end(), std::uint64_t{0});
    out.estimate = static_cast<double>(out.successes) / static_cast<double>(trials);
    out.standard_error = std::sqrt(out.estimate * (1.0 - out.estimate) / static_cast<double>(trials));
    return out;
}

}  // namespace danku

#endif  // DANKU_PARTITION_HPP
