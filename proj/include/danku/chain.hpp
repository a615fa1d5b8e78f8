#ifndef DANKU_CHAIN_HPP
#define DANKU_CHAIN_HPP

#include <danku/errors.hpp>
#include <danku/keccak.hpp>
#include <danku/word.hpp>

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace danku {

struct Block {
    std::uint64_t number = 0;
    Digest hash{};

    friend bool operator==(const Block&, const Block&) = default;
};

/// Thrown when a transaction's metered gas exceeds the per-transaction limit.
class GasLimitExceeded : public Error {
public:
    GasLimitExceeded(std::uint64_t used, std::uint64_t limit)
        : Error("gas " + std::to_string(used) + " exceeds limit " + std::to_string(limit)),
          used_(used),
          limit_(limit) {}

    std::uint64_t used() const noexcept { return used_; }
    std::uint64_t limit() const noexcept { return limit_; }

private:
    std::uint64_t used_;
    std::uint64_t limit_;
};

struct GasSchedule {
    std::uint64_t storage_gas_per_kib = 6'068'352;
    std::uint64_t gas_limit = 8'000'000;
    std::uint64_t gas_price_gwei = 4;
    std::uint64_t eth_usd = 1100;

    void validate() const {
        if (storage_gas_per_kib == 0) throw ConfigError("gas.storage_gas_per_kib", "must be positive");
        if (gas_limit == 0) throw ConfigError("gas.gas_limit", "must be positive");
        if (gas_price_gwei == 0) throw ConfigError("gas.gas_price_gwei", "must be positive");
        if (eth_usd == 0) throw ConfigError("gas.eth_usd", "must be positive");
    }

    void check_limit(std::uint64_t gas_used) const {
        if (gas_used > gas_limit) {
            throw GasLimitExceeded(gas_used, gas_limit);
        }
    }
};

/// Coarse compute-gas model used by the contract's execution wrapper.
namespace gas {
inline constexpr std::uint64_t kTransactionBase = 21'000;
inline constexpr std::uint64_t kPerHashedWord = 1;
inline constexpr std::uint64_t kPerFixedPointOp = 1;
}  // namespace gas

/// `floor(bytes * storage_gas_per_kib / 1024)`, linear in the payload size.
inline std::uint64_t storage_gas(const GasSchedule& schedule, std::uint64_t payload_bytes) {
    const unsigned __int128 product =
        static_cast<unsigned __int128>(payload_bytes) * schedule.storage_gas_per_kib;
    const unsigned __int128 gas = product / 1024;
    if (gas > std::numeric_limits<std::uint64_t>::max()) {
        throw ArithmeticOverflowError("storage gas exceeds 64 bits");
    }
    return static_cast<std::uint64_t>(gas);
}

struct StorageCost {
    std::uint64_t gas = 0;
    Uint256 wei = 0;
    double ether = 0.0;
    double usd = 0.0;
};

inline constexpr std::uint64_t kWeiPerGwei = 1'000'000'000ULL;
inline constexpr std::uint64_t kWeiPerEther = 1'000'000'000'000'000'000ULL;

inline double wei_to_ether(const Uint256& wei) {
    const Uint256 whole = wei / kWeiPerEther;
    const Uint256 frac = wei % kWeiPerEther;
    return whole.convert_to<double>() + frac.convert_to<double>() / static_cast<double>(kWeiPerEther);
}

inline double ether_to_usd(double ether, const GasSchedule& schedule) {
    return ether * static_cast<double>(schedule.eth_usd);
}

inline StorageCost storage_cost_report(const GasSchedule& schedule, std::uint64_t payload_bytes) {
    StorageCost cost;
    cost.gas = storage_gas(schedule, payload_bytes);
    cost.wei = Uint256(cost.gas) * schedule.gas_price_gwei * kWeiPerGwei;
    cost.ether = wei_to_ether(cost.wei);
    cost.usd = ether_to_usd(cost.ether, schedule);
    return cost;
}

/// Deterministic append-only block sequence. Honest block hashes are
/// `keccak256(seed ‖ parent ‖ number)` over 32-byte words; the genesis parent
/// is the zero word.
///
/// Single writer: mining must be serialized. Const queries may run
/// concurrently between writes.
class ChainState {
public:
    using HashPredicate = std::function<bool(const Digest&)>;

    explicit ChainState(std::uint64_t seed = 0) : seed_(seed) {}

    std::uint64_t seed() const noexcept { return seed_; }

    /// Number of mined blocks, which is also the number of the next block.
    std::uint64_t height() const noexcept { return blocks_.size(); }

    const std::vector<Block>& blocks() const noexcept { return blocks_; }

    const Block& tip() const {
        if (blocks_.empty()) {
            throw OutOfRangeError("chain has no blocks");
        }
        return blocks_.back();
    }

    const Digest& blockhash(std::uint64_t number) const {
        if (number >= blocks_.size()) {
            throw OutOfRangeError("blockhash(" + std::to_string(number) + ") requested at height " +
                                  std::to_string(blocks_.size()));
        }
        return blocks_[number].hash;
    }

    /// Hash the next block would get from candidate `index`. Candidate 0 is
    /// the honest hash; later candidates append `index` as an extra word.
    Digest candidate_hash(std::uint64_t index) const {
        Keccak256 h;
        const Word seed_word = word_from_uint(seed_);
        const Word parent = blocks_.empty() ? Word{} : blocks_.back().hash;
        const Word number = word_from_uint(height());
        h.update(seed_word).update(parent).update(number);
        if (index > 0) {
            h.update(word_from_uint(index));
        }
        return h.finalize();
    }

    const Block& mine_block() { return append(candidate_hash(0)); }

    /// Mines `candidates` alternative blocks and keeps the first whose hash
    /// satisfies `choose`, else the last one generated.
    const Block& mine_block_adversarial(std::uint64_t candidates, const HashPredicate& choose) {
        if (candidates == 0) {
            throw OutOfRangeError("mine_block_adversarial needs at least one candidate");
        }
        Digest picked{};
        for (std::uint64_t i = 0; i < candidates; ++i) {
            picked = candidate_hash(i);
            if (choose(picked)) {
                break;
            }
        }
        return append(picked);
    }

private:
    const Block& append(const Digest& hash) {
        blocks_.push_back(Block{height(), hash});
        return blocks_.back();
    }

    std::uint64_t seed_;
    std::vector<Block> blocks_;
};

}  // namespace danku

#endif  // DANKU_CHAIN_HPP
