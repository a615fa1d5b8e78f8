#ifndef DANKU_CONTRACT_HPP
#define DANKU_CONTRACT_HPP

#include <danku/chain.hpp>
#include <danku/commitments.hpp>
#include <danku/errors.hpp>
#include <danku/fixed_point.hpp>
#include <danku/fraction.hpp>
#include <danku/network.hpp>
#include <danku/partition.hpp>

#include <algorithm>
#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace danku {

struct ContractConfig {
    std::uint64_t reward = 0;
    std::uint64_t submission_period = 0;
    std::uint64_t evaluation_period = 0;
    std::uint64_t test_reveal_period = 0;
    std::uint64_t init2_block_limit = 5;
    std::uint64_t group_size = 5;
    Fraction training_fraction{4, 5};
    FixedPoint min_accuracy{0};
    ModelDefinition model_shape;
    Scale scale;

    void validate() const {
        if (reward == 0) throw ConfigError("contract.reward", "must be positive");
        if (submission_period == 0) throw ConfigError("contract.submission_period", "must be at least 1");
        if (evaluation_period == 0) throw ConfigError("contract.evaluation_period", "must be at least 1");
        if (test_reveal_period == 0) throw ConfigError("contract.test_reveal_period", "must be at least 1");
        if (init2_block_limit == 0) throw ConfigError("contract.init2_block_limit", "must be at least 1");
        if (group_size == 0) throw ConfigError("contract.group_size", "must be at least 1");
        if (training_fraction.num <= 0 || training_fraction.num >= training_fraction.den) {
            throw ConfigError("contract.training_fraction", "must lie strictly between 0 and 1");
        }
        scale.validate();
        if (min_accuracy.mantissa < 0 || min_accuracy.mantissa > scale.denominator()) {
            throw ConfigError("contract.min_accuracy", "must lie in [0, 1]");
        }
        try {
            model_shape.validate();
        } catch (const ShapeMismatchError& e) {
            throw ConfigError("contract.model_shape", e.what());
        }
    }

    PartitionConfig partition_config(std::uint64_t group_count) const {
        return PartitionConfig{group_count, training_fraction, init2_block_limit};
    }
};

enum class Phase { Init1Done, Init2Done, TrainingRevealed, TestRevealed, Finalized, Cancelled };

inline std::string_view to_string(Phase phase) noexcept {
    switch (phase) {
        case Phase::Init1Done: return "Init1Done";
        case Phase::Init2Done: return "Init2Done";
        case Phase::TrainingRevealed: return "TrainingRevealed";
        case Phase::TestRevealed: return "TestRevealed";
        case Phase::Finalized: return "Finalized";
        case Phase::Cancelled: return "Cancelled";
    }
    return "?";
}

inline bool is_terminal(Phase phase) noexcept {
    return phase == Phase::Finalized || phase == Phase::Cancelled;
}

enum class Rejection {
    DepositMismatch,
    InvalidCommitments,
    InvalidConfig,
    WrongPhase,
    Unauthorized,
    WindowClosed,
    InsufficientHistory,
    WrongIndexSet,
    DigestMismatch,
    MalformedReveal,
    ShapeMismatch,
    UnknownSubmission,
    AlreadyEvaluated,
    OutOfGas,
};

inline std::string_view to_string(Rejection r) noexcept {
    switch (r) {
        case Rejection::DepositMismatch: return "deposit_mismatch";
        case Rejection::InvalidCommitments: return "invalid_commitments";
        case Rejection::InvalidConfig: return "invalid_config";
        case Rejection::WrongPhase: return "wrong_phase";
        case Rejection::Unauthorized: return "unauthorized";
        case Rejection::WindowClosed: return "window_closed";
        case Rejection::InsufficientHistory: return "insufficient_history";
        case Rejection::WrongIndexSet: return "wrong_index_set";
        case Rejection::DigestMismatch: return "digest_mismatch";
        case Rejection::MalformedReveal: return "malformed_reveal";
        case Rejection::ShapeMismatch: return "shape_mismatch";
        case Rejection::UnknownSubmission: return "unknown_submission";
        case Rejection::AlreadyEvaluated: return "already_evaluated";
        case Rejection::OutOfGas: return "out_of_gas";
    }
    return "?";
}

/// A rejected transaction. The contract state is left unchanged.
class ContractError : public Error {
public:
    ContractError(Rejection reason, const std::string& what)
        : Error(std::string(to_string(reason)) + ": " + what), reason_(reason) {}

    Rejection reason() const noexcept { return reason_; }

private:
    Rejection reason_;
};

struct Event {
    std::uint64_t height = 0;
    std::string operation;
    Address caller;
    std::string outcome;
    std::uint64_t gas_used = 0;
    std::string detail;

    friend bool operator==(const Event&, const Event&) = default;
};

using EventLog = std::vector<Event>;

struct Payout {
    Address to;
    std::uint64_t amount = 0;
    std::uint64_t height = 0;
    bool refund = false;
};

/// Committed group index together with the data and nonce revealed for it.
struct GroupReveal {
    std::uint64_t index = 0;
    SaltedGroup data;
};

struct BestModel {
    std::uint64_t submission_id = 0;
    FixedPoint score;
};

/// Outcome text and free-form detail for one transaction's log record.
struct TxNote {
    std::string outcome = "accepted";
    std::string detail;
};

struct Deadlines {
    std::uint64_t init2 = 0;
    std::optional<std::uint64_t> submission;
    std::optional<std::uint64_t> test_reveal;
    std::optional<std::uint64_t> evaluation;
};

enum class EvaluationSource { None, Testing, TrainingFallback };

inline std::string_view to_string(EvaluationSource s) noexcept {
    switch (s) {
        case EvaluationSource::None: return "none";
        case EvaluationSource::Testing: return "testing";
        case EvaluationSource::TrainingFallback: return "training_fallback";
    }
    return "?";
}

/// The DanKu contract: commit, partition, reveal, submit, evaluate, pay.
///
/// Every operation takes the chain it executes on; the transaction is treated
/// as included in the next block, so "now" is `chain.height()`. Deadlines are
/// inclusive. Accepted and rejected calls are appended to the event log given
/// at construction, when there is one. Mutations must be serialized.
class DankuContract {
public:
    /// Creates the contract, crediting `deposit` to escrow.
    static DankuContract init1(const Address& organizer,
                               const ContractConfig& config,
                               std::vector<Digest> commitments,
                               std::uint64_t deposit,
                               const ChainState& chain,
                               const GasSchedule& gas_schedule = {},
                               EventLog* log = nullptr) {
        const std::uint64_t now = chain.height();
        const std::uint64_t gas_used = gas::kTransactionBase + commitments.size() * gas::kPerHashedWord;
        auto reject = [&](Rejection r, const std::string& what) {
            if (log) {
                log->push_back(Event{now, "init1", organizer, "rejected",
                                     r == Rejection::OutOfGas ? gas_schedule.gas_limit : gas::kTransactionBase,
                                     std::string(to_string(r)) + ": " + what});
            }
            throw ContractError(r, what);
        };
        try {
            config.validate();
        } catch (const ConfigError& e) {
            reject(Rejection::InvalidConfig, e.what());
        }
        if (deposit != config.reward) {
            reject(Rejection::DepositMismatch,
                   "deposit " + std::to_string(deposit) + " != reward " + std::to_string(config.reward));
        }
        if (commitments.empty()) {
            reject(Rejection::InvalidCommitments, "no commitments");
        }
        try {
            config.partition_config(commitments.size()).validate();
        } catch (const ConfigError& e) {
            reject(Rejection::InvalidCommitments, e.what());
        }
        if (gas_used > gas_schedule.gas_limit) {
            reject(Rejection::OutOfGas, GasLimitExceeded(gas_used, gas_schedule.gas_limit).what());
        }

        DankuContract c(organizer, config, std::move(commitments), gas_schedule, log);
        c.escrow_ = deposit;
        c.deadlines_.init2 = now + config.init2_block_limit;
        c.created_at_ = now;
        c.record(now, "init1", organizer, "accepted", gas_used,
                 std::to_string(c.commitments_.size()) + " commitments, escrow " + std::to_string(deposit));
        return c;
    }

    enum class Init2Outcome { Partitioned, Cancelled };

    /// Triggers the block-hash partition. Past the deadline the contract is
    /// cancelled and the organizer refunded instead.
    Init2Outcome init2(const Address& caller, const ChainState& chain) {
        return transact("init2", caller, chain, [&](std::uint64_t now, TxNote& note) {
            require_phase(Phase::Init1Done);
            require_organizer(caller);
            if (now > deadlines_.init2) {
                cancel_with_refund(now);
                note.outcome = "cancelled";
                note.detail = "deadline " + std::to_string(deadlines_.init2) + " passed; organizer refunded";
                return std::pair{gas::kTransactionBase, Init2Outcome::Cancelled};
            }
            const PartitionConfig pc = config_.partition_config(commitments_.size());
            const std::uint64_t gas_used = gas::kTransactionBase + pc.training_count() * gas::kPerHashedWord +
                                           pc.group_count;
            charge(gas_used);
            if (now == 0) {
                throw ContractError(Rejection::InsufficientHistory, "no mined blocks");
            }
            try {
                partition_ = randomly_select_index(pc, chain, now - 1);
            } catch (const OutOfRangeError& e) {
                throw ContractError(Rejection::InsufficientHistory, e.what());
            }
            set_phase(Phase::Init2Done);
            note.detail = "training " + std::to_string(partition_->training_indexes.size()) + ", testing " +
                     std::to_string(partition_->testing_indexes.size());
            return std::pair{gas_used, Init2Outcome::Partitioned};
        });
    }

    /// Reveals the training groups; opens the submission window.
    void init3(const Address& caller, const ChainState& chain, const std::vector<GroupReveal>& reveals) {
        transact("init3", caller, chain, [&](std::uint64_t now, TxNote& note) {
            require_phase(Phase::Init2Done);
            require_organizer(caller);
            const std::uint64_t gas_used = gas::kTransactionBase + reveal_words(reveals) * gas::kPerHashedWord;
            charge(gas_used);
            check_reveals(reveals, partition_->training_indexes);
            revealed_training_ = ordered(reveals, partition_->training_indexes);
            deadlines_.submission = now + config_.submission_period;
            deadlines_.test_reveal = *deadlines_.submission + config_.test_reveal_period;
            deadlines_.evaluation = *deadlines_.test_reveal + config_.evaluation_period;
            set_phase(Phase::TrainingRevealed);
            note.detail = std::to_string(reveals.size()) + " training groups; submissions until " +
                     std::to_string(*deadlines_.submission);
            return std::pair{gas_used, 0};
        });
    }

    std::uint64_t submit_model(const Address& caller,
                               const ChainState& chain,
                               ModelDefinition model,
                               WeightsBiases params,
                               Address payment_address) {
        return transact("submit_model", caller, chain, [&](std::uint64_t now, TxNote& note) {
            require_phase(Phase::TrainingRevealed);
            if (now > *deadlines_.submission) {
                throw ContractError(Rejection::WindowClosed,
                                    "submission window closed at " + std::to_string(*deadlines_.submission));
            }
            if (model != config_.model_shape) {
                throw ContractError(Rejection::ShapeMismatch, "model definition differs from the contract's");
            }
            try {
                check_shapes(model, params);
            } catch (const ShapeMismatchError& e) {
                throw ContractError(Rejection::ShapeMismatch, e.what());
            }
            std::uint64_t words = 0;
            for (const DenseLayer& l : params.layers) words += l.weights.size() + l.biases.size();
            const std::uint64_t gas_used = gas::kTransactionBase + words;
            charge(gas_used);

            Submission s;
            s.id = submissions_.size();
            s.model = std::move(model);
            s.params = std::move(params);
            s.payment_address = std::move(payment_address);
            s.submitter = caller;
            s.submitted_at = now;
            submissions_.push_back(std::move(s));
            scores_.emplace_back();
            note.detail = "id " + std::to_string(submissions_.back().id);
            return std::pair{gas_used, submissions_.back().id};
        });
    }

    /// Reveals the testing groups after submissions close, before the test
    /// reveal deadline.
    void reveal_test_data(const Address& caller, const ChainState& chain, const std::vector<GroupReveal>& reveals) {
        transact("reveal_test_data", caller, chain, [&](std::uint64_t now, TxNote& note) {
            require_phase(Phase::TrainingRevealed);
            require_organizer(caller);
            if (now <= *deadlines_.submission) {
                throw ContractError(Rejection::WindowClosed, "submission window still open until " +
                                                                 std::to_string(*deadlines_.submission));
            }
            if (now > *deadlines_.test_reveal) {
                throw ContractError(Rejection::WindowClosed,
                                    "test reveal period ended at " + std::to_string(*deadlines_.test_reveal));
            }
            const std::uint64_t gas_used = gas::kTransactionBase + reveal_words(reveals) * gas::kPerHashedWord;
            charge(gas_used);
            check_reveals(reveals, partition_->testing_indexes);
            revealed_testing_ = ordered(reveals, partition_->testing_indexes);
            set_phase(Phase::TestRevealed);
            note.detail = std::to_string(reveals.size()) + " testing groups";
            return std::pair{gas_used, 0};
        });
    }

    /// Scores one submission on the evaluation dataset. A score at or above
    /// `min_accuracy` becomes the best model when it is strictly better, or
    /// equal and submitted earlier than the incumbent.
    FixedPoint evaluate_model(const Address& caller, const ChainState& chain, std::uint64_t submission_id) {
        return transact("evaluate_model", caller, chain, [&](std::uint64_t now, TxNote& note) {
            require_evaluation_window(now);
            if (submission_id >= submissions_.size()) {
                throw ContractError(Rejection::UnknownSubmission, "no submission " + std::to_string(submission_id));
            }
            if (scores_[submission_id]) {
                throw ContractError(Rejection::AlreadyEvaluated,
                                    "submission " + std::to_string(submission_id) + " already evaluated");
            }
            const std::vector<DataPoint> dataset = evaluation_dataset();
            const std::uint64_t gas_used = gas::kTransactionBase + evaluation_gas(dataset.size());
            charge(gas_used);
            const FixedPoint score = score_submission(submission_id, dataset);
            note.detail = "id " + std::to_string(submission_id) + " score " + std::to_string(score.mantissa) + "/" +
                     std::to_string(config_.scale.denominator()) + (best_ && best_->submission_id == submission_id
                                                                         ? " (new best)"
                                                                         : "");
            return std::pair{gas_used, score};
        });
    }

    /// Evaluates every unevaluated submission in one transaction, in id order.
    /// Its gas grows with the submission count and can exceed the limit.
    void evaluate_all_models(const Address& caller, const ChainState& chain) {
        transact("evaluate_all_models", caller, chain, [&](std::uint64_t now, TxNote& note) {
            require_evaluation_window(now);
            const std::vector<DataPoint> dataset = evaluation_dataset();
            std::uint64_t pending = 0;
            for (const auto& s : scores_) pending += !s;
            const std::uint64_t gas_used = gas::kTransactionBase + pending * evaluation_gas(dataset.size());
            charge(gas_used);
            for (std::uint64_t id = 0; id < submissions_.size(); ++id) {
                if (!scores_[id]) score_submission(id, dataset);
            }
            note.detail = std::to_string(pending) + " submissions evaluated";
            return std::pair{gas_used, 0};
        });
    }

    /// Pays escrow to the best model's payment address, or back to the
    /// organizer when there is none. Any caller, after the evaluation window.
    Payout finalize_contract(const Address& caller, const ChainState& chain) {
        return transact("finalize_contract", caller, chain, [&](std::uint64_t now, TxNote& note) {
            if (phase_ != Phase::TrainingRevealed && phase_ != Phase::TestRevealed) {
                throw ContractError(Rejection::WrongPhase,
                                    "cannot finalize in phase " + std::string(to_string(phase_)));
            }
            if (now <= *deadlines_.evaluation) {
                throw ContractError(Rejection::WindowClosed,
                                    "evaluation window open until " + std::to_string(*deadlines_.evaluation));
            }
            charge(gas::kTransactionBase);
            Payout p;
            if (best_) {
                p = pay(submissions_[best_->submission_id].payment_address, now, false);
            } else {
                p = pay(organizer_, now, true);
            }
            set_phase(Phase::Finalized);
            note.detail = (p.refund ? "refund " : "reward ") + std::to_string(p.amount) + " to " + p.to;
            return std::pair{gas::kTransactionBase, p};
        });
    }

    void cancel_contract(const Address& caller, const ChainState& chain) {
        transact("cancel_contract", caller, chain, [&](std::uint64_t now, TxNote& note) {
            require_organizer(caller);
            if (phase_ != Phase::Init1Done && phase_ != Phase::Init2Done) {
                throw ContractError(Rejection::WrongPhase,
                                    "cannot cancel in phase " + std::string(to_string(phase_)));
            }
            charge(gas::kTransactionBase);
            cancel_with_refund(now);
            note.detail = "refund " + std::to_string(config_.reward) + " to " + organizer_;
            return std::pair{gas::kTransactionBase, 0};
        });
    }

    const std::vector<std::uint64_t>& get_training_index() const { return partition().training_indexes; }
    const std::vector<std::uint64_t>& get_testing_index() const { return partition().testing_indexes; }

    std::vector<std::uint64_t> get_submission_ids(const Address& submitter) const {
        std::vector<std::uint64_t> ids;
        for (const Submission& s : submissions_) {
            if (s.submitter == submitter) ids.push_back(s.id);
        }
        return ids;
    }

    std::size_t get_prediction(std::uint64_t submission_id, std::span<const std::int64_t> inputs) const {
        if (submission_id >= submissions_.size()) {
            throw ContractError(Rejection::UnknownSubmission, "no submission " + std::to_string(submission_id));
        }
        const Submission& s = submissions_[submission_id];
        return predict(s.model, s.params, lift_inputs(inputs, config_.scale), config_.scale);
    }

    Phase phase() const noexcept { return phase_; }
    const std::vector<Phase>& phase_history() const noexcept { return phase_history_; }
    const ContractConfig& config() const noexcept { return config_; }
    const Address& organizer() const noexcept { return organizer_; }
    const std::vector<Digest>& commitments() const noexcept { return commitments_; }
    std::uint64_t escrow_balance() const noexcept { return escrow_; }
    const std::vector<Payout>& payouts() const noexcept { return payouts_; }
    std::uint64_t total_paid() const noexcept {
        std::uint64_t total = 0;
        for (const Payout& p : payouts_) total += p.amount;
        return total;
    }
    const std::vector<Submission>& submissions() const noexcept { return submissions_; }
    const std::vector<std::optional<FixedPoint>>& scores() const noexcept { return scores_; }
    const std::optional<BestModel>& best() const noexcept { return best_; }
    const Deadlines& deadlines() const noexcept { return deadlines_; }
    const std::optional<PartitionResult>& partition_result() const noexcept { return partition_; }
    const std::vector<SaltedGroup>& revealed_training() const noexcept { return revealed_training_; }
    const std::vector<SaltedGroup>& revealed_testing() const noexcept { return revealed_testing_; }
    std::uint64_t created_at() const noexcept { return created_at_; }

    /// Dataset the evaluations so far have used; `None` before the first one.
    EvaluationSource evaluation_source() const noexcept { return evaluation_source_; }

    /// Gas an evaluation of one submission over `points` data points costs,
    /// excluding the transaction base.
    std::uint64_t evaluation_gas(std::uint64_t points) const {
        return (points * forward_pass_ops(config_.model_shape) + 1) * gas::kPerFixedPointOp;
    }

    /// Points currently used for scoring: the testing groups once revealed,
    /// otherwise the training groups.
    std::vector<DataPoint> evaluation_dataset() const {
        const auto& source = revealed_testing_.empty() ? revealed_training_ : revealed_testing_;
        std::vector<DataPoint> points;
        for (const SaltedGroup& g : source) {
            points.insert(points.end(), g.group.points.begin(), g.group.points.end());
        }
        return points;
    }

private:
    DankuContract(Address organizer,
                  ContractConfig config,
                  std::vector<Digest> commitments,
                  GasSchedule gas_schedule,
                  EventLog* log)
        : organizer_(std::move(organizer)),
          config_(std::move(config)),
          commitments_(std::move(commitments)),
          gas_schedule_(gas_schedule),
          log_(log) {}

    /// Runs `body(now, note) -> {gas, result}`; logs the outcome and
    /// rethrows rejections.
    template <class Body>
    auto transact(const char* operation, const Address& caller, const ChainState& chain, Body&& body)
        -> decltype(body(std::uint64_t{}, std::declval<TxNote&>()).second) {
        const std::uint64_t now = chain.height();
        TxNote note;
        try {
            auto [gas_used, result] = body(now, note);
            record(now, operation, caller, note.outcome.c_str(), gas_used, std::move(note.detail));
            return result;
        } catch (const ContractError& e) {
            const std::uint64_t gas_used =
                e.reason() == Rejection::OutOfGas ? gas_schedule_.gas_limit : gas::kTransactionBase;
            record(now, operation, caller, "rejected", gas_used, e.what());
            throw;
        }
    }

    void record(std::uint64_t height,
                const char* op,
                const Address& caller,
                const char* outcome,
                std::uint64_t gas_used,
                std::string detail) {
        if (log_) {
            log_->push_back(Event{height, op, caller, outcome, gas_used, std::move(detail)});
        }
    }

    void charge(std::uint64_t gas_used) const {
        if (gas_used > gas_schedule_.gas_limit) {
            throw ContractError(Rejection::OutOfGas, GasLimitExceeded(gas_used, gas_schedule_.gas_limit).what());
        }
    }

    void require_phase(Phase expected) const {
        if (phase_ != expected) {
            throw ContractError(Rejection::WrongPhase, "expected phase " + std::string(to_string(expected)) +
                                                           ", contract is " + std::string(to_string(phase_)));
        }
    }

    void require_organizer(const Address& caller) const {
        if (caller != organizer_) {
            throw ContractError(Rejection::Unauthorized, caller + " is not the organizer");
        }
    }

    void require_evaluation_window(std::uint64_t now) const {
        if (phase_ == Phase::TestRevealed) {
            if (now > *deadlines_.evaluation) {
                throw ContractError(Rejection::WindowClosed,
                                    "evaluation window closed at " + std::to_string(*deadlines_.evaluation));
            }
            return;
        }
        if (phase_ != Phase::TrainingRevealed) {
            throw ContractError(Rejection::WrongPhase,
                                "no evaluation in phase " + std::string(to_string(phase_)));
        }
        if (now <= *deadlines_.test_reveal) {
            throw ContractError(Rejection::WindowClosed,
                                "test data not revealed and reveal period open until " +
                                    std::to_string(*deadlines_.test_reveal));
        }
        if (now > *deadlines_.evaluation) {
            throw ContractError(Rejection::WindowClosed,
                                "evaluation window closed at " + std::to_string(*deadlines_.evaluation));
        }
    }

    const PartitionResult& partition() const {
        if (!partition_) {
            throw ContractError(Rejection::WrongPhase, "indexes are not selected before init2");
        }
        return *partition_;
    }

    static std::uint64_t reveal_words(const std::vector<GroupReveal>& reveals) {
        std::uint64_t words = 0;
        for (const GroupReveal& r : reveals) {
            for (const DataPoint& p : r.data.group.points) words += p.inputs.size() + 1;
            words += 1;
        }
        return words;
    }

    void check_reveals(const std::vector<GroupReveal>& reveals, const std::vector<std::uint64_t>& expected) const {
        std::set<std::uint64_t> want(expected.begin(), expected.end());
        std::set<std::uint64_t> got;
        for (const GroupReveal& r : reveals) {
            if (!got.insert(r.index).second) {
                throw ContractError(Rejection::WrongIndexSet, "group " + std::to_string(r.index) + " revealed twice");
            }
        }
        if (got != want) {
            throw ContractError(Rejection::WrongIndexSet, "revealed index set does not match the partition");
        }
        for (const GroupReveal& r : reveals) {
            const DataGroup& g = r.data.group;
            if (g.points.size() != config_.group_size) {
                throw ContractError(Rejection::MalformedReveal, "group " + std::to_string(r.index) + " has " +
                                                                    std::to_string(g.points.size()) + " points");
            }
            for (const DataPoint& p : g.points) {
                if (p.inputs.size() != config_.model_shape.input_dim()) {
                    throw ContractError(Rejection::MalformedReveal,
                                        "group " + std::to_string(r.index) + " has wrong input dimension");
                }
                if (p.label < 0 || static_cast<std::uint64_t>(p.label) >= config_.model_shape.output_dim()) {
                    throw ContractError(Rejection::MalformedReveal,
                                        "group " + std::to_string(r.index) + " has label out of range");
                }
            }
            if (!verify_reveal(commitments_[r.index], r.data)) {
                throw ContractError(Rejection::DigestMismatch,
                                    "group " + std::to_string(r.index) + " does not match its commitment");
            }
        }
    }

    static std::vector<SaltedGroup> ordered(const std::vector<GroupReveal>& reveals,
                                            const std::vector<std::uint64_t>& order) {
        std::vector<SaltedGroup> out;
        out.reserve(order.size());
        for (std::uint64_t index : order) {
            auto it = std::find_if(reveals.begin(), reveals.end(), [&](const GroupReveal& r) { return r.index == index; });
            out.push_back(it->data);
        }
        return out;
    }

    FixedPoint score_submission(std::uint64_t id, const std::vector<DataPoint>& dataset) {
        const Submission& s = submissions_[id];
        const FixedPoint score = accuracy(s.model, s.params, dataset, config_.scale);
        scores_[id] = score;
        evaluation_source_ =
            revealed_testing_.empty() ? EvaluationSource::TrainingFallback : EvaluationSource::Testing;
        // Equal scores go to the earlier submission, so a copy evaluated
        // first cannot displace the original.
        if (score >= config_.min_accuracy &&
            (!best_ || score > best_->score || (score == best_->score && id < best_->submission_id))) {
            best_ = BestModel{id, score};
        }
        return score;
    }

    Payout pay(const Address& to, std::uint64_t now, bool refund) {
        Payout p{to, escrow_, now, refund};
        escrow_ = 0;
        payouts_.push_back(p);
        return p;
    }

    void cancel_with_refund(std::uint64_t now) {
        pay(organizer_, now, true);
        set_phase(Phase::Cancelled);
    }

    void set_phase(Phase next) {
        phase_ = next;
        phase_history_.push_back(next);
    }

    Address organizer_;
    ContractConfig config_;
    std::vector<Digest> commitments_;
    GasSchedule gas_schedule_;
    EventLog* log_ = nullptr;

    Phase phase_ = Phase::Init1Done;
    std::vector<Phase> phase_history_{Phase::Init1Done};
    std::uint64_t escrow_ = 0;
    std::uint64_t created_at_ = 0;
    Deadlines deadlines_;
    std::optional<PartitionResult> partition_;
    std::vector<SaltedGroup> revealed_training_;
    std::vector<SaltedGroup> revealed_testing_;
    std::vector<Submission> submissions_;
    std::vector<std::optional<FixedPoint>> scores_;
    std::optional<BestModel> best_;
    EvaluationSource evaluation_source_ = EvaluationSource::None;
    std::vector<Payout> payouts_;
};

}  // namespace danku

#endif  // DANKU_CONTRACT_HPP
