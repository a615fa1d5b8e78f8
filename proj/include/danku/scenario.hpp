#ifndef DANKU_SCENARIO_HPP
#define DANKU_SCENARIO_HPP

// Scenario configuration ("danku-scenario/1") and the runner that replays a
// schedule of organizer, submitter and miner actions against a fresh chain
// and contract.

#include <danku/chain.hpp>
#include <danku/commitments.hpp>
#include <danku/contract.hpp>
#include <danku/errors.hpp>
#include <danku/io.hpp>
#include <danku/network.hpp>
#include <danku/partition.hpp>
#include <danku/report.hpp>

#include <algorithm>
#include <filesystem>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace danku {

inline constexpr const char* kScenarioSchema = "danku-scenario/1";

enum class Role { Organizer, Submitter, Miner };
enum class Behavior { Honest, WithholdTestReveal, TamperReveal, DuplicateResubmit, BlockGrinding };
enum class Action { Init1, Init2, Init3, Submit, RevealTest, Evaluate, EvaluateAll, Finalize, Cancel };

inline std::string_view to_string(Role r) noexcept {
    switch (r) {
        case Role::Organizer: return "organizer";
        case Role::Submitter: return "submitter";
        case Role::Miner: return "miner";
    }
    return "?";
}

inline std::string_view to_string(Behavior b) noexcept {
    switch (b) {
        case Behavior::Honest: return "honest";
        case Behavior::WithholdTestReveal: return "withhold_test_reveal";
        case Behavior::TamperReveal: return "tamper_reveal";
        case Behavior::DuplicateResubmit: return "duplicate_resubmit";
        case Behavior::BlockGrinding: return "block_grinding";
    }
    return "?";
}

inline std::string_view to_string(Action a) noexcept {
    switch (a) {
        case Action::Init1: return "init1";
        case Action::Init2: return "init2";
        case Action::Init3: return "init3";
        case Action::Submit: return "submit";
        case Action::RevealTest: return "reveal_test";
        case Action::Evaluate: return "evaluate";
        case Action::EvaluateAll: return "evaluate_all";
        case Action::Finalize: return "finalize";
        case Action::Cancel: return "cancel";
    }
    return "?";
}

/// Name of the contract operation an action calls, as it appears in the log.
inline std::string_view operation_name(Action a) noexcept {
    switch (a) {
        case Action::Submit: return "submit_model";
        case Action::RevealTest: return "reveal_test_data";
        case Action::Evaluate: return "evaluate_model";
        case Action::EvaluateAll: return "evaluate_all_models";
        case Action::Finalize: return "finalize_contract";
        case Action::Cancel: return "cancel_contract";
        default: return to_string(a);
    }
}

enum class TamperTarget { Test, Training };

struct ActorSpec {
    std::string name;
    Role role = Role::Submitter;
    Behavior behavior = Behavior::Honest;
    Address payment_address;

    std::optional<ModelFile> model;
    std::string copy_of;

    TamperTarget tamper_target = TamperTarget::Test;

    std::uint64_t candidates = 1;
    std::vector<std::uint64_t> favor_testing;
};

struct ScheduleEntry {
    std::uint64_t height = 0;
    std::string actor;
    Action action = Action::Init1;
    std::optional<std::uint64_t> submission;
    std::string target;
};

struct ScenarioConfig {
    std::string name;
    std::uint64_t seed = 0;
    ContractConfig contract;
    GasSchedule gas;
    std::vector<DataPoint> dataset;
    std::vector<ActorSpec> actors;
    std::vector<ScheduleEntry> schedule;

    const ActorSpec* find_actor(const std::string& actor) const {
        for (const ActorSpec& a : actors) {
            if (a.name == actor) return &a;
        }
        return nullptr;
    }

    const ActorSpec& organizer() const {
        for (const ActorSpec& a : actors) {
            if (a.role == Role::Organizer) return a;
        }
        throw ConfigError("actors", "no organizer");
    }

    std::uint64_t group_count() const { return dataset.size() / contract.group_size; }

    /// Rejects, before anything runs, every value the contract would reject.
    void validate() const {
        contract.validate();
        gas.validate();

        if (dataset.empty()) throw ConfigError("dataset", "no data points");
        if (dataset.size() % contract.group_size != 0) {
            throw ConfigError("dataset", std::to_string(dataset.size()) + " points do not split into groups of " +
                                             std::to_string(contract.group_size));
        }
        try {
            contract.partition_config(group_count()).validate();
        } catch (const ConfigError& e) {
            throw ConfigError("contract.training_fraction", e.what());
        }
        for (std::size_t i = 0; i < dataset.size(); ++i) {
            const DataPoint& p = dataset[i];
            const std::string path = "dataset[" + std::to_string(i) + "]";
            if (p.inputs.size() != contract.model_shape.input_dim()) {
                throw ConfigError(path, "has " + std::to_string(p.inputs.size()) + " inputs, model expects " +
                                            std::to_string(contract.model_shape.input_dim()));
            }
            if (p.label < 0 || static_cast<std::uint64_t>(p.label) >= contract.model_shape.output_dim()) {
                throw ConfigError(path, "label " + std::to_string(p.label) + " outside [0, " +
                                            std::to_string(contract.model_shape.output_dim()) + ")");
            }
        }

        std::set<std::string> names;
        int organizers = 0;
        for (std::size_t i = 0; i < actors.size(); ++i) {
            const ActorSpec& a = actors[i];
            const std::string path = "actors[" + std::to_string(i) + "]";
            if (a.name.empty()) throw ConfigError(path + ".name", "must not be empty");
            if (!names.insert(a.name).second) throw ConfigError(path + ".name", "duplicate actor '" + a.name + "'");
            organizers += a.role == Role::Organizer;
            validate_actor(a, path);
        }
        if (organizers != 1) {
            throw ConfigError("actors", "exactly one organizer required, found " + std::to_string(organizers));
        }

        std::uint64_t last = 0;
        for (std::size_t i = 0; i < schedule.size(); ++i) {
            const ScheduleEntry& e = schedule[i];
            const std::string path = "schedule[" + std::to_string(i) + "]";
            if (e.height < last) throw ConfigError(path + ".height", "heights must be non-decreasing");
            last = e.height;
            const ActorSpec* a = find_actor(e.actor);
            if (!a) throw ConfigError(path + ".actor", "unknown actor '" + e.actor + "'");
            validate_action(*a, e, path);
        }
    }

private:
    void validate_actor(const ActorSpec& a, const std::string& path) const {
        switch (a.role) {
            case Role::Organizer:
                if (a.behavior != Behavior::Honest && a.behavior != Behavior::WithholdTestReveal &&
                    a.behavior != Behavior::TamperReveal) {
                    throw ConfigError(path + ".behavior", "not an organizer behavior");
                }
                break;
            case Role::Submitter:
                if (a.behavior == Behavior::Honest) {
                    if (!a.model) throw ConfigError(path + ".model", "honest submitter needs a model");
                    if (a.model->model != contract.model_shape) {
                        throw ConfigError(path + ".model.layer_sizes", "does not match contract.model_shape");
                    }
                    if (a.model->scale != contract.scale) {
                        throw ConfigError(path + ".model.scale_bits", "does not match contract.scale_bits");
                    }
                } else if (a.behavior == Behavior::DuplicateResubmit) {
                    const ActorSpec* victim = find_actor(a.copy_of);
                    if (!victim || victim->role != Role::Submitter || victim->name == a.name) {
                        throw ConfigError(path + ".copy_of", "must name another submitter");
                    }
                } else {
                    throw ConfigError(path + ".behavior", "not a submitter behavior");
                }
                break;
            case Role::Miner:
                if (a.behavior != Behavior::Honest && a.behavior != Behavior::BlockGrinding) {
                    throw ConfigError(path + ".behavior", "not a miner behavior");
                }
                if (a.candidates == 0) throw ConfigError(path + ".candidates", "must be at least 1");
                {
                    const PartitionConfig pc = contract.partition_config(group_count());
                    if (a.favor_testing.size() > pc.testing_count()) {
                        throw ConfigError(path + ".favor_testing", "more groups than the testing partition holds");
                    }
                    for (std::uint64_t g : a.favor_testing) {
                        if (g >= pc.group_count) throw ConfigError(path + ".favor_testing", "group index out of range");
                    }
                }
                break;
        }
    }

    void validate_action(const ActorSpec& a, const ScheduleEntry& e, const std::string& path) const {
        switch (e.action) {
            case Action::Init1:
            case Action::Init2:
            case Action::Init3:
            case Action::RevealTest:
            case Action::Cancel:
                if (a.role != Role::Organizer) {
                    throw ConfigError(path + ".action", std::string(to_string(e.action)) + " is an organizer action");
                }
                break;
            case Action::Submit:
                if (a.role != Role::Submitter) throw ConfigError(path + ".action", "submit is a submitter action");
                break;
            case Action::Evaluate:
                if (!e.target.empty()) {
                    const ActorSpec* t = find_actor(e.target);
                    if (!t || t->role != Role::Submitter) {
                        throw ConfigError(path + ".target", "must name a submitter");
                    }
                } else if (!e.submission && a.role != Role::Submitter) {
                    throw ConfigError(path + ".submission", "non-submitters must name a submission or target");
                }
                break;
            case Action::EvaluateAll:
            case Action::Finalize:
                break;
        }
    }
};

namespace detail {

inline std::string dump_scalar(const Json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); }

inline Role parse_role(const Json& v, const std::string& path) {
    const std::string s = dump_scalar(v);
    if (s == "organizer") return Role::Organizer;
    if (s == "submitter") return Role::Submitter;
    if (s == "miner") return Role::Miner;
    throw ConfigError(path, "unknown role '" + s + "'");
}

inline Behavior parse_behavior(const Json& v, const std::string& path) {
    const std::string s = dump_scalar(v);
    for (Behavior b : {Behavior::Honest, Behavior::WithholdTestReveal, Behavior::TamperReveal,
                       Behavior::DuplicateResubmit, Behavior::BlockGrinding}) {
        if (s == to_string(b)) return b;
    }
    throw ConfigError(path, "unknown behavior '" + s + "'");
}

inline Action parse_action(const Json& v, const std::string& path) {
    const std::string s = dump_scalar(v);
    for (Action a : {Action::Init1, Action::Init2, Action::Init3, Action::Submit, Action::RevealTest,
                     Action::Evaluate, Action::EvaluateAll, Action::Finalize, Action::Cancel}) {
        if (s == to_string(a)) return a;
    }
    throw ConfigError(path, "unknown action '" + s + "'");
}

inline Fraction parse_fraction(const Json& v, const std::string& path) {
    try {
        return Fraction::parse(dump_scalar(v));
    } catch (const Error& e) {
        throw ConfigError(path, e.what());
    }
}

/// Uniform integer in [lo, hi] from raw engine output; portable across
/// standard libraries, unlike std::uniform_int_distribution.
inline std::int64_t draw(std::mt19937_64& rng, std::int64_t lo, std::int64_t hi) {
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<std::int64_t>(rng() % span);
}

}  // namespace detail

/// Two-feature, two-class, linearly separable integer points: label is
/// `x1 + x2 > 0`, with points closer than `margin` to the boundary redrawn.
inline std::vector<DataPoint> synthetic_two_class(std::uint64_t count,
                                                  std::uint64_t seed,
                                                  std::int64_t range = 50,
                                                  std::int64_t margin = 5) {
    std::mt19937_64 rng(seed);
    std::vector<DataPoint> points;
    while (points.size() < count) {
        const std::int64_t x1 = detail::draw(rng, -range, range);
        const std::int64_t x2 = detail::draw(rng, -range, range);
        if (std::llabs(x1 + x2) < margin) continue;
        points.push_back(DataPoint{{x1, x2}, x1 + x2 > 0 ? 1 : 0});
    }
    return points;
}

/// Parameters with mantissas uniform in [-2^f, 2^f].
inline WeightsBiases generated_params(const ModelDefinition& model, Scale scale, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    WeightsBiases params = zero_params(model);
    for (DenseLayer& layer : params.layers) {
        for (FixedPoint& w : layer.weights) w.mantissa = detail::draw(rng, -scale.denominator(), scale.denominator());
        for (FixedPoint& b : layer.biases) b.mantissa = detail::draw(rng, -scale.denominator(), scale.denominator());
    }
    return params;
}

inline FixedPoint parse_accuracy(const Json& v, Scale scale, const std::string& path) {
    if (v.is_number_float()) {
        const double d = v.get<double>();
        if (!(d >= 0.0 && d <= 1.0)) throw ConfigError(path, "must lie in [0, 1]");
        return FixedPoint{static_cast<std::int64_t>(std::llround(d * static_cast<double>(scale.denominator())))};
    }
    const Fraction f = detail::parse_fraction(v, path);
    if (f.num < 0 || f.num > f.den) throw ConfigError(path, "must lie in [0, 1]");
    return FixedPoint{static_cast<std::int64_t>(static_cast<__int128>(f.num) * scale.denominator() / f.den)};
}

/// Parses a scenario document; relative file references resolve against
/// `base_dir`.
inline ScenarioConfig scenario_from_json(const Json& j, const std::filesystem::path& base_dir = {}) {
    using detail::as_int;
    using detail::as_uint;
    using detail::require;

    if (!j.is_object()) throw ConfigError("", "scenario must be an object");
    const Json& schema = require(j, "schema", "");
    if (schema != kScenarioSchema) {
        throw ConfigError("schema", "expected \"" + std::string(kScenarioSchema) + "\", got " + schema.dump());
    }

    ScenarioConfig cfg;
    cfg.name = j.value("name", std::string("scenario"));
    cfg.seed = as_uint(require(j, "seed", ""), "seed");

    const Json& c = require(j, "contract", "");
    auto field = [&](const char* key) { return as_uint(require(c, key, "contract."), std::string("contract.") + key); };
    cfg.contract.reward = field("reward");
    cfg.contract.submission_period = field("submission_period");
    cfg.contract.evaluation_period = field("evaluation_period");
    cfg.contract.test_reveal_period = field("test_reveal_period");
    if (c.contains("init2_block_limit")) cfg.contract.init2_block_limit = field("init2_block_limit");
    if (c.contains("group_size")) cfg.contract.group_size = field("group_size");
    if (c.contains("training_fraction")) {
        cfg.contract.training_fraction = detail::parse_fraction(c.at("training_fraction"), "contract.training_fraction");
    }
    if (c.contains("scale_bits")) {
        cfg.contract.scale.bits = static_cast<int>(as_int(c.at("scale_bits"), "contract.scale_bits"));
    }
    cfg.contract.scale.validate();
    for (const Json& s : detail::as_array(require(c, "model_shape", "contract."), "contract.model_shape")) {
        cfg.contract.model_shape.layer_sizes.push_back(as_uint(s, "contract.model_shape"));
    }
    if (c.contains("min_accuracy")) {
        cfg.contract.min_accuracy = parse_accuracy(c.at("min_accuracy"), cfg.contract.scale, "contract.min_accuracy");
    }

    if (j.contains("gas")) {
        const Json& g = j.at("gas");
        if (g.contains("storage_gas_per_kib")) cfg.gas.storage_gas_per_kib = as_uint(g.at("storage_gas_per_kib"), "gas.storage_gas_per_kib");
        if (g.contains("gas_limit")) cfg.gas.gas_limit = as_uint(g.at("gas_limit"), "gas.gas_limit");
        if (g.contains("gas_price_gwei")) cfg.gas.gas_price_gwei = as_uint(g.at("gas_price_gwei"), "gas.gas_price_gwei");
        if (g.contains("eth_usd")) cfg.gas.eth_usd = as_uint(g.at("eth_usd"), "gas.eth_usd");
    }

    const Json& d = require(j, "dataset", "");
    if (d.contains("points")) {
        cfg.dataset = points_from_json(d.at("points"), "dataset.points");
    } else if (d.contains("file")) {
        const std::filesystem::path p = base_dir / d.at("file").get<std::string>();
        const Json file = read_json_file(p.string());
        cfg.dataset = points_from_json(file.is_object() ? require(file, "points", "dataset.file:") : file,
                                       "dataset.file");
    } else if (d.contains("synthetic")) {
        const Json& s = d.at("synthetic");
        cfg.dataset = synthetic_two_class(as_uint(require(s, "points", "dataset.synthetic."), "dataset.synthetic.points"),
                                          as_uint(require(s, "seed", "dataset.synthetic."), "dataset.synthetic.seed"),
                                          s.contains("range") ? as_int(s.at("range"), "dataset.synthetic.range") : 50,
                                          s.contains("margin") ? as_int(s.at("margin"), "dataset.synthetic.margin") : 5);
    } else {
        throw ConfigError("dataset", "expected one of points, file, synthetic");
    }

    const Json& actors = detail::as_array(require(j, "actors", ""), "actors");
    for (std::size_t i = 0; i < actors.size(); ++i) {
        const Json& a = actors[i];
        const std::string path = "actors[" + std::to_string(i) + "].";
        ActorSpec spec;
        spec.name = detail::dump_scalar(require(a, "name", path));
        spec.role = detail::parse_role(require(a, "role", path), path + "role");
        if (a.contains("behavior")) spec.behavior = detail::parse_behavior(a.at("behavior"), path + "behavior");
        spec.payment_address = a.value("payment_address", spec.name);
        if (a.contains("model")) {
            const Json& m = a.at("model");
            if (m.contains("file")) {
                const std::filesystem::path p = base_dir / m.at("file").get<std::string>();
                spec.model = model_from_json(read_json_file(p.string()), path + "model.file:");
            } else if (m.contains("generator")) {
                const Json& g = m.at("generator");
                spec.model = ModelFile{cfg.contract.scale, cfg.contract.model_shape,
                                       generated_params(cfg.contract.model_shape, cfg.contract.scale,
                                                        as_uint(require(g, "seed", path + "model.generator."),
                                                                path + "model.generator.seed"))};
            } else {
                spec.model = model_from_json(m, path + "model.");
            }
        }
        spec.copy_of = a.value("copy_of", std::string());
        if (a.contains("tamper")) {
            const std::string t = detail::dump_scalar(a.at("tamper"));
            if (t == "test") spec.tamper_target = TamperTarget::Test;
            else if (t == "training") spec.tamper_target = TamperTarget::Training;
            else throw ConfigError(path + "tamper", "expected test or training");
        }
        if (a.contains("candidates")) spec.candidates = as_uint(a.at("candidates"), path + "candidates");
        if (a.contains("favor_testing")) {
            for (const Json& g : detail::as_array(a.at("favor_testing"), path + "favor_testing")) {
                spec.favor_testing.push_back(as_uint(g, path + "favor_testing"));
            }
        }
        cfg.actors.push_back(std::move(spec));
    }

    const Json& schedule = detail::as_array(require(j, "schedule", ""), "schedule");
    for (std::size_t i = 0; i < schedule.size(); ++i) {
        const Json& e = schedule[i];
        const std::string path = "schedule[" + std::to_string(i) + "].";
        ScheduleEntry entry;
        entry.height = as_uint(require(e, "height", path), path + "height");
        entry.actor = detail::dump_scalar(require(e, "actor", path));
        entry.action = detail::parse_action(require(e, "action", path), path + "action");
        if (e.contains("submission")) entry.submission = as_uint(e.at("submission"), path + "submission");
        entry.target = e.value("target", std::string());
        cfg.schedule.push_back(std::move(entry));
    }

    cfg.validate();
    return cfg;
}

inline ScenarioConfig load_scenario(const std::filesystem::path& path) {
    return scenario_from_json(read_json_file(path.string()), path.parent_path());
}

struct SubmissionSummary {
    std::uint64_t id = 0;
    Address submitter;
    Address payment_address;
    std::uint64_t submitted_at = 0;
    std::optional<FixedPoint> score;
};

struct GrindingSummary {
    std::string miner;
    std::uint64_t candidates = 0;
    std::vector<std::uint64_t> favor_testing;
    std::uint64_t blocks_ground = 0;
    bool favored_in_testing = false;
};

struct RunReport {
    std::string scenario;
    std::uint64_t seed = 0;
    std::uint64_t reward = 0;
    Scale scale;
    std::uint64_t final_height = 0;

    EventLog events;
    std::optional<Phase> terminal_phase;
    std::vector<Phase> phase_history;
    std::optional<Payout> payout;
    std::vector<SubmissionSummary> submissions;
    std::optional<BestModel> best;
    EvaluationSource evaluation_source = EvaluationSource::None;
    std::optional<PartitionResult> partition;

    std::map<std::string, std::uint64_t> gas_by_operation;
    std::uint64_t total_gas = 0;

    std::uint64_t conservation_checks = 0;
    std::uint64_t conservation_violations = 0;

    std::uint64_t group_count = 0;
    double union_bound_probability = 0.0;
    double complement_probability = 0.0;
    std::uint64_t commitment_payload_bytes = 0;
    StorageCost commitment_storage;

    std::optional<GrindingSummary> grinding;
};

namespace detail {

/// Chain view with one extra, not yet appended block.
struct PendingBlockView {
    const ChainState& chain;
    const Digest& pending;

    Digest blockhash(std::uint64_t n) const { return n == chain.height() ? pending : chain.blockhash(n); }
};

class ScenarioRunner {
public:
    explicit ScenarioRunner(const ScenarioConfig& cfg) : cfg_(cfg), chain_(cfg.seed), rng_(cfg.seed) {
        groups_ = make_groups(cfg_.dataset, cfg_.contract.group_size);
        std::set<Uint256> used;
        for (const DataGroup& g : groups_) {
            Nonce n = random_nonce(rng_);
            while (!used.insert(n.value).second) n = random_nonce(rng_);
            salted_.push_back(SaltedGroup{g, n});
            commitments_.push_back(hash_data_group(g, n));
        }
        for (const ActorSpec& a : cfg_.actors) {
            if (a.role == Role::Miner && a.behavior == Behavior::BlockGrinding) grinder_ = &a;
        }
    }

    RunReport run() {
        for (const ScheduleEntry& e : cfg_.schedule) {
            mine_until(e.height);
            execute(e);
        }
        mine_one();
        return report();
    }

private:
    void mine_until(std::uint64_t height) {
        while (chain_.height() < height) mine_one();
    }

    void mine_one() {
        if (grinder_ && contract_ && contract_->phase() == Phase::Init1Done && !grinder_->favor_testing.empty()) {
            const std::uint64_t k = contract_->config().partition_config(groups_.size()).training_count();
            const std::uint64_t at = chain_.height();
            if (at + 1 >= k) {
                ++blocks_ground_;
                chain_.mine_block_adversarial(grinder_->candidates, [&](const Digest& h) {
                    return favored_in_testing(randomly_select_index(
                        contract_->config().partition_config(groups_.size()), PendingBlockView{chain_, h}, at));
                });
                check_conservation();
                return;
            }
        }
        chain_.mine_block();
        check_conservation();
    }

    bool favored_in_testing(const PartitionResult& r) const {
        for (std::uint64_t g : grinder_->favor_testing) {
            if (std::find(r.testing_indexes.begin(), r.testing_indexes.end(), g) == r.testing_indexes.end()) {
                return false;
            }
        }
        return true;
    }

    void check_conservation() {
        if (!contract_) return;
        ++checks_;
        const std::uint64_t paid = contract_->total_paid();
        const std::size_t payouts = contract_->payouts().size();
        bool ok = contract_->escrow_balance() + paid == cfg_.contract.reward && payouts <= 1;
        if (is_terminal(contract_->phase())) {
            ok = ok && payouts == 1 && contract_->escrow_balance() == 0;
        } else {
            ok = ok && payouts == 0;
        }
        violations_ += !ok;
    }

    void note(const std::string& op, const std::string& caller, const std::string& outcome, const std::string& detail) {
        events_.push_back(Event{chain_.height(), op, caller, outcome, 0, detail});
    }

    std::vector<GroupReveal> reveals_for(const std::vector<std::uint64_t>& indexes, bool tamper) const {
        std::vector<GroupReveal> out;
        for (std::uint64_t i : indexes) out.push_back(GroupReveal{i, salted_[i]});
        if (tamper && !out.empty()) {
            out.front().data.group.points.front().inputs.front() += 1;
        }
        return out;
    }

    std::optional<std::uint64_t> latest_submission_of(const std::string& actor) const {
        const auto ids = contract_->get_submission_ids(actor);
        if (ids.empty()) return std::nullopt;
        return ids.back();
    }

    void execute(const ScheduleEntry& e) {
        const ActorSpec& actor = *cfg_.find_actor(e.actor);
        if (e.action == Action::Init1) {
            if (contract_) {
                note("init1", actor.name, "rejected", "contract already initialized");
                return;
            }
            try {
                contract_.emplace(DankuContract::init1(actor.name, cfg_.contract, commitments_, cfg_.contract.reward,
                                                       chain_, cfg_.gas, &events_));
            } catch (const ContractError&) {
            }
            return;
        }
        if (!contract_) {
            note(std::string(operation_name(e.action)), actor.name, "rejected", "no contract");
            return;
        }
        try {
            dispatch(actor, e);
        } catch (const ContractError&) {
            // Logged by the contract.
        }
    }

    void dispatch(const ActorSpec& actor, const ScheduleEntry& e) {
        DankuContract& c = *contract_;
        switch (e.action) {
            case Action::Init1:
                break;
            case Action::Init2:
                c.init2(actor.name, chain_);
                break;
            case Action::Init3: {
                const bool tamper =
                    actor.behavior == Behavior::TamperReveal && actor.tamper_target == TamperTarget::Training;
                c.init3(actor.name, chain_,
                        c.partition_result() ? reveals_for(c.partition_result()->training_indexes, tamper)
                                             : std::vector<GroupReveal>{});
                break;
            }
            case Action::Submit: {
                if (actor.behavior == Behavior::DuplicateResubmit) {
                    const auto victim = latest_submission_of(actor.copy_of);
                    if (!victim) {
                        note("submit_model", actor.name, "rejected", "nothing to copy from " + actor.copy_of);
                        return;
                    }
                    const Submission& s = c.submissions()[*victim];
                    c.submit_model(actor.name, chain_, s.model, s.params, actor.payment_address);
                } else {
                    c.submit_model(actor.name, chain_, actor.model->model, actor.model->params, actor.payment_address);
                }
                break;
            }
            case Action::RevealTest: {
                if (actor.behavior == Behavior::WithholdTestReveal) {
                    note("reveal_test_data", actor.name, "withheld", "organizer does not reveal the test set");
                    return;
                }
                const bool tamper = actor.behavior == Behavior::TamperReveal && actor.tamper_target == TamperTarget::Test;
                c.reveal_test_data(actor.name, chain_,
                                   c.partition_result() ? reveals_for(c.partition_result()->testing_indexes, tamper)
                                                        : std::vector<GroupReveal>{});
                break;
            }
            case Action::Evaluate: {
                std::optional<std::uint64_t> id = e.submission;
                if (!id) id = latest_submission_of(e.target.empty() ? actor.name : e.target);
                if (!id) {
                    note("evaluate_model", actor.name, "rejected", "no submission to evaluate");
                    return;
                }
                c.evaluate_model(actor.name, chain_, *id);
                break;
            }
            case Action::EvaluateAll:
                c.evaluate_all_models(actor.name, chain_);
                break;
            case Action::Finalize:
                c.finalize_contract(actor.name, chain_);
                break;
            case Action::Cancel:
                c.cancel_contract(actor.name, chain_);
                break;
        }
    }

    RunReport report() const {
        RunReport r;
        r.scenario = cfg_.name;
        r.seed = cfg_.seed;
        r.reward = cfg_.contract.reward;
        r.scale = cfg_.contract.scale;
        r.final_height = chain_.height();
        r.events = events_;
        for (const Event& ev : events_) {
            r.gas_by_operation[ev.operation] += ev.gas_used;
            r.total_gas += ev.gas_used;
        }
        r.conservation_checks = checks_;
        r.conservation_violations = violations_;

        const PartitionConfig pc = cfg_.contract.partition_config(groups_.size());
        r.group_count = groups_.size();
        r.union_bound_probability = exact_ideal_probability(pc).value;
        r.complement_probability = exact_complement_probability(pc).value;
        for (const SaltedGroup& g : salted_) r.commitment_payload_bytes += serialize_data_group(g.group, g.nonce).size();
        r.commitment_storage = storage_cost_report(cfg_.gas, r.commitment_payload_bytes);

        if (contract_) {
            const DankuContract& c = *contract_;
            r.terminal_phase = c.phase();
            r.phase_history = c.phase_history();
            if (!c.payouts().empty()) r.payout = c.payouts().front();
            for (const Submission& s : c.submissions()) {
                r.submissions.push_back(
                    SubmissionSummary{s.id, s.submitter, s.payment_address, s.submitted_at, c.scores()[s.id]});
            }
            r.best = c.best();
            r.evaluation_source = c.evaluation_source();
            r.partition = c.partition_result();
        }
        if (grinder_) {
            GrindingSummary g;
            g.miner = grinder_->name;
            g.candidates = grinder_->candidates;
            g.favor_testing = grinder_->favor_testing;
            g.blocks_ground = blocks_ground_;
            if (r.partition) {
                g.favored_in_testing = true;
                for (std::uint64_t idx : grinder_->favor_testing) {
                    const auto& t = r.partition->testing_indexes;
                    g.favored_in_testing = g.favored_in_testing && std::find(t.begin(), t.end(), idx) != t.end();
                }
            }
            r.grinding = g;
        }
        return r;
    }

    const ScenarioConfig& cfg_;
    ChainState chain_;
    std::mt19937_64 rng_;
    std::vector<DataGroup> groups_;
    std::vector<SaltedGroup> salted_;
    std::vector<Digest> commitments_;
    std::optional<DankuContract> contract_;
    EventLog events_;
    const ActorSpec* grinder_ = nullptr;
    std::uint64_t blocks_ground_ = 0;
    std::uint64_t checks_ = 0;
    std::uint64_t violations_ = 0;
};

}  // namespace detail

/// Runs the schedule on a fresh chain seeded with `config.seed`. The report
/// is a pure function of the config.
inline RunReport run_scenario(const ScenarioConfig& config) {
    config.validate();
    return detail::ScenarioRunner(config).run();
}

namespace detail {

inline std::string score_text(FixedPoint score, Scale scale) {
    return format_fixed(score.to_double(scale), 6) + " (" + std::to_string(score.mantissa) + "/2^" +
           std::to_string(scale.bits) + ")";
}

inline Json event_json(const Event& e) {
    return Json{{"record", "event"},   {"height", e.height},     {"operation", e.operation}, {"caller", e.caller},
                {"outcome", e.outcome}, {"gas_used", e.gas_used}, {"detail", e.detail}};
}

}  // namespace detail

inline std::string render_text(const RunReport& r) {
    std::ostringstream out;
    out << "scenario " << r.scenario << " (seed " << r.seed << ", reward " << r.reward << ")\n";
    out << "\nevents:\n";
    for (const Event& e : r.events) {
        out << "  [" << pad_left(std::to_string(e.height), 4) << "] " << e.operation << " by " << e.caller << ": "
            << e.outcome << ", gas " << e.gas_used;
        if (!e.detail.empty()) out << " - " << e.detail;
        out << "\n";
    }
    out << "\nterminal phase: " << (r.terminal_phase ? std::string(to_string(*r.terminal_phase)) : "no contract")
        << " at height " << r.final_height << "\n";
    if (!r.phase_history.empty()) {
        out << "phase history:";
        for (Phase p : r.phase_history) out << " " << to_string(p);
        out << "\n";
    }
    if (r.partition) {
        out << "training groups:";
        for (auto i : r.partition->training_indexes) out << " " << i;
        out << "\ntesting groups:";
        for (auto i : r.partition->testing_indexes) out << " " << i;
        out << "\n";
    }
    out << "evaluation dataset: " << to_string(r.evaluation_source) << "\n";
    out << "\nsubmissions:\n";
    if (r.submissions.empty()) out << "  (none)\n";
    for (const SubmissionSummary& s : r.submissions) {
        out << "  #" << s.id << " " << s.submitter << " -> " << s.payment_address << " at " << s.submitted_at
            << ": " << (s.score ? detail::score_text(*s.score, r.scale) : std::string("not evaluated"));
        if (r.best && r.best->submission_id == s.id) out << "  [best]";
        out << "\n";
    }
    out << "\npayout: ";
    if (r.payout) {
        out << r.payout->amount << " to " << r.payout->to << (r.payout->refund ? " (refund)" : " (reward)")
            << " at height " << r.payout->height << "\n";
    } else {
        out << "none\n";
    }
    out << "fund conservation: " << r.conservation_checks << " block checks, " << r.conservation_violations
        << " violations\n";
    out << "\ngas by operation:\n";
    for (const auto& [op, g] : r.gas_by_operation) out << "  " << op << ": " << g << "\n";
    out << "  total: " << r.total_gas << "\n";
    out << "\nanalytics:\n";
    out << "  groups: " << r.group_count << "\n";
    out << "  ideal-partition probability, formula: " << format_general(r.union_bound_probability * 100, 8)
        << "%, complement rule: " << format_general(r.complement_probability * 100, 8) << "%\n";
    out << "  commitment payload: " << r.commitment_payload_bytes << " bytes, storage gas "
        << r.commitment_storage.gas << ", " << format_fixed(r.commitment_storage.ether, 6) << " ETH, $"
        << format_fixed(r.commitment_storage.usd, 2) << "\n";
    if (r.grinding) {
        out << "  block grinding by " << r.grinding->miner << ": " << r.grinding->candidates << " candidates over "
            << r.grinding->blocks_ground << " blocks; favored groups in testing: "
            << (r.grinding->favored_in_testing ? "yes" : "no") << "\n";
    }
    return out.str();
}

inline std::string render_records(const RunReport& r) {
    std::ostringstream out;
    out << Json{{"record", "scenario"}, {"name", r.scenario}, {"seed", r.seed}, {"reward", r.reward},
                {"scale_bits", r.scale.bits}}
               .dump()
        << "\n";
    for (const Event& e : r.events) out << detail::event_json(e).dump() << "\n";
    for (const SubmissionSummary& s : r.submissions) {
        Json j{{"record", "submission"},
               {"id", s.id},
               {"submitter", s.submitter},
               {"payment_address", s.payment_address},
               {"submitted_at", s.submitted_at},
               {"score_mantissa", s.score ? Json(s.score->mantissa) : Json(nullptr)},
               {"best", r.best && r.best->submission_id == s.id}};
        out << j.dump() << "\n";
    }
    Json outcome{{"record", "outcome"},
                 {"terminal_phase", r.terminal_phase ? Json(std::string(to_string(*r.terminal_phase))) : Json(nullptr)},
                 {"final_height", r.final_height},
                 {"evaluation_source", std::string(to_string(r.evaluation_source))},
                 {"conservation_checks", r.conservation_checks},
                 {"conservation_violations", r.conservation_violations},
                 {"total_gas", r.total_gas},
                 {"gas_by_operation", r.gas_by_operation}};
    Json phases = Json::array();
    for (Phase p : r.phase_history) phases.push_back(std::string(to_string(p)));
    outcome["phase_history"] = phases;
    if (r.payout) {
        outcome["payout"] = Json{{"to", r.payout->to},
                                 {"amount", r.payout->amount},
                                 {"height", r.payout->height},
                                 {"refund", r.payout->refund}};
    } else {
        outcome["payout"] = nullptr;
    }
    if (r.partition) {
        outcome["training_indexes"] = r.partition->training_indexes;
        outcome["testing_indexes"] = r.partition->testing_indexes;
    }
    out << outcome.dump() << "\n";
    Json analytics{{"record", "analytics"},
                   {"group_count", r.group_count},
                   {"union_bound_probability", r.union_bound_probability},
                   {"complement_probability", r.complement_probability},
                   {"commitment_payload_bytes", r.commitment_payload_bytes},
                   {"commitment_storage_gas", r.commitment_storage.gas},
                   {"commitment_storage_ether", r.commitment_storage.ether}};
    if (r.grinding) {
        analytics["grinding"] = Json{{"miner", r.grinding->miner},
                                     {"candidates", r.grinding->candidates},
                                     {"favor_testing", r.grinding->favor_testing},
                                     {"blocks_ground", r.grinding->blocks_ground},
                                     {"favored_in_testing", r.grinding->favored_in_testing}};
    }
    out << analytics.dump() << "\n";
    return out.str();
}

inline std::string render(const RunReport& r, OutputFormat format) {
    return format == OutputFormat::Text ? render_text(r) : render_records(r);
}

}  // namespace danku

#endif  // DANKU_SCENARIO_HPP
