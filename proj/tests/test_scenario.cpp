#include <danku/scenario.hpp>

#include "support/float_oracle.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

using namespace danku;

namespace {

const std::filesystem::path kScenarios = DANKU_SCENARIO_DIR;

Json load(const std::string& name) { return read_json_file((kScenarios / (name + ".json")).string()); }

RunReport run(const std::string& name) { return run_scenario(load_scenario(kScenarios / (name + ".json"))); }

const Event* find_event(const RunReport& r, const std::string& op, const std::string& outcome) {
    for (const Event& e : r.events) {
        if (e.operation == op && e.outcome == outcome) return &e;
    }
    return nullptr;
}

void expect_conserved(const RunReport& r) {
    EXPECT_GT(r.conservation_checks, 0u);
    EXPECT_EQ(r.conservation_violations, 0u);
}

std::string field_error(const Json& j) {
    try {
        scenario_from_json(j, kScenarios);
    } catch (const ConfigError& e) {
        return e.field();
    }
    return "<accepted>";
}

// Accuracy mantissas below are frozen from tests/oracles/danku_oracle.py.
constexpr std::int64_t kOne = 1 << 20;

}  // namespace

TEST(BundledScenario, HonestPaysHigherAccuracy) {
    const RunReport r = run("honest");
    ASSERT_TRUE(r.terminal_phase);
    EXPECT_EQ(*r.terminal_phase, Phase::Finalized);
    ASSERT_TRUE(r.payout);
    EXPECT_EQ(r.payout->to, "bob");
    EXPECT_FALSE(r.payout->refund);
    EXPECT_EQ(r.payout->amount, r.reward);
    EXPECT_EQ(r.evaluation_source, EvaluationSource::Testing);
    EXPECT_EQ(r.partition->testing_indexes, (std::vector<std::uint64_t>{10, 14, 17, 6}));
    ASSERT_EQ(r.submissions.size(), 2u);
    EXPECT_EQ(r.submissions[0].score->mantissa, kOne);
    EXPECT_EQ(r.submissions[1].score->mantissa, 891'289);
    expect_conserved(r);
}

TEST(BundledScenario, HonestWinnerMatchesDoubleOracle) {
    const ScenarioConfig cfg = load_scenario(kScenarios / "honest.json");
    const RunReport r = run_scenario(cfg);
    const auto groups = make_groups(cfg.dataset, cfg.contract.group_size);
    double best = -1;
    std::string winner;
    for (const ActorSpec& a : cfg.actors) {
        if (a.role != Role::Submitter) continue;
        int correct = 0;
        int total = 0;
        for (std::uint64_t g : r.partition->testing_indexes) {
            for (const DataPoint& p : groups[g].points) {
                const auto out = reference::forward_double(a.model->model, a.model->params,
                                                           {double(p.inputs[0]), double(p.inputs[1])}, cfg.contract.scale);
                correct += (out[1] > out[0] ? 1 : 0) == p.label;
                ++total;
            }
        }
        const double acc = double(correct) / total;
        if (acc > best) {
            best = acc;
            winner = a.payment_address;
        }
    }
    EXPECT_EQ(r.payout->to, winner);
}

TEST(BundledScenario, WithheldTestRevealFallsBackToTraining) {
    const RunReport r = run("withhold_test_reveal");
    EXPECT_EQ(*r.terminal_phase, Phase::Finalized);
    EXPECT_EQ(r.evaluation_source, EvaluationSource::TrainingFallback);
    EXPECT_EQ(r.payout->to, "bob");
    EXPECT_FALSE(r.payout->refund);
    EXPECT_NE(find_event(r, "reveal_test_data", "withheld"), nullptr);
    EXPECT_EQ(r.submissions[1].score->mantissa, 812'646);
    expect_conserved(r);
}

TEST(BundledScenario, TamperedRevealIsRejected) {
    const RunReport r = run("tamper_reveal");
    const Event* e = find_event(r, "reveal_test_data", "rejected");
    ASSERT_NE(e, nullptr);
    EXPECT_NE(e->detail.find("digest_mismatch"), std::string::npos);
    EXPECT_EQ(find_event(r, "reveal_test_data", "accepted"), nullptr);
    EXPECT_EQ(*r.terminal_phase, Phase::Finalized);
    EXPECT_EQ(r.evaluation_source, EvaluationSource::TrainingFallback);
    EXPECT_EQ(r.payout->to, "bob");
    EXPECT_EQ(r.partition->testing_indexes, (std::vector<std::uint64_t>{15, 2, 18, 6}));
    EXPECT_EQ(r.submissions[1].score->mantissa, 825'753);
    expect_conserved(r);
}

TEST(BundledScenario, DuplicateResubmitPaysOriginal) {
    const RunReport r = run("duplicate_resubmit");
    EXPECT_EQ(*r.terminal_phase, Phase::Finalized);
    ASSERT_EQ(r.submissions.size(), 2u);
    EXPECT_EQ(r.submissions[1].submitter, "mallory");
    EXPECT_EQ(r.submissions[0].score, r.submissions[1].score);
    EXPECT_EQ(r.best->submission_id, 0u);
    EXPECT_EQ(r.payout->to, "bob");
    expect_conserved(r);
}

TEST(BundledScenario, BlockGrindingSteersFavoredGroupsIntoTesting) {
    const RunReport r = run("block_grinding");
    ASSERT_TRUE(r.grinding);
    EXPECT_GT(r.grinding->blocks_ground, 0u);
    EXPECT_TRUE(r.grinding->favored_in_testing);
    for (std::uint64_t g : r.grinding->favor_testing) {
        EXPECT_NE(std::find(r.partition->testing_indexes.begin(), r.partition->testing_indexes.end(), g),
                  r.partition->testing_indexes.end());
    }
    expect_conserved(r);
}

TEST(BundledScenario, HonestMinerDoesNotGrind) {
    Json honest_miner = load("block_grinding");
    honest_miner["actors"][2]["behavior"] = "honest";
    Json no_miner = load("block_grinding");
    no_miner["actors"].erase(2);
    const RunReport a = run_scenario(scenario_from_json(honest_miner, kScenarios));
    const RunReport b = run_scenario(scenario_from_json(no_miner, kScenarios));
    EXPECT_FALSE(a.grinding);
    EXPECT_EQ(a.partition, b.partition);
    EXPECT_NE(a.partition, run("block_grinding").partition);
}

TEST(BundledScenario, EvaluateAllExceedsGasLimit) {
    const RunReport r = run("too_many_submissions");
    const Event* e = find_event(r, "evaluate_all_models", "rejected");
    ASSERT_NE(e, nullptr);
    EXPECT_EQ(e->gas_used, 30'000u);
    for (const SubmissionSummary& s : r.submissions) EXPECT_TRUE(s.score);
    EXPECT_EQ(*r.terminal_phase, Phase::Finalized);
    expect_conserved(r);
}

TEST(Replay, ByteIdenticalReports) {
    for (const char* name : {"honest", "withhold_test_reveal", "tamper_reveal", "duplicate_resubmit",
                             "block_grinding", "too_many_submissions"}) {
        const RunReport a = run(name);
        const RunReport b = run(name);
        EXPECT_EQ(render_text(a), render_text(b)) << name;
        EXPECT_EQ(render_records(a), render_records(b)) << name;
    }
}

TEST(Replay, SeedChangesTheRun) {
    ScenarioConfig cfg = load_scenario(kScenarios / "honest.json");
    const RunReport a = run_scenario(cfg);
    cfg.seed += 1;
    const RunReport b = run_scenario(cfg);
    EXPECT_NE(a.partition, b.partition);
    EXPECT_NE(render_records(a), render_records(b));
}

TEST(Report, RecordsAreJsonLines) {
    const std::string records = render_records(run("honest"));
    std::istringstream in(records);
    std::string line;
    int lines = 0;
    while (std::getline(in, line)) {
        const Json j = Json::parse(line);
        EXPECT_TRUE(j.contains("record"));
        ++lines;
    }
    EXPECT_GT(lines, 5);
}

TEST(Runner, ActionsBeforeInit1AreRejected) {
    Json j = load("honest");
    j["schedule"].insert(j["schedule"].begin(), Json{{"height", 3}, {"actor", "alice"}, {"action", "init2"}});
    j["schedule"].push_back(Json{{"height", 60}, {"actor", "alice"}, {"action", "init1"}});
    const RunReport r = run_scenario(scenario_from_json(j, kScenarios));
    ASSERT_GE(r.events.size(), 2u);
    EXPECT_EQ(r.events.front().operation, "init2");
    EXPECT_EQ(r.events.front().detail, "no contract");
    EXPECT_EQ(r.events.back().operation, "init1");
    EXPECT_EQ(r.events.back().outcome, "rejected");
    EXPECT_EQ(r.payout->to, "bob");
}

TEST(Runner, LateInit2CancelsTheRun) {
    Json j = load("honest");
    j["schedule"][1]["height"] = 26;
    for (std::size_t i = 2; i < j["schedule"].size(); ++i) j["schedule"][i]["height"] = 30;
    const RunReport r = run_scenario(scenario_from_json(j, kScenarios));
    EXPECT_EQ(*r.terminal_phase, Phase::Cancelled);
    EXPECT_TRUE(r.payout->refund);
    EXPECT_EQ(r.payout->to, "alice");
    expect_conserved(r);
}

TEST(ConfigValidation, NamesTheOffendingField) {
    const Json base = load("honest");
    auto with = [&](auto mutate) {
        Json j = base;
        mutate(j);
        return field_error(j);
    };
    EXPECT_EQ(field_error(base), "<accepted>");
    EXPECT_EQ(with([](Json& j) { j.erase("schema"); }), "schema");
    EXPECT_EQ(with([](Json& j) { j["schema"] = "danku-scenario/0"; }), "schema");
    EXPECT_EQ(with([](Json& j) { j.erase("seed"); }), "seed");
    EXPECT_EQ(with([](Json& j) { j["seed"] = -1; }), "seed");
    EXPECT_EQ(with([](Json& j) { j["contract"]["reward"] = 0; }), "contract.reward");
    EXPECT_EQ(with([](Json& j) { j["contract"].erase("submission_period"); }), "contract.submission_period");
    EXPECT_EQ(with([](Json& j) { j["contract"]["training_fraction"] = 1; }), "contract.training_fraction");
    EXPECT_EQ(with([](Json& j) { j["contract"]["training_fraction"] = "1/3"; }), "contract.training_fraction");
    EXPECT_EQ(with([](Json& j) { j["contract"]["min_accuracy"] = 1.5; }), "contract.min_accuracy");
    EXPECT_EQ(with([](Json& j) { j["contract"]["scale_bits"] = 50; }), "scale_bits");
    EXPECT_EQ(with([](Json& j) { j["contract"]["model_shape"] = Json::array({2}); }), "contract.model_shape");
    EXPECT_EQ(with([](Json& j) { j["contract"]["group_size"] = 3; }), "dataset");
    EXPECT_EQ(with([](Json& j) { j["dataset"] = Json::object(); }), "dataset");
    EXPECT_EQ(with([](Json& j) {
                  j["dataset"] = Json{{"points", Json::array({Json::array({1, 2, 5})})}};
                  j["contract"]["group_size"] = 1;
                  j["contract"]["training_fraction"] = "1/2";
              }),
              "contract.training_fraction");
    EXPECT_EQ(with([](Json& j) {
                  Json pts = Json::array();
                  for (int i = 0; i < 10; ++i) pts.push_back(Json::array({1, 2, i == 3 ? 2 : 0}));
                  j["dataset"] = Json{{"points", pts}};
                  j["contract"]["group_size"] = 2;
              }),
              "dataset[3]");
    EXPECT_EQ(with([](Json& j) { j["actors"][1]["role"] = "organizer"; }), "actors");
    EXPECT_EQ(with([](Json& j) { j["actors"][1]["role"] = "auditor"; }), "actors[1].role");
    EXPECT_EQ(with([](Json& j) { j["actors"][1]["behavior"] = "bribe"; }), "actors[1].behavior");
    EXPECT_EQ(with([](Json& j) { j["actors"][1]["behavior"] = "block_grinding"; }), "actors[1].behavior");
    EXPECT_EQ(with([](Json& j) { j["actors"][2]["name"] = "bob"; }), "actors[2].name");
    EXPECT_EQ(with([](Json& j) { j["actors"][1].erase("model"); }), "actors[1].model");
    EXPECT_EQ(with([](Json& j) {
                  j["actors"][1]["behavior"] = "duplicate_resubmit";
                  j["actors"][1]["copy_of"] = "alice";
              }),
              "actors[1].copy_of");
    EXPECT_EQ(with([](Json& j) { j["contract"]["model_shape"] = Json::array({2, 3, 2}); }),
              "actors[1].model.layer_sizes");
    EXPECT_EQ(with([](Json& j) {
                  j["actors"].push_back(Json{{"name", "mike"}, {"role", "miner"}, {"favor_testing", {25}}});
              }),
              "actors[3].favor_testing");
    EXPECT_EQ(with([](Json& j) {
                  j["actors"].push_back(Json{{"name", "mike"}, {"role", "miner"}, {"candidates", 0}});
              }),
              "actors[3].candidates");
    EXPECT_EQ(with([](Json& j) { j["schedule"][1]["height"] = 5; }), "schedule[1].height");
    EXPECT_EQ(with([](Json& j) { j["schedule"][0]["actor"] = "zed"; }), "schedule[0].actor");
    EXPECT_EQ(with([](Json& j) { j["schedule"][0]["action"] = "pause"; }), "schedule[0].action");
    EXPECT_EQ(with([](Json& j) { j["schedule"][0]["actor"] = "bob"; }), "schedule[0].action");
    EXPECT_EQ(with([](Json& j) { j["schedule"][3]["actor"] = "alice"; }), "schedule[3].action");
    EXPECT_EQ(with([](Json& j) { j["schedule"][6]["target"] = "alice"; }), "schedule[6].target");
}

TEST(ConfigValidation, ModelAndDataFiles) {
    Json j = load("honest");
    j["dataset"]["file"] = "data/missing.json";
    EXPECT_THROW(scenario_from_json(j, kScenarios), Error);
    j = load("honest");
    j["actors"][1]["model"] = Json{{"generator", Json{{"seed", 4}}}};
    const ScenarioConfig cfg = scenario_from_json(j, kScenarios);
    EXPECT_EQ(cfg.actors[1].model->model, cfg.contract.model_shape);
    EXPECT_EQ(cfg.actors[1].model->params, generated_params(cfg.contract.model_shape, cfg.contract.scale, 4));
}

TEST(Synthetic, SeparableBalancedAndDeterministic) {
    const auto a = synthetic_two_class(100, 7);
    EXPECT_EQ(a, synthetic_two_class(100, 7));
    EXPECT_NE(a, synthetic_two_class(100, 8));
    ASSERT_EQ(a.size(), 100u);
    int ones = 0;
    for (const DataPoint& p : a) {
        ASSERT_EQ(p.inputs.size(), 2u);
        EXPECT_GE(std::llabs(p.inputs[0] + p.inputs[1]), 5);
        EXPECT_EQ(p.label, p.inputs[0] + p.inputs[1] > 0 ? 1 : 0);
        ones += p.label;
    }
    EXPECT_GT(ones, 20);
    EXPECT_LT(ones, 80);
}

TEST(Synthetic, BundledDataFileMatchesGenerator) {
    const Json j = read_json_file((kScenarios / "data" / "synthetic_100.json").string());
    EXPECT_EQ(points_from_json(j.at("points"), "points"), synthetic_two_class(100, 7));
}
