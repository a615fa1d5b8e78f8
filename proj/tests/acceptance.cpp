// Acceptance checks: one PASS/FAIL line per criterion, nonzero exit on any
// failure.

#include <danku/danku.hpp>

#include "support/float_oracle.hpp"
#include "support/reference.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace danku;

namespace {

const std::filesystem::path kScenarios = DANKU_SCENARIO_DIR;

struct Outcome {
    bool pass = false;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

// Rounds to `digits` significant figures.
double round_sig(double v, int digits) {
    if (v == 0) return 0;
    const double scale = std::pow(10.0, digits - 1 - static_cast<int>(std::floor(std::log10(std::fabs(v)))));
    return std::round(v * scale) / scale;
}

Outcome probability_table_rows() {
    const auto start = Clock::now();
    // Exact L / C(G, k) in percent, frozen from tests/oracles/danku_oracle.py.
    struct Row {
        std::uint64_t g;
        double exact;
        double printed;
        int printed_digits;
    };
    const std::vector<Row> rows{{5, 100.0, 100.0, 3},
                                {10, 11.111111111111111, 11.11, 4},
                                {15, 1.0989010989010988, 1.0989, 5},
                                {20, 0.10319917440660475, 0.103199, 6},
                                {25, 0.009410878976096011, 0.00941088, 6},
                                {30, 0.0008420698131068296, 0.00084207, 5}};
    std::vector<std::uint64_t> groups;
    for (const Row& r : rows) groups.push_back(r.g);
    const ProbabilityTable table = probability_table(groups, Fraction{4, 5}, 5, 0, 0);
    const std::string text = render_text(table);
    bool ok = table.rows.size() == rows.size();
    double worst = 0;
    for (std::size_t i = 0; ok && i < rows.size(); ++i) {
        const double got = table.rows[i].union_bound * 100;
        const double rel = std::fabs(got - rows[i].exact) / rows[i].exact;
        worst = std::max(worst, rel);
        ok = ok && rel < 5e-7;
        ok = ok && round_sig(got, rows[i].printed_digits) == round_sig(rows[i].printed, rows[i].printed_digits);
        ok = ok && text.find(format_general(got, 8)) != std::string::npos;
    }
    const double elapsed = seconds_since(start);
    ok = ok && elapsed < 1.0;
    return {ok, "6 rows, worst relative error " + fmt("%.2e", worst) + ", " + fmt("%.3f", elapsed) + " s"};
}

Outcome monte_carlo_consistency() {
    const auto start = Clock::now();
    const PartitionConfig cfg{10, Fraction{4, 5}, 5};
    std::set<std::uint64_t> target;
    for (std::uint64_t i = 0; i < 8; ++i) target.insert(i);
    const MonteCarloEstimate mc = monte_carlo_ideal_probability(cfg, target, 200'000, 20'240'501);
    const double expected = 1.0 - std::pow(1.0 - 1.0 / 45.0, 5);
    const double sigma = std::sqrt(expected * (1 - expected) / 200'000.0);
    const double union_bound = exact_ideal_probability(cfg).value;
    const double elapsed = seconds_since(start);
    const bool ok = std::fabs(mc.estimate - expected) <= 3 * sigma && std::fabs(expected - 0.10625) < 5e-5 &&
                    std::fabs(union_bound - 0.1111) < 5e-5 && elapsed < 60.0;
    return {ok, "MC " + fmt("%.5f", mc.estimate) + " vs " + fmt("%.5f", expected) + " (3 sigma " +
                    fmt("%.5f", 3 * sigma) + "), union bound " + fmt("%.4f", union_bound) + ", " +
                    fmt("%.2f", elapsed) + " s"};
}

Outcome gas_arithmetic() {
    const auto start = Clock::now();
    const GasSchedule s;
    const GasReport report = gas_report(s, {1024, 11'594'722});
    const StorageCost& mnist = report.rows[1].cost;
    const bool kib = report.rows[0].cost.gas == 6'068'352;
    const bool eth = mnist.gas == 68'711'771'912u && std::fabs(mnist.ether - 274.85) <= 0.5 &&
                     std::fabs(mnist.ether - 275.0) <= 0.5 && mnist.wei == Uint256("274847087648000000000");
    const bool usd = ether_to_usd(275.0, s) == 302'500.0;
    const double elapsed = seconds_since(start);
    return {kib && eth && usd && elapsed < 1.0,
            "1 KiB " + std::to_string(report.rows[0].cost.gas) + " gas, MNIST " + fmt("%.6f", mnist.ether) +
                " ETH, 275 ETH = $" + fmt("%.0f", ether_to_usd(275.0, s)) + ", " + fmt("%.3f", elapsed) + " s"};
}

Outcome commitment_soundness() {
    std::mt19937_64 rng(4);
    int tampered_rejected = 0;
    int honest_accepted = 0;
    constexpr int kTrials = 2000;
    for (int t = 0; t < kTrials; ++t) {
        DataGroup g;
        const std::size_t points = 1 + rng() % 6;
        const std::size_t dim = 1 + rng() % 4;
        for (std::size_t p = 0; p < points; ++p) {
            DataPoint dp;
            for (std::size_t d = 0; d < dim; ++d) dp.inputs.push_back(static_cast<std::int64_t>(rng()) >> (rng() % 63));
            dp.label = static_cast<std::int64_t>(rng() % 10);
            g.points.push_back(dp);
        }
        const Nonce nonce = random_nonce(rng);
        const Digest commitment = hash_data_group(g, nonce);
        honest_accepted += verify_reveal(commitment, g, nonce);

        DataGroup bad = g;
        Nonce bad_nonce = nonce;
        const std::size_t scalars = points * (dim + 1) + 1;
        const std::size_t which = rng() % scalars;
        if (which + 1 == scalars) {
            bad_nonce.value ^= Uint256(1) << static_cast<unsigned>(rng() % 256);
        } else {
            DataPoint& dp = bad.points[which / (dim + 1)];
            std::int64_t& v = which % (dim + 1) < dim ? dp.inputs[which % (dim + 1)] : dp.label;
            v = static_cast<std::int64_t>(static_cast<std::uint64_t>(v) ^ (std::uint64_t{1} << (rng() % 64)));
        }
        tampered_rejected += !verify_reveal(commitment, bad, bad_nonce);
    }
    return {tampered_rejected == kTrials && honest_accepted == kTrials,
            std::to_string(tampered_rejected) + "/" + std::to_string(kTrials) + " tampered rejected, " +
                std::to_string(honest_accepted) + "/" + std::to_string(kTrials) + " honest accepted"};
}

Outcome fixed_point_fidelity() {
    const Scale scale{20};
    // The depth-scaled bound assumes weights of unit scale, which tiny networks
    // with few weights often lack; test_fixed_point.cpp covers those with the
    // propagated bound.
    const std::vector<ModelDefinition> shapes{ModelDefinition{{2, 16, 2}}, ModelDefinition{{4, 8, 8, 3}},
                                              ModelDefinition{{8, 16, 4}}, ModelDefinition{{8, 16, 16, 4}}};
    std::mt19937_64 rng(5);
    constexpr int kNetworks = 2000;
    int within = 0;
    int label_checks = 0;
    int label_matches = 0;
    double worst_ratio = 0;
    for (int n = 0; n < kNetworks; ++n) {
        const ModelDefinition& m = shapes[static_cast<std::size_t>(n) % shapes.size()];
        const WeightsBiases p = reference::random_params(m, scale, rng);
        std::vector<FixedPoint> x;
        std::vector<double> xd;
        for (std::size_t i = 0; i < m.input_dim(); ++i) {
            x.push_back(FixedPoint{static_cast<std::int64_t>(rng() % (std::uint64_t{8} << scale.bits)) -
                                   (std::int64_t{4} << scale.bits)});
            xd.push_back(x.back().to_double(scale));
        }
        const auto got = forward_pass(m, p, x, scale);
        const auto want = reference::forward_double(m, p, xd, scale);
        const double bound = reference::depth_scaled_bound(m, p, scale);
        bool ok = true;
        for (std::size_t o = 0; o < got.size(); ++o) {
            const double err = std::fabs(got[o].to_double(scale) - want[o]);
            worst_ratio = std::max(worst_ratio, err / bound);
            ok = ok && err <= bound;
        }
        within += ok;

        std::vector<double> sorted = want;
        std::sort(sorted.rbegin(), sorted.rend());
        if (sorted.size() > 1 && sorted[0] - sorted[1] > bound) {
            ++label_checks;
            const auto oracle_label = static_cast<std::size_t>(std::max_element(want.begin(), want.end()) - want.begin());
            label_matches += argmax(got) == oracle_label;
        }
    }
    return {within == kNetworks && label_matches == label_checks,
            std::to_string(within) + "/" + std::to_string(kNetworks) + " networks within bound (worst error/bound " +
                fmt("%.3f", worst_ratio) + "), labels " + std::to_string(label_matches) + "/" +
                std::to_string(label_checks) + " where margin > bound"};
}

Outcome partition_equivalence() {
    int matches = 0;
    int total = 0;
    for (std::uint64_t g : {5, 10, 20}) {
        const PartitionConfig cfg{g, Fraction{4, 5}, 5};
        const std::uint64_t k = cfg.training_count();
        for (std::uint64_t seed = 0; seed < 100; ++seed) {
            ChainState chain(seed * 7919 + g);
            const std::uint64_t at = k - 1 + seed % 13;
            while (chain.height() <= at) chain.mine_block();
            const PartitionResult got = randomly_select_index(cfg, chain, at);
            const auto want = reference::select_indexes(reference::mine_hashes(seed * 7919 + g, at + 1), g, k, at);
            matches += got.training_indexes == want.training && got.testing_indexes == want.testing;
            ++total;
        }
    }
    return {matches == total, std::to_string(matches) + "/" + std::to_string(total) + " chains identical"};
}

const Event* find_event(const RunReport& r, const std::string& op, const std::string& outcome) {
    for (const Event& e : r.events) {
        if (e.operation == op && e.outcome == outcome) return &e;
    }
    return nullptr;
}

RunReport run_bundled(const std::string& name) {
    return run_scenario(load_scenario(kScenarios / (name + ".json")));
}

Outcome protocol_end_to_end() {
    std::ostringstream detail;
    bool ok = true;
    auto finalized_to = [](const RunReport& r, const std::string& who) {
        return r.terminal_phase == Phase::Finalized && r.payout && r.payout->to == who && !r.payout->refund &&
               r.payout->amount == r.reward;
    };
    auto conserved = [](const RunReport& r) { return r.conservation_checks > 0 && r.conservation_violations == 0; };

    const RunReport honest = run_bundled("honest");
    const bool h = finalized_to(honest, "bob") && honest.best &&
                   honest.submissions.at(honest.best->submission_id).payment_address == "bob" &&
                   honest.submissions.at(1).score && honest.submissions.at(1).score->mantissa < (1 << 20) &&
                   honest.evaluation_source == EvaluationSource::Testing && conserved(honest);

    const RunReport withhold = run_bundled("withhold_test_reveal");
    const bool w = finalized_to(withhold, "bob") && withhold.evaluation_source == EvaluationSource::TrainingFallback &&
                   find_event(withhold, "reveal_test_data", "accepted") == nullptr && conserved(withhold);

    const RunReport tamper = run_bundled("tamper_reveal");
    const Event* rejected = find_event(tamper, "reveal_test_data", "rejected");
    const bool t = rejected && rejected->detail.find("digest_mismatch") != std::string::npos &&
                   find_event(tamper, "reveal_test_data", "accepted") == nullptr && conserved(tamper) &&
                   tamper.terminal_phase == Phase::Finalized;

    const RunReport dup = run_bundled("duplicate_resubmit");
    const bool d = finalized_to(dup, "bob") && dup.submissions.size() == 2 && dup.submissions[1].submitter == "mallory" &&
                   dup.submissions[0].score == dup.submissions[1].score && conserved(dup);

    ok = h && w && t && d;
    const std::uint64_t checks = honest.conservation_checks + withhold.conservation_checks +
                                 tamper.conservation_checks + dup.conservation_checks;
    detail << "honest " << (h ? "ok" : "WRONG") << ", withhold_test_reveal " << (w ? "ok" : "WRONG")
           << ", tamper_reveal " << (t ? "ok" : "WRONG") << ", duplicate_resubmit " << (d ? "ok" : "WRONG") << "; "
           << checks << " per-block conservation checks";
    return {ok, detail.str()};
}

Outcome deadline_enforcement() {
    ContractConfig cfg;
    cfg.reward = 1000;
    cfg.submission_period = 10;
    cfg.test_reveal_period = 5;
    cfg.evaluation_period = 10;
    cfg.model_shape = ModelDefinition{{2, 2, 2}};
    std::vector<Digest> commitments;
    std::mt19937_64 rng(8);
    for (const DataGroup& g : make_groups(synthetic_two_class(100, 7), 5)) {
        commitments.push_back(hash_data_group(g, random_nonce(rng)));
    }
    auto attempt = [&](std::uint64_t delay) {
        ChainState chain(8);
        while (chain.height() < 20) chain.mine_block();
        DankuContract c = DankuContract::init1("alice", cfg, commitments, cfg.reward, chain);
        while (chain.height() < c.deadlines().init2 + delay) chain.mine_block();
        const auto outcome = c.init2("alice", chain);
        return std::tuple{outcome, c.phase(), c.payouts()};
    };
    const auto [on_time, on_time_phase, on_time_payouts] = attempt(0);
    const auto [late, late_phase, late_payouts] = attempt(1);
    const bool ok = on_time == DankuContract::Init2Outcome::Partitioned && on_time_phase == Phase::Init2Done &&
                    on_time_payouts.empty() && late == DankuContract::Init2Outcome::Cancelled &&
                    late_phase == Phase::Cancelled && late_payouts.size() == 1 && late_payouts[0].to == "alice" &&
                    late_payouts[0].refund && late_payouts[0].amount == cfg.reward;
    return {ok, "init2 at deadline partitions; at deadline+1 cancels and refunds the organizer"};
}

Outcome replay_determinism() {
    int identical = 0;
    int total = 0;
    for (const char* name : {"honest", "withhold_test_reveal", "tamper_reveal", "duplicate_resubmit",
                             "block_grinding", "too_many_submissions"}) {
        const ScenarioConfig cfg = load_scenario(kScenarios / (std::string(name) + ".json"));
        for (OutputFormat f : {OutputFormat::Text, OutputFormat::Records}) {
            identical += render(run_scenario(cfg), f) == render(run_scenario(cfg), f);
            ++total;
        }
    }
    return {identical == total, std::to_string(identical) + "/" + std::to_string(total) + " report pairs byte-identical"};
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"probability table reproduction", probability_table_rows},
        {"Monte Carlo consistency", monte_carlo_consistency},
        {"gas arithmetic", gas_arithmetic},
        {"commitment soundness", commitment_soundness},
        {"fixed-point fidelity", fixed_point_fidelity},
        {"partition oracle equivalence", partition_equivalence},
        {"protocol end-to-end", protocol_end_to_end},
        {"deadline enforcement", deadline_enforcement},
        {"replay determinism", replay_determinism},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("threw: ") + e.what()};
        }
        failures += !o.pass;
        std::printf("criterion %zu %s: %s (%s)\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].first,
                    o.detail.c_str());
    }
    std::fflush(stdout);
    return failures == 0 ? 0 : 1;
}
