// danku: scenario runner and report generator.

#include <danku/danku.hpp>

#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

struct CommonOptions {
    std::optional<std::uint64_t> seed;
    std::string out;
    std::string format = "text";
};

void add_common(CLI::App* cmd, CommonOptions& opts) {
    cmd->add_option("--seed", opts.seed, "Seed (overrides the scenario seed for run)");
    cmd->add_option("--out", opts.out, "Write the report to this file instead of stdout");
    cmd->add_option("--format", opts.format, "Report format")->check(CLI::IsMember({"text", "records"}));
}

void emit(const CommonOptions& opts, const std::string& text) {
    if (opts.out.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(opts.out, std::ios::binary);
    if (!f) throw danku::Error("cannot open " + opts.out + " for writing");
    f << text;
    if (!f) throw danku::Error("failed writing " + opts.out);
}

danku::DataGroup read_group(const std::string& path) {
    return danku::group_from_json(danku::read_json_file(path));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"DanKu protocol simulator"};
    app.require_subcommand(1);

    CommonOptions common;

    std::string scenario_path;
    auto* run = app.add_subcommand("run", "Run a scenario file and print its report");
    run->add_option("config", scenario_path, "Scenario file")->required()->check(CLI::ExistingFile);
    add_common(run, common);

    std::vector<std::uint64_t> groups{5, 10, 15, 20, 25, 30};
    std::string tp = "4/5";
    std::uint64_t limit = 5;
    std::uint64_t trials = 0;
    std::string mode = "overlapping";
    auto* prob = app.add_subcommand("prob-table", "Ideal-partition probability per group count");
    prob->add_option("--groups", groups, "Group counts")->delimiter(',');
    prob->add_option("--tp", tp, "Training fraction, e.g. 0.8 or 4/5");
    prob->add_option("--limit", limit, "Attempts (init2 block limit)");
    prob->add_option("--trials", trials, "Monte Carlo trials per row; 0 omits the estimate");
    prob->add_option("--windows", mode, "Monte Carlo attempt windows")
        ->check(CLI::IsMember({"overlapping", "disjoint"}));
    add_common(prob, common);

    std::vector<std::uint64_t> sizes{1024, 11'594'722};
    danku::GasSchedule schedule;
    auto* gas = app.add_subcommand("gas-report", "Storage cost of writing payloads on chain");
    gas->add_option("--bytes", sizes, "Payload sizes in bytes")->delimiter(',');
    gas->add_option("--gas-per-kib", schedule.storage_gas_per_kib, "Storage gas per 1024 bytes");
    gas->add_option("--gas-price-gwei", schedule.gas_price_gwei, "Gas price in gwei");
    gas->add_option("--eth-usd", schedule.eth_usd, "USD per ether");
    gas->add_option("--gas-limit", schedule.gas_limit, "Block gas limit");
    add_common(gas, common);

    std::string group_path;
    std::string nonce_text;
    std::string digest_text;
    auto* verify = app.add_subcommand("verify-commitment", "Check a revealed group and nonce against a digest");
    verify->add_option("groupfile", group_path, "Data group file")->required()->check(CLI::ExistingFile);
    verify->add_option("nonce", nonce_text, "Nonce, decimal or 0x-prefixed hex")->required();
    verify->add_option("digest", digest_text, "Commitment digest, 64 hex digits")->required();

    auto* hash = app.add_subcommand("hash-group", "Print the commitment digest of a data group and nonce");
    hash->add_option("groupfile", group_path, "Data group file")->required()->check(CLI::ExistingFile);
    hash->add_option("nonce", nonce_text, "Nonce, decimal or 0x-prefixed hex")->required();

    std::uint64_t synth_points = 100;
    auto* synth = app.add_subcommand("synth-data", "Write the synthetic two-class dataset");
    synth->add_option("--points", synth_points, "Number of points");
    add_common(synth, common);

    CLI11_PARSE(app, argc, argv);

    try {
        const danku::OutputFormat format = danku::parse_format(common.format);
        if (run->parsed()) {
            danku::ScenarioConfig cfg = danku::load_scenario(scenario_path);
            if (common.seed) cfg.seed = *common.seed;
            emit(common, danku::render(danku::run_scenario(cfg), format));
        } else if (prob->parsed()) {
            const auto table = danku::probability_table(
                groups, danku::Fraction::parse(tp), limit, trials, common.seed.value_or(1),
                mode == "overlapping" ? danku::AttemptMode::Overlapping : danku::AttemptMode::Disjoint);
            emit(common, format == danku::OutputFormat::Text ? danku::render_text(table)
                                                             : danku::render_records(table));
        } else if (gas->parsed()) {
            schedule.validate();
            const auto report = danku::gas_report(schedule, sizes);
            emit(common, format == danku::OutputFormat::Text ? danku::render_text(report)
                                                             : danku::render_records(report));
        } else if (verify->parsed()) {
            const danku::DataGroup group = read_group(group_path);
            const danku::Nonce nonce{danku::parse_uint256(nonce_text)};
            const danku::Digest digest = danku::word_from_hex(digest_text);
            if (danku::verify_reveal(digest, group, nonce)) {
                std::cout << "match\n";
                return 0;
            }
            std::cout << "mismatch: computed " << danku::to_hex(danku::hash_data_group(group, nonce)) << "\n";
            return 1;
        } else if (hash->parsed()) {
            const danku::DataGroup group = read_group(group_path);
            std::cout << danku::to_hex(danku::hash_data_group(group, danku::Nonce{danku::parse_uint256(nonce_text)}))
                      << "\n";
        } else if (synth->parsed()) {
            // One compact [x1, x2, label] row per line.
            std::string text = "{\"points\": [\n";
            const auto points = danku::synthetic_two_class(synth_points, common.seed.value_or(1));
            for (std::size_t i = 0; i < points.size(); ++i) {
                danku::Json row = points[i].inputs;
                row.push_back(points[i].label);
                text += "  " + row.dump() + (i + 1 < points.size() ? ",\n" : "\n");
            }
            emit(common, text + "]}\n");
        }
    } catch (const danku::Error& e) {
        std::cerr << "danku: error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "danku: error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
