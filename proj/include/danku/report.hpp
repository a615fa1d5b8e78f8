#ifndef DANKU_REPORT_HPP
#define DANKU_REPORT_HPP

#include <danku/chain.hpp>
#include <danku/io.hpp>
#include <danku/partition.hpp>

#include <cstdint>
#include <cstdio>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace danku {

enum class OutputFormat { Text, Records };

inline OutputFormat parse_format(const std::string& s) {
    if (s == "text") return OutputFormat::Text;
    if (s == "records") return OutputFormat::Records;
    throw ConfigError("format", "expected text or records, got '" + s + "'");
}

/// printf-style `%.*f` / `%.*g`, locale independent for the C locale.
inline std::string format_fixed(double v, int precision) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", precision, v);
    return buf;
}

inline std::string format_general(double v, int significant) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", significant, v);
    return buf;
}

inline std::string pad_left(const std::string& s, std::size_t width) {
    return s.size() >= width ? s : std::string(width - s.size(), ' ') + s;
}

struct ProbabilityRow {
    std::uint64_t group_count = 0;
    std::uint64_t training_count = 0;
    double union_bound = 0.0;
    double exact_complement = 0.0;
    std::optional<MonteCarloEstimate> monte_carlo;
};

struct ProbabilityTable {
    Fraction training_fraction;
    std::uint64_t block_limit = 0;
    std::uint64_t trials = 0;
    std::uint64_t seed = 0;
    AttemptMode mode = AttemptMode::Overlapping;
    std::vector<ProbabilityRow> rows;
};

/// Per-G manipulation probabilities: the union-bound formula, the exact
/// complement rule and, when `trials > 0`, a Monte Carlo estimate whose
/// target is the training set {0, ..., k-1}.
inline ProbabilityTable probability_table(const std::vector<std::uint64_t>& group_counts,
                                          Fraction training_fraction,
                                          std::uint64_t block_limit,
                                          std::uint64_t trials,
                                          std::uint64_t seed,
                                          AttemptMode mode = AttemptMode::Overlapping) {
    ProbabilityTable table{training_fraction, block_limit, trials, seed, mode, {}};
    for (std::uint64_t g : group_counts) {
        const PartitionConfig cfg{g, training_fraction, block_limit};
        cfg.validate();
        ProbabilityRow row;
        row.group_count = g;
        row.training_count = cfg.training_count();
        row.union_bound = exact_ideal_probability(cfg).value;
        row.exact_complement = exact_complement_probability(cfg).value;
        if (trials > 0) {
            std::set<std::uint64_t> target;
            for (std::uint64_t i = 0; i < row.training_count; ++i) target.insert(i);
            row.monte_carlo = monte_carlo_ideal_probability(cfg, target, trials, seed, mode);
        }
        table.rows.push_back(row);
    }
    return table;
}

inline std::string render_text(const ProbabilityTable& t) {
    std::ostringstream out;
    const bool mc = t.trials > 0;
    out << "Ideal training-set probability, TP=" << t.training_fraction.to_string() << ", L=" << t.block_limit;
    if (mc) {
        out << ", trials=" << t.trials << ", seed=" << t.seed << ", windows="
            << (t.mode == AttemptMode::Overlapping ? "overlapping" : "disjoint");
    }
    out << "\n";
    out << pad_left("G", 5) << pad_left("formula %", 16) << pad_left("complement %", 16);
    if (mc) out << pad_left("MC %", 14) << pad_left("MC 3sigma %", 14);
    out << "\n";
    for (const ProbabilityRow& r : t.rows) {
        out << pad_left(std::to_string(r.group_count), 5) << pad_left(format_general(r.union_bound * 100, 8), 16)
            << pad_left(format_general(r.exact_complement * 100, 8), 16);
        if (r.monte_carlo) {
            out << pad_left(format_fixed(r.monte_carlo->estimate * 100, 5), 14)
                << pad_left(format_fixed(3 * r.monte_carlo->standard_error * 100, 5), 14);
        }
        out << "\n";
    }
    return out.str();
}

inline std::string render_records(const ProbabilityTable& t) {
    std::ostringstream out;
    for (const ProbabilityRow& r : t.rows) {
        Json j{{"record", "probability"},
               {"group_count", r.group_count},
               {"training_count", r.training_count},
               {"training_fraction", t.training_fraction.to_string()},
               {"block_limit", t.block_limit},
               {"union_bound", r.union_bound},
               {"exact_complement", r.exact_complement}};
        if (r.monte_carlo) {
            j["mc_trials"] = r.monte_carlo->trials;
            j["mc_successes"] = r.monte_carlo->successes;
            j["mc_estimate"] = r.monte_carlo->estimate;
            j["mc_standard_error"] = r.monte_carlo->standard_error;
            j["mc_seed"] = t.seed;
            j["mc_windows"] = t.mode == AttemptMode::Overlapping ? "overlapping" : "disjoint";
        }
        out << j.dump() << "\n";
    }
    return out.str();
}

struct GasRow {
    std::uint64_t bytes = 0;
    StorageCost cost;
};

struct GasReport {
    GasSchedule schedule;
    std::vector<GasRow> rows;
};

inline GasReport gas_report(const GasSchedule& schedule, const std::vector<std::uint64_t>& payload_sizes) {
    GasReport report{schedule, {}};
    for (std::uint64_t bytes : payload_sizes) {
        report.rows.push_back(GasRow{bytes, storage_cost_report(schedule, bytes)});
    }
    return report;
}

inline std::string render_text(const GasReport& r) {
    std::ostringstream out;
    out << "Storage cost at " << r.schedule.storage_gas_per_kib << " gas/KiB, " << r.schedule.gas_price_gwei
        << " gwei/gas, $" << r.schedule.eth_usd << "/ETH, gas limit " << r.schedule.gas_limit << "\n";
    out << pad_left("bytes", 14) << pad_left("gas", 18) << pad_left("ETH", 16) << pad_left("USD", 16)
        << pad_left("txs@limit", 12) << "\n";
    for (const GasRow& row : r.rows) {
        const std::uint64_t txs = (row.cost.gas + r.schedule.gas_limit - 1) / r.schedule.gas_limit;
        out << pad_left(std::to_string(row.bytes), 14) << pad_left(std::to_string(row.cost.gas), 18)
            << pad_left(format_fixed(row.cost.ether, 6), 16) << pad_left(format_fixed(row.cost.usd, 2), 16)
            << pad_left(std::to_string(txs), 12) << "\n";
    }
    return out.str();
}

inline std::string render_records(const GasReport& r) {
    std::ostringstream out;
    for (const GasRow& row : r.rows) {
        out << Json{{"record", "storage_cost"},
                    {"bytes", row.bytes},
                    {"gas", row.cost.gas},
                    {"wei", row.cost.wei.str()},
                    {"ether", row.cost.ether},
                    {"usd", row.cost.usd},
                    {"storage_gas_per_kib", r.schedule.storage_gas_per_kib},
                    {"gas_price_gwei", r.schedule.gas_price_gwei},
                    {"eth_usd", r.schedule.eth_usd}}
                   .dump()
            << "\n";
    }
    return out.str();
}

}  // namespace danku

#endif  // DANKU_REPORT_HPP
