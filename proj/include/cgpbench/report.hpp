#pragma once

#include <charconv>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "cgpbench/stats.hpp"

namespace cgpbench {

// Shortest round-trip decimal form, locale-independent.
inline std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

// dataset -> group -> raw values
using GroupedValues = std::map<std::string, std::map<std::string, std::vector<double>>>;

struct ReportCell {
    bool present = false;
    SampleSummary summary;
    bool best = false;
    bool tied = false;
    double p_vs_best = std::numeric_limits<double>::quiet_NaN();
};

// One row per dataset, one column block per group; exactly one best marker
// per row and tie flags from the pairwise test against the best group.
struct ReportTable {
    std::vector<std::string> groups;
    std::map<std::string, std::map<std::string, ReportCell>> rows;
    double alpha = 0.05;
};

inline ReportTable build_report(const GroupedValues& values, double alpha) {
    ReportTable table;
    table.alpha = alpha;

    std::map<std::string, bool> group_set;
    for (const auto& [dataset, groups] : values)
        for (const auto& [group, vals] : groups) group_set[group] = true;
    for (const auto& [group, unused] : group_set) table.groups.push_back(group);

    for (const auto& [dataset, groups] : values) {
        std::map<std::string, std::vector<double>> present;
        for (const auto& [group, vals] : groups)
            if (!vals.empty()) present[group] = vals;

        auto& row = table.rows[dataset];
        for (const auto& g : table.groups) row[g] = ReportCell{};
        if (present.empty()) continue;

        if (present.size() == 1) {
            const auto& [group, vals] = *present.begin();
            ReportCell& cell = row[group];
            cell.present = true;
            cell.summary = summarise(vals);
            cell.best = true;
            cell.tied = true;
            continue;
        }

        const ComparisonVerdict verdict = compare_groups(present, alpha);
        for (const auto& [group, vals] : present) {
            ReportCell& cell = row[group];
            cell.present = true;
            cell.summary = summarise(vals);
            cell.best = group == verdict.best_group;
            cell.tied = verdict.tied_with_best.count(group) > 0;
            if (!cell.best) cell.p_vs_best = verdict.p_values.at({group, verdict.best_group});
        }
    }
    return table;
}

// Wide CSV: rows are datasets, per-group columns median/q1/q3/best/tied.
inline std::string report_csv(const ReportTable& table) {
    std::string out = "dataset";
    for (const auto& g : table.groups)
        out += "," + g + ":median," + g + ":q1," + g + ":q3," + g + ":best," + g + ":tied";
    out += "\n";
    for (const auto& [dataset, row] : table.rows) {
        out += dataset;
        for (const auto& g : table.groups) {
            const ReportCell& cell = row.at(g);
            if (!cell.present) {
                out += ",,,,,";
            } else {
                out += "," + format_double(cell.summary.median) + "," +
                       format_double(cell.summary.q1) + "," + format_double(cell.summary.q3) +
                       "," + (cell.best ? "1" : "0") + "," + (cell.tied ? "1" : "0");
            }
        }
        out += "\n";
    }
    return out;
}

// Long CSV, one row per (dataset, group): plot-ready medians with quartile
// bars.
inline std::string report_long_csv(const ReportTable& table) {
    std::string out = "dataset,group,n,median,q1,q3\n";
    for (const auto& [dataset, row] : table.rows) {
        for (const auto& g : table.groups) {
            const ReportCell& cell = row.at(g);
            if (!cell.present) continue;
            out += dataset + "," + g + "," + std::to_string(cell.summary.n) + "," +
                   format_double(cell.summary.median) + "," + format_double(cell.summary.q1) +
                   "," + format_double(cell.summary.q3) + "\n";
        }
    }
    return out;
}

inline nlohmann::json report_json(const ReportTable& table) {
    nlohmann::json j;
    j["alpha"] = table.alpha;
    j["conventions"] = {
        {"quartiles", "linear interpolation on the sorted sample at positions (n-1)*q"},
        {"test", "two-sided Mann-Whitney U; exact enumeration when pooled n <= 16 and tie-free, "
                 "else normal approximation with midrank tie correction and continuity correction"},
        {"exact_enumeration_limit", kExactEnumerationLimit},
        {"worst_fitness_serialized", kWorstFitnessSerialized},
    };
    j["groups"] = table.groups;
    nlohmann::json rows = nlohmann::json::object();
    for (const auto& [dataset, row] : table.rows) {
        nlohmann::json r = nlohmann::json::object();
        for (const auto& g : table.groups) {
            const ReportCell& cell = row.at(g);
            if (!cell.present) {
                r[g] = nullptr;
                continue;
            }
            nlohmann::json c;
            c["n"] = cell.summary.n;
            c["median"] = cell.summary.median;
            c["q1"] = cell.summary.q1;
            c["q3"] = cell.summary.q3;
            c["best"] = cell.best;
            c["tied"] = cell.tied;
            if (!std::isnan(cell.p_vs_best)) c["p_vs_best"] = cell.p_vs_best;
            r[g] = c;
        }
        rows[dataset] = r;
    }
    j["datasets"] = rows;
    return j;
}

} // namespace cgpbench
