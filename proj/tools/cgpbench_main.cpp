// Command-line entry point for the recombination-CGP benchmark harness:
// baseline runs, hyperparameter tuning, tuned-configuration evaluation and
// report generation, all driven by a JSON experiment config.
#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cgpbench/cgpbench.hpp"

namespace {

// "a..b" (inclusive), "a,b,c" or a single integer.
std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
    std::vector<std::uint64_t> seeds;
    const auto dots = text.find("..");
    if (dots != std::string::npos) {
        const std::uint64_t lo = std::stoull(text.substr(0, dots));
        const std::uint64_t hi = std::stoull(text.substr(dots + 2));
        if (hi < lo) throw cgpbench::ConfigError("--seeds: range end before start");
        for (std::uint64_t s = lo; s <= hi; ++s) seeds.push_back(s);
        return seeds;
    }
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto comma = text.find(',', start);
        const std::string item =
            text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
        if (!item.empty()) seeds.push_back(std::stoull(item));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    if (seeds.empty()) throw cgpbench::ConfigError("--seeds: empty seed list");
    return seeds;
}

struct CommonFlags {
    std::string config_path;
    std::string dataset;
    std::string operator_name;
    std::string seeds;
    std::uint64_t budget = 0;
    int trials = 0;
    std::string out;
    int workers = 1;
    bool force = false;
};

void add_common_options(CLI::App* cmd, CommonFlags& flags, bool with_trials) {
    cmd->add_option("--config", flags.config_path, "experiment config file (JSON)")
        ->required();
    cmd->add_option("--dataset", flags.dataset, "override the dataset path");
    cmd->add_option("--operator", flags.operator_name,
                    "override the crossover operator: subgraph|discrete|none");
    cmd->add_option("--seeds", flags.seeds, "override the seed list, e.g. 1..30 or 1,2,5");
    cmd->add_option("--budget", flags.budget, "override the per-run evaluation budget");
    if (with_trials) cmd->add_option("--trials", flags.trials, "override the tuning trial count");
    cmd->add_option("--out", flags.out, "override the output directory");
    cmd->add_option("--workers", flags.workers, "worker pool size (0 = hardware concurrency)");
    cmd->add_flag("--force", flags.force, "recompute results that already exist on disk");
}

cgpbench::ExperimentConfig load_with_overrides(const CommonFlags& flags, bool seeds_are_tuning) {
    cgpbench::ExperimentConfig cfg = cgpbench::load_experiment_config(flags.config_path);
    if (!flags.dataset.empty()) cfg.dataset_path = flags.dataset;
    if (!flags.operator_name.empty())
        cfg.operator_kind = cgpbench::crossover_kind_from_string(flags.operator_name);
    if (!flags.seeds.empty()) {
        if (seeds_are_tuning)
            cfg.seeds.tuning = parse_seed_list(flags.seeds);
        else
            cfg.seeds.evaluation = parse_seed_list(flags.seeds);
    }
    if (flags.budget > 0) cfg.budget = flags.budget;
    if (flags.trials > 0) cfg.trials = flags.trials;
    if (!flags.out.empty()) cfg.output_dir = flags.out;
    return cfg;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"cgpbench - recombination-based CGP engine and benchmark harness"};
    app.require_subcommand(1);
    app.set_version_flag("--version", cgpbench::kEngineVersion);

    CommonFlags baseline_flags, tune_flags, evaluate_flags;
    auto* baseline = app.add_subcommand(
        "baseline", "run the manually configured hyperparameters over the evaluation seeds");
    add_common_options(baseline, baseline_flags, false);

    auto* tune = app.add_subcommand(
        "tune", "run one hyperparameter-optimisation campaign per tuning seed");
    add_common_options(tune, tune_flags, true);

    auto* evaluate = app.add_subcommand(
        "evaluate", "run every persisted incumbent over the evaluation seeds");
    add_common_options(evaluate, evaluate_flags, false);

    std::vector<std::string> report_dirs;
    std::string report_out = "report";
    double report_alpha = 0.05;
    std::string report_metric = "test";
    auto* report = app.add_subcommand(
        "report", "aggregate run records into the comparison table (CSV + JSON)");
    report->add_option("dirs", report_dirs, "record directories, one group per directory")
        ->required()
        ->expected(-1);
    report->add_option("--out", report_out, "report output directory");
    report->add_option("--alpha", report_alpha, "significance level for the tie test");
    report->add_option("--metric", report_metric, "which MSE to aggregate: test|train");

    CLI11_PARSE(app, argc, argv);

    try {
        if (baseline->parsed()) {
            const auto cfg = load_with_overrides(baseline_flags, false);
            const auto records = cgpbench::cmd_baseline(cfg, baseline_flags.workers, baseline_flags.force);
            std::cout << "baseline: " << records.size() << " run records under "
                      << (cfg.output_dir / "records").string() << "\n";
        } else if (tune->parsed()) {
            const auto cfg = load_with_overrides(tune_flags, true);
            const auto results = cgpbench::cmd_tune(cfg, tune_flags.workers, tune_flags.force);
            std::cout << "tune: " << results.size() << " tuning results under "
                      << (cfg.output_dir / "tuning").string() << "\n";
        } else if (evaluate->parsed()) {
            const auto cfg = load_with_overrides(evaluate_flags, false);
            const auto records = cgpbench::cmd_evaluate(cfg, evaluate_flags.workers, evaluate_flags.force);
            std::cout << "evaluate: " << records.size() << " run records under "
                      << (cfg.output_dir / "records").string() << "\n";
        } else if (report->parsed()) {
            std::vector<std::filesystem::path> dirs(report_dirs.begin(), report_dirs.end());
            const auto table = cgpbench::cmd_report(dirs, report_out, report_alpha, report_metric);
            std::cout << "report: " << table.rows.size() << " dataset rows x "
                      << table.groups.size() << " groups under " << report_out << "\n";
        }
    } catch (const cgpbench::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const cgpbench::IngestError& e) {
        std::cerr << "ingestion error: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "runtime failure: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
