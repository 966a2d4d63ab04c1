#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <ctime>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <json.hpp>

#include "cgpbench/evolution.hpp"
#include "cgpbench/hpo.hpp"
#include "cgpbench/regression.hpp"
#include "cgpbench/report.hpp"
#include "cgpbench/version.hpp"

namespace cgpbench {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// All randomness in an experiment flows from these declared seeds, never
// from time or environment: `split` shuffles the train/test split, `cgp`
// seeds the fold assignment and the cross-validation runs, `evaluation`
// seeds the per-run evolution, `tuning` seeds the configuration samplers.
struct SeedsBlock {
    std::uint64_t split = 42;
    std::uint64_t cgp = 42;
    std::vector<std::uint64_t> evaluation;
    std::vector<std::uint64_t> tuning;
};

struct ExperimentConfig {
    std::filesystem::path dataset_path;
    std::filesystem::path output_dir = "out";
    CrossoverKind operator_kind = CrossoverKind::Discrete;
    bool restricted_reconnect = false;
    bool constant_input = false;
    std::vector<std::string> function_names = {"add", "sub", "mul", "pdiv", "sin", "cos"};
    int max_arity = 2;
    HyperparameterConfiguration hyperparameters;
    HyperparameterSpace space;
    bool space_from_config = false;
    std::uint64_t budget = 50000;
    int trials = 200;
    TuningStrategy strategy = TuningStrategy::Random;
    double train_fraction = 0.75;
    int folds = 5;
    SeedsBlock seeds;

    void validate() const {
        if (dataset_path.empty()) throw ConfigError("config: missing dataset path");
        if (!std::filesystem::exists(dataset_path))
            throw ConfigError("config: dataset file does not exist: " + dataset_path.string());
        if (seeds.evaluation.empty()) throw ConfigError("config: empty evaluation seed list");
        if (seeds.tuning.empty()) throw ConfigError("config: empty tuning seed list");
        if (trials < 1) throw ConfigError("config: trials must be >= 1");
        if (folds < 2) throw ConfigError("config: folds must be >= 2");
        if (!(train_fraction > 0.0 && train_fraction < 1.0))
            throw ConfigError("config: train_fraction must be in (0, 1)");
        if (max_arity < 1) throw ConfigError("config: max_arity must be >= 1");
        try {
            hyperparameters.validate();
            space.validate();
            make_function_set(function_names);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("config: ") + e.what());
        }
        if (budget < static_cast<std::uint64_t>(hyperparameters.population_size))
            throw ConfigError("config: budget below baseline population_size");
        if (budget < static_cast<std::uint64_t>(space.population_size.hi))
            throw ConfigError("config: budget below the space's largest population_size");
    }
};

namespace detail {

inline std::uint64_t json_seed(const nlohmann::json& j) { return j.get<std::uint64_t>(); }

inline IntRange int_range_from_json(const nlohmann::json& j, const char* name) {
    if (!j.is_array() || j.size() != 2)
        throw ConfigError(std::string("config: space field ") + name + " must be [lo, hi]");
    return {j[0].get<int>(), j[1].get<int>()};
}

inline RealRange real_range_from_json(const nlohmann::json& j, const char* name) {
    if (!j.is_array() || j.size() != 2)
        throw ConfigError(std::string("config: space field ") + name + " must be [lo, hi]");
    return {j[0].get<double>(), j[1].get<double>()};
}

} // namespace detail

inline nlohmann::json hyperparameters_to_json(const HyperparameterConfiguration& hp) {
    return {{"population_size", hp.population_size}, {"levels_back", hp.levels_back},
            {"mutation_rate", hp.mutation_rate},     {"cx_rate", hp.cx_rate},
            {"tournament_size", hp.tournament_size}, {"num_function_nodes", hp.num_function_nodes}};
}

inline HyperparameterConfiguration hyperparameters_from_json(const nlohmann::json& j) {
    HyperparameterConfiguration hp;
    hp.population_size = j.at("population_size").get<int>();
    hp.levels_back = j.at("levels_back").get<int>();
    hp.mutation_rate = j.at("mutation_rate").get<double>();
    hp.cx_rate = j.at("cx_rate").get<double>();
    hp.tournament_size = j.at("tournament_size").get<int>();
    hp.num_function_nodes = j.at("num_function_nodes").get<int>();
    return hp;
}

inline nlohmann::json space_to_json(const HyperparameterSpace& s) {
    auto ir = [](const IntRange& r) { return nlohmann::json::array({r.lo, r.hi}); };
    auto rr = [](const RealRange& r) { return nlohmann::json::array({r.lo, r.hi}); };
    return {{"population_size", ir(s.population_size)},
            {"levels_back", ir(s.levels_back)},
            {"mutation_rate", rr(s.mutation_rate)},
            {"cx_rate", rr(s.cx_rate)},
            {"tournament_size", ir(s.tournament_size)},
            {"num_function_nodes", ir(s.num_function_nodes)}};
}

inline HyperparameterSpace space_from_json(const nlohmann::json& j) {
    HyperparameterSpace s;
    if (j.contains("population_size"))
        s.population_size = detail::int_range_from_json(j["population_size"], "population_size");
    if (j.contains("levels_back"))
        s.levels_back = detail::int_range_from_json(j["levels_back"], "levels_back");
    if (j.contains("mutation_rate"))
        s.mutation_rate = detail::real_range_from_json(j["mutation_rate"], "mutation_rate");
    if (j.contains("cx_rate")) s.cx_rate = detail::real_range_from_json(j["cx_rate"], "cx_rate");
    if (j.contains("tournament_size"))
        s.tournament_size = detail::int_range_from_json(j["tournament_size"], "tournament_size");
    if (j.contains("num_function_nodes"))
        s.num_function_nodes =
            detail::int_range_from_json(j["num_function_nodes"], "num_function_nodes");
    return s;
}

inline ExperimentConfig experiment_config_from_json(const nlohmann::json& j) {
    ExperimentConfig cfg;
    if (j.contains("dataset")) cfg.dataset_path = j["dataset"].get<std::string>();
    if (j.contains("output_dir")) cfg.output_dir = j["output_dir"].get<std::string>();
    if (j.contains("operator"))
        cfg.operator_kind = crossover_kind_from_string(j["operator"].get<std::string>());
    if (j.contains("restricted_reconnect"))
        cfg.restricted_reconnect = j["restricted_reconnect"].get<bool>();
    if (j.contains("constant_input")) cfg.constant_input = j["constant_input"].get<bool>();
    if (j.contains("function_set"))
        cfg.function_names = j["function_set"].get<std::vector<std::string>>();
    if (j.contains("max_arity")) cfg.max_arity = j["max_arity"].get<int>();
    if (j.contains("hyperparameters"))
        cfg.hyperparameters = hyperparameters_from_json(j["hyperparameters"]);
    if (j.contains("space")) {
        cfg.space = space_from_json(j["space"]);
        cfg.space_from_config = true;
    }
    if (j.contains("budget")) cfg.budget = j["budget"].get<std::uint64_t>();
    if (j.contains("trials")) cfg.trials = j["trials"].get<int>();
    if (j.contains("strategy"))
        cfg.strategy = tuning_strategy_from_string(j["strategy"].get<std::string>());
    if (j.contains("train_fraction")) cfg.train_fraction = j["train_fraction"].get<double>();
    if (j.contains("folds")) cfg.folds = j["folds"].get<int>();
    if (j.contains("seeds")) {
        const auto& s = j["seeds"];
        if (s.contains("split")) cfg.seeds.split = detail::json_seed(s["split"]);
        if (s.contains("cgp")) cfg.seeds.cgp = detail::json_seed(s["cgp"]);
        if (s.contains("evaluation"))
            cfg.seeds.evaluation = s["evaluation"].get<std::vector<std::uint64_t>>();
        if (s.contains("tuning")) cfg.seeds.tuning = s["tuning"].get<std::vector<std::uint64_t>>();
    }
    return cfg;
}

inline ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config parse error in " + path.string() + ": " + e.what());
    }
    try {
        return experiment_config_from_json(j);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config field error in " + path.string() + ": " + e.what());
    }
}

// One persisted run: the per-seed outcome of evolving on the training rows
// and scoring the best-on-training individual on the held-out test rows.
struct RunRecord {
    std::string dataset;
    std::string operator_name;
    std::string cell; // "baseline" or "tuned_<tuning seed>"
    HyperparameterConfiguration configuration;
    std::uint64_t seed = 0;
    double train_mse = 0.0;
    double test_mse = 0.0;
    std::uint64_t evaluations_used = 0;
    std::vector<int> best_genome;
    std::string engine_version;
    std::string timestamp_utc;
};

inline nlohmann::json run_record_to_json(const RunRecord& r) {
    nlohmann::json j;
    j["dataset"] = r.dataset;
    j["operator"] = r.operator_name;
    j["cell"] = r.cell;
    j["configuration"] = hyperparameters_to_json(r.configuration);
    j["seed"] = r.seed;
    j["train_mse"] = serialize_fitness(r.train_mse);
    j["test_mse"] = serialize_fitness(r.test_mse);
    j["evaluations_used"] = r.evaluations_used;
    j["best_genome"] = r.best_genome;
    j["engine_version"] = r.engine_version;
    j["timestamp_utc"] = r.timestamp_utc;
    return j;
}

inline RunRecord run_record_from_json(const nlohmann::json& j) {
    RunRecord r;
    r.dataset = j.at("dataset").get<std::string>();
    r.operator_name = j.at("operator").get<std::string>();
    r.cell = j.at("cell").get<std::string>();
    r.configuration = hyperparameters_from_json(j.at("configuration"));
    r.seed = j.at("seed").get<std::uint64_t>();
    r.train_mse = j.at("train_mse").get<double>();
    r.test_mse = j.at("test_mse").get<double>();
    r.evaluations_used = j.at("evaluations_used").get<std::uint64_t>();
    r.best_genome = j.at("best_genome").get<std::vector<int>>();
    r.engine_version = j.value("engine_version", "");
    r.timestamp_utc = j.value("timestamp_utc", "");
    return r;
}

inline std::string utc_timestamp() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

// Write-temp-then-rename so concurrent workers and interrupted runs never
// leave a half-written record behind.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::create_directories(path.parent_path());
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << content;
        if (!out) throw std::runtime_error("short write to " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Runs `count` independent jobs over a fixed-size worker pool. Workers pull
// from an atomic counter; outputs must go to per-job slots so the merge
// order is deterministic. workers <= 0 means hardware concurrency.
inline void run_jobs(std::size_t count, int workers, const std::function<void(std::size_t)>& job) {
    if (workers <= 0) workers = static_cast<int>(std::thread::hardware_concurrency());
    if (workers < 1) workers = 1;
    if (workers == 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) job(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= count) return;
            try {
                job(i);
            } catch (...) {
                const std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    const std::size_t n_threads = std::min<std::size_t>(static_cast<std::size_t>(workers), count);
    pool.reserve(n_threads);
    for (std::size_t i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

// Dataset, base CGP structure, split and folds derived from a validated
// config. Everything downstream borrows from this.
struct ExperimentSetup {
    Dataset dataset;
    CgpConfig cgp_base;
    SplitSpec split;
    FoldAssignment folds;
};

inline ExperimentSetup prepare_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    Dataset ds = load_dataset(cfg.dataset_path);
    CgpConfig base;
    base.num_inputs = static_cast<int>(ds.d()) + (cfg.constant_input ? 1 : 0);
    base.num_outputs = 1;
    base.max_arity = cfg.max_arity;
    base.functions = make_function_set(cfg.function_names);
    base.num_function_nodes = cfg.hyperparameters.num_function_nodes;
    base.levels_back = cfg.hyperparameters.levels_back;
    try {
        base.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    SplitSpec sp = cgpbench::split(ds, cfg.train_fraction, cfg.seeds.split);
    FoldAssignment fa = kfold(sp.train_indices, cfg.folds, cfg.seeds.cgp);
    ExperimentSetup setup{std::move(ds), std::move(base), std::move(sp), std::move(fa)};
    return setup;
}

inline std::filesystem::path record_path(const ExperimentConfig& cfg, const std::string& dataset,
                                         const std::string& cell, std::uint64_t seed) {
    return cfg.output_dir / "records" / dataset / to_string(cfg.operator_kind) / cell /
           ("seed_" + std::to_string(seed) + ".json");
}

inline std::filesystem::path tuning_path(const ExperimentConfig& cfg, const std::string& dataset,
                                         std::uint64_t tuning_seed) {
    return cfg.output_dir / "tuning" / dataset / to_string(cfg.operator_kind) /
           ("tune_seed_" + std::to_string(tuning_seed) + ".json");
}

namespace detail {

inline RunRecord execute_run(const ExperimentConfig& cfg, const ExperimentSetup& setup,
                             const HyperparameterConfiguration& hp, const std::string& cell,
                             std::uint64_t seed) {
    const CgpConfig run_cfg = apply_hyperparameters(setup.cgp_base, hp);
    const FitnessFn train_fit = fitness_on(setup.split.train_indices, setup.dataset, run_cfg);
    const FitnessFn test_fit = fitness_on(setup.split.test_indices, setup.dataset, run_cfg);
    const EvolutionResult res = evolve(train_fit, hp, run_cfg, cfg.budget, cfg.operator_kind, seed,
                                       cfg.restricted_reconnect);
    RunRecord rec;
    rec.dataset = setup.dataset.name;
    rec.operator_name = to_string(cfg.operator_kind);
    rec.cell = cell;
    rec.configuration = hp;
    rec.seed = seed;
    rec.train_mse = res.best.fitness;
    rec.test_mse = test_fit(res.best.genome);
    rec.evaluations_used = res.evaluations_used;
    rec.best_genome = res.best.genome.genes;
    rec.engine_version = kEngineVersion;
    rec.timestamp_utc = utc_timestamp();
    return rec;
}

inline RunRecord load_run_record(const std::filesystem::path& path) {
    nlohmann::json j;
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read record " + path.string());
    in >> j;
    return run_record_from_json(j);
}

} // namespace detail

// One evolution run per evaluation seed with the config's baseline
// hyperparameters. Existing records are reused unless `force`.
inline std::vector<RunRecord> cmd_baseline(const ExperimentConfig& cfg, int workers = 1,
                                           bool force = false) {
    const ExperimentSetup setup = prepare_experiment(cfg);
    const auto& seeds = cfg.seeds.evaluation;
    std::vector<RunRecord> records(seeds.size());
    run_jobs(seeds.size(), workers, [&](std::size_t i) {
        const auto path = record_path(cfg, setup.dataset.name, "baseline", seeds[i]);
        if (!force && std::filesystem::exists(path)) {
            records[i] = detail::load_run_record(path);
            return;
        }
        RunRecord rec = detail::execute_run(cfg, setup, cfg.hyperparameters, "baseline", seeds[i]);
        write_file_atomic(path, run_record_to_json(rec).dump(2) + "\n");
        records[i] = std::move(rec);
    });
    return records;
}

inline nlohmann::json tuning_result_to_json(const TuningResult& result, std::uint64_t tuning_seed,
                                            const ExperimentConfig& cfg) {
    nlohmann::json j;
    j["tuning_seed"] = tuning_seed;
    j["strategy"] = result.strategy;
    j["incumbent"] = hyperparameters_to_json(result.incumbent);
    j["space"] = space_to_json(cfg.space);
    j["space_source"] = cfg.space_from_config ? "config" : "default-standin";
    nlohmann::json trials = nlohmann::json::array();
    for (const auto& t : result.trials) {
        nlohmann::json tj;
        tj["trial_index"] = t.trial_index;
        tj["configuration"] = hyperparameters_to_json(t.configuration);
        tj["objective"] = serialize_fitness(t.objective);
        nlohmann::json pf = nlohmann::json::array();
        for (const double v : t.per_fold) pf.push_back(serialize_fitness(v));
        tj["per_fold"] = pf;
        tj["seed"] = t.seed;
        trials.push_back(tj);
    }
    j["trials"] = trials;
    j["engine_version"] = kEngineVersion;
    return j;
}

// One tuning campaign per tuning seed, sharing the fixed split and fold
// seeds so every trial is scored on the same cross-validation layout.
inline std::vector<TuningResult> cmd_tune(const ExperimentConfig& cfg, int workers = 1,
                                          bool force = false) {
    const ExperimentSetup setup = prepare_experiment(cfg);
    const CvContext ctx{&setup.dataset, &setup.split,          &setup.folds, setup.cgp_base,
                        cfg.operator_kind, cfg.restricted_reconnect, cfg.budget};
    const auto& seeds = cfg.seeds.tuning;
    std::vector<TuningResult> results(seeds.size());
    run_jobs(seeds.size(), workers, [&](std::size_t i) {
        const auto path = tuning_path(cfg, setup.dataset.name, seeds[i]);
        if (!force && std::filesystem::exists(path)) {
            nlohmann::json j;
            std::ifstream in(path);
            in >> j;
            TuningResult r;
            r.strategy = j.at("strategy").get<std::string>();
            r.incumbent = hyperparameters_from_json(j.at("incumbent"));
            for (const auto& tj : j.at("trials")) {
                TrialRecord t;
                t.trial_index = tj.at("trial_index").get<int>();
                t.configuration = hyperparameters_from_json(tj.at("configuration"));
                t.objective = tj.at("objective").get<double>();
                t.per_fold = tj.at("per_fold").get<std::vector<double>>();
                t.seed = tj.at("seed").get<std::uint64_t>();
                r.trials.push_back(std::move(t));
            }
            results[i] = std::move(r);
            return;
        }
        TuningResult r = tune(cfg.space, ctx, cfg.strategy, cfg.trials, seeds[i], cfg.seeds.cgp);
        write_file_atomic(path, tuning_result_to_json(r, seeds[i], cfg).dump(2) + "\n");
        results[i] = std::move(r);
    });
    return results;
}

struct Incumbent {
    std::uint64_t tuning_seed = 0;
    HyperparameterConfiguration configuration;
};

inline std::vector<Incumbent> load_incumbents(const ExperimentConfig& cfg,
                                              const std::string& dataset_name) {
    const auto dir = cfg.output_dir / "tuning" / dataset_name / to_string(cfg.operator_kind);
    if (!std::filesystem::exists(dir))
        throw ConfigError("no tuning results under " + dir.string() + "; run `tune` first");
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir))
        if (entry.path().extension() == ".json") files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    if (files.empty()) throw ConfigError("no tuning results under " + dir.string());

    std::vector<Incumbent> incumbents;
    for (const auto& f : files) {
        nlohmann::json j;
        std::ifstream in(f);
        if (!in) throw ConfigError("cannot read incumbent file " + f.string());
        try {
            in >> j;
            Incumbent inc;
            inc.tuning_seed = j.at("tuning_seed").get<std::uint64_t>();
            inc.configuration = hyperparameters_from_json(j.at("incumbent"));
            incumbents.push_back(inc);
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError("malformed incumbent file " + f.string() + ": " + e.what());
        }
        const std::string bad = cfg.space.out_of_bounds_field(incumbents.back().configuration);
        if (!bad.empty())
            throw ConfigError("incumbent in " + f.string() + ": field '" + bad +
                              "' violates the configured space bounds");
        try {
            incumbents.back().configuration.validate();
        } catch (const std::invalid_argument& e) {
            throw ConfigError("incumbent in " + f.string() + ": " + e.what());
        }
    }
    return incumbents;
}

// Evaluation runs for every persisted incumbent x evaluation seed. Each
// record is tagged with the incumbent's tuning seed; existing records are
// skipped unless `force`.
inline std::vector<RunRecord> cmd_evaluate(const ExperimentConfig& cfg, int workers = 1,
                                           bool force = false) {
    const ExperimentSetup setup = prepare_experiment(cfg);
    const std::vector<Incumbent> incumbents = load_incumbents(cfg, setup.dataset.name);
    const auto& seeds = cfg.seeds.evaluation;

    struct Job {
        const Incumbent* incumbent;
        std::uint64_t seed;
    };
    std::vector<Job> jobs;
    for (const auto& inc : incumbents)
        for (const auto s : seeds) jobs.push_back({&inc, s});

    std::vector<RunRecord> records(jobs.size());
    run_jobs(jobs.size(), workers, [&](std::size_t i) {
        const auto& job = jobs[i];
        const std::string cell = "tuned_" + std::to_string(job.incumbent->tuning_seed);
        const auto path = record_path(cfg, setup.dataset.name, cell, job.seed);
        if (!force && std::filesystem::exists(path)) {
            records[i] = detail::load_run_record(path);
            return;
        }
        RunRecord rec =
            detail::execute_run(cfg, setup, job.incumbent->configuration, cell, job.seed);
        write_file_atomic(path, run_record_to_json(rec).dump(2) + "\n");
        records[i] = std::move(rec);
    });
    return records;
}

// Scans each directory recursively for RunRecord JSON files and aggregates
// them into the comparison table; each directory is one group column. Writes
// report.csv (table shape), report_long.csv (plot-ready medians with
// quartiles) and report.json (with the statistical conventions) to out_dir.
// Missing cells become gaps, not failures.
inline ReportTable cmd_report(const std::vector<std::filesystem::path>& record_dirs,
                              const std::filesystem::path& out_dir, double alpha = 0.05,
                              const std::string& metric = "test") {
    if (metric != "test" && metric != "train")
        throw ConfigError("report: metric must be 'test' or 'train'");

    GroupedValues values;
    for (const auto& dir : record_dirs) {
        if (!std::filesystem::exists(dir)) throw ConfigError("report: no such directory: " + dir.string());
        std::string label = dir.filename().string();
        if (label.empty()) label = dir.parent_path().filename().string();
        std::vector<std::filesystem::path> files;
        for (const auto& entry : std::filesystem::recursive_directory_iterator(dir))
            if (entry.is_regular_file() && entry.path().extension() == ".json")
                files.push_back(entry.path());
        std::sort(files.begin(), files.end());
        for (const auto& f : files) {
            try {
                const RunRecord rec = detail::load_run_record(f);
                values[rec.dataset][label].push_back(metric == "test" ? rec.test_mse
                                                                      : rec.train_mse);
            } catch (const std::exception&) {
                // not a run record; ignore
            }
        }
    }

    const ReportTable table = build_report(values, alpha);
    std::filesystem::create_directories(out_dir);
    write_file_atomic(out_dir / "report.csv", report_csv(table));
    write_file_atomic(out_dir / "report_long.csv", report_long_csv(table));
    nlohmann::json j = report_json(table);
    j["metric"] = metric;
    write_file_atomic(out_dir / "report.json", j.dump(2) + "\n");
    return table;
}

} // namespace cgpbench
