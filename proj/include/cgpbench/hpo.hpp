#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "cgpbench/evolution.hpp"
#include "cgpbench/regression.hpp"
#include "cgpbench/rng.hpp"

namespace cgpbench {

struct IntRange {
    int lo = 0;
    int hi = 0;
    friend bool operator==(const IntRange&, const IntRange&) = default;
};

struct RealRange {
    double lo = 0.0;
    double hi = 0.0;
    friend bool operator==(const RealRange&, const RealRange&) = default;
};

// Tuning space over the six hyperparameters, with the conditional
// constraints levels_back <= num_function_nodes and
// tournament_size <= population_size enforced by construction. The default
// bounds bracket the baseline values; they are stand-ins, not published
// scenario bounds, and emitted reports label them as such.
struct HyperparameterSpace {
    IntRange population_size{10, 200};
    IntRange levels_back{10, 500};
    RealRange mutation_rate{0.01, 0.5};
    RealRange cx_rate{0.0, 1.0};
    IntRange tournament_size{2, 10};
    IntRange num_function_nodes{10, 500};

    friend bool operator==(const HyperparameterSpace&, const HyperparameterSpace&) = default;

    void validate() const {
        auto check_int = [](const IntRange& r, const char* name) {
            if (r.lo > r.hi) throw std::invalid_argument(std::string("space: empty range for ") + name);
        };
        auto check_real = [](const RealRange& r, const char* name) {
            if (r.lo > r.hi) throw std::invalid_argument(std::string("space: empty range for ") + name);
        };
        check_int(population_size, "population_size");
        check_int(levels_back, "levels_back");
        check_int(tournament_size, "tournament_size");
        check_int(num_function_nodes, "num_function_nodes");
        check_real(mutation_rate, "mutation_rate");
        check_real(cx_rate, "cx_rate");
        if (population_size.lo < 2)
            throw std::invalid_argument("space: population_size lower bound must be >= 2");
        if (tournament_size.lo < 1)
            throw std::invalid_argument("space: tournament_size lower bound must be >= 1");
        if (num_function_nodes.lo < 1)
            throw std::invalid_argument("space: num_function_nodes lower bound must be >= 1");
        if (levels_back.lo < 1)
            throw std::invalid_argument("space: levels_back lower bound must be >= 1");
        if (levels_back.lo > num_function_nodes.lo)
            throw std::invalid_argument(
                "space: levels_back lower bound exceeds num_function_nodes lower bound");
        if (tournament_size.lo > population_size.lo)
            throw std::invalid_argument(
                "space: tournament_size lower bound exceeds population_size lower bound");
        if (mutation_rate.lo < 0.0 || mutation_rate.hi > 1.0)
            throw std::invalid_argument("space: mutation_rate must stay within [0, 1]");
        if (cx_rate.lo < 0.0 || cx_rate.hi > 1.0)
            throw std::invalid_argument("space: cx_rate must stay within [0, 1]");
    }

    // Empty string when hp lies inside the space, otherwise the name of the
    // first offending field.
    std::string out_of_bounds_field(const HyperparameterConfiguration& hp) const {
        if (hp.population_size < population_size.lo || hp.population_size > population_size.hi)
            return "population_size";
        if (hp.levels_back < levels_back.lo || hp.levels_back > levels_back.hi)
            return "levels_back";
        if (hp.mutation_rate < mutation_rate.lo || hp.mutation_rate > mutation_rate.hi)
            return "mutation_rate";
        if (hp.cx_rate < cx_rate.lo || hp.cx_rate > cx_rate.hi) return "cx_rate";
        if (hp.tournament_size < tournament_size.lo || hp.tournament_size > tournament_size.hi)
            return "tournament_size";
        if (hp.num_function_nodes < num_function_nodes.lo ||
            hp.num_function_nodes > num_function_nodes.hi)
            return "num_function_nodes";
        return {};
    }

    bool contains(const HyperparameterConfiguration& hp) const {
        return out_of_bounds_field(hp).empty();
    }
};

// Uniform sample honouring the conditional constraints without rejection:
// num_function_nodes is drawn first and levels_back is clamped to it, then
// population_size bounds tournament_size the same way. Draw order is fixed
// for replayability.
template <typename RngT>
HyperparameterConfiguration sample_configuration(const HyperparameterSpace& space, RngT& rng) {
    HyperparameterConfiguration hp;
    hp.num_function_nodes = rng.uniform_int(space.num_function_nodes.lo, space.num_function_nodes.hi);
    hp.levels_back =
        rng.uniform_int(space.levels_back.lo, std::min(space.levels_back.hi, hp.num_function_nodes));
    hp.population_size = rng.uniform_int(space.population_size.lo, space.population_size.hi);
    hp.tournament_size =
        rng.uniform_int(space.tournament_size.lo, std::min(space.tournament_size.hi, hp.population_size));
    hp.mutation_rate = rng.uniform_real(space.mutation_rate.lo, space.mutation_rate.hi);
    hp.cx_rate = rng.uniform_real(space.cx_rate.lo, space.cx_rate.hi);
    return hp;
}

struct TrialRecord {
    HyperparameterConfiguration configuration;
    double objective = 0.0;        // mean of per_fold
    std::vector<double> per_fold;
    std::uint64_t seed = 0;        // cv seed the fold runs derived from
    int trial_index = 0;
};

struct TuningResult {
    HyperparameterConfiguration incumbent;
    std::vector<TrialRecord> trials;
    std::string strategy;
};

enum class TuningStrategy { Random, ModelBased };

inline const char* to_string(TuningStrategy s) {
    return s == TuningStrategy::Random ? "random" : "model_based";
}

inline TuningStrategy tuning_strategy_from_string(const std::string& s) {
    if (s == "random") return TuningStrategy::Random;
    if (s == "model_based") return TuningStrategy::ModelBased;
    throw std::invalid_argument("unknown tuning strategy: " + s);
}

struct ObjectiveOutcome {
    double objective = 0.0;
    std::vector<double> per_fold;
};

using TuningObjective = std::function<ObjectiveOutcome(const HyperparameterConfiguration&)>;

namespace detail {

inline std::array<double, 6> normalize_configuration(const HyperparameterSpace& s,
                                                     const HyperparameterConfiguration& hp) {
    auto ni = [](int v, const IntRange& r) {
        return r.hi == r.lo ? 0.5 : static_cast<double>(v - r.lo) / (r.hi - r.lo);
    };
    auto nr = [](double v, const RealRange& r) { return r.hi == r.lo ? 0.5 : (v - r.lo) / (r.hi - r.lo); };
    return {ni(hp.population_size, s.population_size),
            ni(hp.levels_back, s.levels_back),
            nr(hp.mutation_rate, s.mutation_rate),
            nr(hp.cx_rate, s.cx_rate),
            ni(hp.tournament_size, s.tournament_size),
            ni(hp.num_function_nodes, s.num_function_nodes)};
}

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }
inline double normal_pdf(double z) {
    return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

// Sequential model-based proposal: inverse-distance-weighted surrogate over
// the normalised observations, expected improvement as the acquisition,
// maximised over a pool of 1000 random candidates. Non-finite objectives
// enter the surrogate at a finite penalty above the worst finite value.
template <typename RngT>
HyperparameterConfiguration propose_ei_candidate(const HyperparameterSpace& space,
                                                 const std::vector<std::array<double, 6>>& points,
                                                 const std::vector<double>& objectives,
                                                 RngT& rng) {
    constexpr int kPool = 1000;
    constexpr double kEps = 1e-12;

    double finite_min = std::numeric_limits<double>::infinity();
    double finite_max = -std::numeric_limits<double>::infinity();
    for (const double y : objectives) {
        if (std::isfinite(y)) {
            finite_min = std::min(finite_min, y);
            finite_max = std::max(finite_max, y);
        }
    }
    if (!std::isfinite(finite_min)) return sample_configuration(space, rng);
    const double penalty = finite_max + (finite_max - finite_min) + 1.0;
    std::vector<double> ys(objectives.size());
    for (std::size_t i = 0; i < objectives.size(); ++i)
        ys[i] = std::isfinite(objectives[i]) ? objectives[i] : penalty;
    const double best_y = finite_min;

    HyperparameterConfiguration best_candidate{};
    double best_ei = -1.0;
    for (int c = 0; c < kPool; ++c) {
        const HyperparameterConfiguration cand = sample_configuration(space, rng);
        const auto x = normalize_configuration(space, cand);

        double sw = 0.0, swy = 0.0;
        bool exact_hit = false;
        double exact_y = 0.0;
        for (std::size_t i = 0; i < points.size(); ++i) {
            double d2 = 0.0;
            for (int k = 0; k < 6; ++k) {
                const double dd = x[k] - points[i][k];
                d2 += dd * dd;
            }
            if (d2 < 1e-18) {
                exact_hit = true;
                exact_y = ys[i];
                break;
            }
            const double w = 1.0 / (d2 + kEps);
            sw += w;
            swy += w * ys[i];
        }

        double mu, sigma;
        if (exact_hit) {
            mu = exact_y;
            sigma = 0.0;
        } else {
            mu = swy / sw;
            double svar = 0.0;
            double sw2 = 0.0;
            for (std::size_t i = 0; i < points.size(); ++i) {
                double d2 = 0.0;
                for (int k = 0; k < 6; ++k) {
                    const double dd = x[k] - points[i][k];
                    d2 += dd * dd;
                }
                const double w = 1.0 / (d2 + kEps);
                sw2 += w;
                svar += w * (ys[i] - mu) * (ys[i] - mu);
            }
            sigma = std::sqrt(svar / sw2);
        }

        double ei;
        if (sigma > 0.0) {
            const double z = (best_y - mu) / sigma;
            ei = (best_y - mu) * normal_cdf(z) + sigma * normal_pdf(z);
        } else {
            ei = std::max(best_y - mu, 0.0);
        }
        if (ei > best_ei) {
            best_ei = ei;
            best_candidate = cand;
        }
    }
    return best_candidate;
}

} // namespace detail

// Runs exactly `trials` objective evaluations against a pluggable objective.
// Random search samples independently; the model-based strategy seeds with
// up to 10 random trials and then proposes expected-improvement candidates.
// The incumbent is the minimal objective, ties to the earliest trial.
inline TuningResult tune_with_objective(const HyperparameterSpace& space,
                                        const TuningObjective& objective, TuningStrategy strategy,
                                        int trials, std::uint64_t sampler_seed,
                                        std::uint64_t record_seed) {
    if (trials < 1) throw std::invalid_argument("tune: trials must be >= 1");
    space.validate();
    Rng rng(sampler_seed);

    TuningResult result;
    result.strategy = to_string(strategy);

    std::vector<std::array<double, 6>> points;
    std::vector<double> objectives;

    auto run_trial = [&](const HyperparameterConfiguration& hp, int index) {
        ObjectiveOutcome out = objective(hp);
        result.trials.push_back({hp, out.objective, std::move(out.per_fold), record_seed, index});
        points.push_back(detail::normalize_configuration(space, hp));
        objectives.push_back(result.trials.back().objective);
    };

    const int n_init = strategy == TuningStrategy::ModelBased ? std::min(10, trials) : trials;
    for (int t = 0; t < n_init; ++t) run_trial(sample_configuration(space, rng), t);
    if (strategy == TuningStrategy::ModelBased) {
        for (int t = n_init; t < trials; ++t)
            run_trial(detail::propose_ei_candidate(space, points, objectives, rng), t);
    }

    std::size_t best = 0;
    for (std::size_t i = 1; i < result.trials.size(); ++i)
        if (result.trials[i].objective < result.trials[best].objective) best = i;
    result.incumbent = result.trials[best].configuration;
    return result;
}

// Everything a cross-validated objective needs besides the configuration
// under test. The referenced dataset/split/folds must outlive the context.
struct CvContext {
    const Dataset* dataset = nullptr;
    const SplitSpec* split = nullptr;
    const FoldAssignment* folds = nullptr;
    CgpConfig cgp_base;
    CrossoverKind kind = CrossoverKind::None;
    bool restricted_reconnect = false;
    std::uint64_t budget = 50000;
};

// Mean validation MSE over the folds: each fold evolves on the remaining
// training rows with seed ^ fold and scores its best genome on the held-out
// fold. Non-finite fold results enter the mean as the worst sentinel.
inline ObjectiveOutcome cv_objective(const HyperparameterConfiguration& hp, const CvContext& ctx,
                                     std::uint64_t seed) {
    const auto& train = ctx.split->train_indices;
    const int k = ctx.folds->k;
    const CgpConfig cfg = apply_hyperparameters(ctx.cgp_base, hp);

    std::vector<double> per_fold(static_cast<std::size_t>(k));
    for (int f = 0; f < k; ++f) {
        std::vector<int> fit_rows, val_rows;
        for (std::size_t i = 0; i < train.size(); ++i)
            (ctx.folds->fold_of[i] == f ? val_rows : fit_rows).push_back(train[i]);
        const FitnessFn fit = fitness_on(fit_rows, *ctx.dataset, cfg);
        const EvolutionResult res = evolve(fit, hp, cfg, ctx.budget, ctx.kind,
                                           seed ^ static_cast<std::uint64_t>(f),
                                           ctx.restricted_reconnect);
        per_fold[f] = fitness_on(val_rows, *ctx.dataset, cfg)(res.best.genome);
    }
    double sum = 0.0;
    for (const double v : per_fold) sum += v;
    return {sum / static_cast<double>(k), per_fold};
}

inline TuningResult tune(const HyperparameterSpace& space, const CvContext& ctx,
                         TuningStrategy strategy, int trials, std::uint64_t tuning_seed,
                         std::uint64_t cv_seed) {
    const TuningObjective objective = [&ctx, cv_seed](const HyperparameterConfiguration& hp) {
        return cv_objective(hp, ctx, cv_seed);
    };
    return tune_with_objective(space, objective, strategy, trials, tuning_seed, cv_seed);
}

} // namespace cgpbench
