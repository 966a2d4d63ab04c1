#pragma once

#include <cstdint>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <utility>
#include <vector>

#include "cgpbench/cgp.hpp"
#include "cgpbench/operators.hpp"

namespace cgpbench {

// The six tuned hyperparameters. Baseline values follow the established
// recombination-CGP configuration (population 50, levels-back 100, mutation
// 0.1, crossover 0.7, tournament 4, 100 function nodes).
struct HyperparameterConfiguration {
    int population_size = 50;
    int levels_back = 100;
    double mutation_rate = 0.1;
    double cx_rate = 0.7;
    int tournament_size = 4;
    int num_function_nodes = 100;

    friend bool operator==(const HyperparameterConfiguration&,
                           const HyperparameterConfiguration&) = default;

    void validate() const {
        if (population_size < 2)
            throw std::invalid_argument("hyperparameters: population_size must be >= 2");
        if (tournament_size < 1 || tournament_size > population_size)
            throw std::invalid_argument(
                "hyperparameters: tournament_size must be in [1, population_size]");
        if (mutation_rate < 0.0 || mutation_rate > 1.0)
            throw std::invalid_argument("hyperparameters: mutation_rate must be in [0, 1]");
        if (cx_rate < 0.0 || cx_rate > 1.0)
            throw std::invalid_argument("hyperparameters: cx_rate must be in [0, 1]");
        if (num_function_nodes < 1)
            throw std::invalid_argument("hyperparameters: num_function_nodes must be >= 1");
        if (levels_back < 1 || levels_back > num_function_nodes)
            throw std::invalid_argument(
                "hyperparameters: levels_back must be in [1, num_function_nodes]");
    }
};

inline CgpConfig apply_hyperparameters(CgpConfig base, const HyperparameterConfiguration& hp) {
    base.levels_back = hp.levels_back;
    base.num_function_nodes = hp.num_function_nodes;
    return base;
}

struct Individual {
    Genome genome;
    double fitness = kWorstFitness; // cached MSE on the training rows
};

struct EvolutionResult {
    Individual best;
    std::vector<double> history; // per-generation best fitness, non-increasing
    std::uint64_t evaluations_used = 0;
    std::uint64_t seed = 0;
};

using FitnessFn = std::function<double(const Genome&)>;

// Draws k distinct individuals uniformly and returns the index of the one
// with the lowest fitness; ties go to the earliest population index.
template <typename RngT>
std::size_t tournament_select(const std::vector<Individual>& population, int k, RngT& rng) {
    const std::size_t n = population.size();
    if (n == 0 || k < 1 || static_cast<std::size_t>(k) > n)
        throw std::invalid_argument("tournament_select: need 1 <= k <= population size");
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::size_t winner = n;
    for (int j = 0; j < k; ++j) {
        const std::size_t pick = j + static_cast<std::size_t>(rng.below(n - j));
        std::swap(idx[j], idx[pick]);
        const std::size_t cand = idx[j];
        if (winner == n || population[cand].fitness < population[winner].fitness ||
            (population[cand].fitness == population[winner].fitness && cand < winner))
            winner = cand;
    }
    return winner;
}

namespace detail {
inline std::size_t best_index(const std::vector<Individual>& pop) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < pop.size(); ++i)
        if (pop[i].fitness < pop[best].fitness) best = i;
    return best;
}
} // namespace detail

// Generational evolutionary algorithm with tournament selection and single
// elitism. Every non-elite offspring passes through point mutation; with
// probability cx_rate the offspring come from crossover (two for discrete
// recombination, one for subgraph), otherwise a tournament winner is cloned.
// The crossover coin is drawn even when kind == None so that mutation-only
// runs replay the same stream as cx_rate = 0 runs. Stops when the next
// generation would exceed the evaluation budget.
inline EvolutionResult evolve(const FitnessFn& fitness, const HyperparameterConfiguration& hp,
                              const CgpConfig& cgp_base, std::uint64_t budget, CrossoverKind kind,
                              std::uint64_t seed, bool restricted_reconnect = false) {
    hp.validate();
    const CgpConfig cfg = apply_hyperparameters(cgp_base, hp);
    cfg.validate();
    const std::size_t pop_size = static_cast<std::size_t>(hp.population_size);
    if (budget < pop_size)
        throw std::invalid_argument("evolve: budget must cover the initial population");

    Rng rng(seed);

    std::vector<Individual> pop;
    pop.reserve(pop_size);
    for (std::size_t i = 0; i < pop_size; ++i) {
        Genome g = random_genome(cfg, rng);
        const double f = fitness(g);
        pop.push_back({std::move(g), f});
    }
    std::uint64_t evals = pop_size;

    EvolutionResult result;
    result.seed = seed;
    std::size_t bi = detail::best_index(pop);
    result.best = pop[bi];
    result.history.push_back(pop[bi].fitness);

    while (evals + (pop_size - 1) <= budget) {
        std::vector<Individual> next;
        next.reserve(pop_size);
        next.push_back(pop[detail::best_index(pop)]); // elite keeps its cached fitness

        while (next.size() < pop_size) {
            const bool use_cx = rng.bernoulli(hp.cx_rate) && kind != CrossoverKind::None;
            std::vector<Genome> batch;
            if (use_cx) {
                const std::size_t pa = tournament_select(pop, hp.tournament_size, rng);
                const std::size_t pb = tournament_select(pop, hp.tournament_size, rng);
                try {
                    if (kind == CrossoverKind::Subgraph) {
                        batch = std::move(subgraph_crossover(pop[pa].genome, pop[pb].genome, cfg,
                                                             rng, restricted_reconnect)
                                              .offspring);
                    } else {
                        batch = std::move(
                            discrete_recombination(pop[pa].genome, pop[pb].genome, cfg, rng)
                                .offspring);
                    }
                } catch (const NoActiveNodesError&) {
                    batch.push_back(pop[pa].genome);
                    if (kind == CrossoverKind::Discrete) batch.push_back(pop[pb].genome);
                }
            } else {
                batch.push_back(pop[tournament_select(pop, hp.tournament_size, rng)].genome);
            }
            for (Genome& child : batch) {
                // A surplus second offspring is still mutated before being
                // discarded so the rng stream does not depend on slot count.
                Genome mutated = point_mutation(child, cfg, hp.mutation_rate, rng);
                if (next.size() < pop_size) {
                    const double f = fitness(mutated);
                    ++evals;
                    next.push_back({std::move(mutated), f});
                }
            }
        }

        pop = std::move(next);
        bi = detail::best_index(pop);
        result.history.push_back(pop[bi].fitness);
        if (pop[bi].fitness < result.best.fitness) result.best = pop[bi];
    }

    result.evaluations_used = evals;
    return result;
}

} // namespace cgpbench
