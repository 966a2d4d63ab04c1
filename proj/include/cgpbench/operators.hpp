#pragma once

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "cgpbench/cgp.hpp"

namespace cgpbench {

enum class CrossoverKind { Subgraph, Discrete, None };

inline const char* to_string(CrossoverKind k) {
    switch (k) {
        case CrossoverKind::Subgraph: return "subgraph";
        case CrossoverKind::Discrete: return "discrete";
        case CrossoverKind::None: return "none";
    }
    return "none";
}

inline CrossoverKind crossover_kind_from_string(const std::string& s) {
    if (s == "subgraph") return CrossoverKind::Subgraph;
    if (s == "discrete") return CrossoverKind::Discrete;
    if (s == "none") return CrossoverKind::None;
    throw std::invalid_argument("unknown crossover kind: " + s);
}

// Raised when a crossover parent has no active function node (all outputs
// wired straight to inputs). The evolution loop falls back to mutate-clone
// for such pairings.
struct NoActiveNodesError : std::runtime_error {
    NoActiveNodesError() : std::runtime_error("crossover parent has no active function nodes") {}
};

struct CrossoverOutcome {
    std::vector<Genome> offspring;                    // 1 genome (subgraph), 2 (discrete)
    std::optional<int> crossover_point;               // subgraph: the shared point C_P
    std::vector<std::pair<int, int>> swap_trace;      // discrete: swapped block start positions
};

// Each gene is independently resampled with probability `rate`, uniformly
// within its legal range; a resample may land on the current value.
// `resample_events` (optional) counts resamples, not value changes.
template <typename RngT>
Genome point_mutation(const Genome& g, const CgpConfig& cfg, double rate, RngT& rng,
                      int* resample_events = nullptr) {
    Genome out = g;
    int events = 0;
    for (int node = cfg.num_inputs; node < cfg.total_nodes(); ++node) {
        const int base = node_position(node, cfg);
        if (rng.bernoulli(rate)) {
            out.genes[base] = static_cast<int>(rng.below(cfg.functions.size()));
            ++events;
        }
        for (int a = 1; a <= cfg.max_arity; ++a) {
            if (rng.bernoulli(rate)) {
                out.genes[base + a] = sample_connection_gene(cfg, node, rng);
                ++events;
            }
        }
    }
    for (int o = 0; o < cfg.num_outputs; ++o) {
        if (rng.bernoulli(rate)) {
            out.genes[cfg.first_output_gene() + o] = sample_output_gene(cfg, rng);
            ++events;
        }
    }
    if (resample_events) *resample_events = events;
    return out;
}

// Resamples, in ascending gene order, every connection gene that violates
// its levels-back window or references its own node or a later one.
template <typename RngT>
void repair_connections(Genome& g, const CgpConfig& cfg, RngT& rng) {
    for (int node = cfg.num_inputs; node < cfg.total_nodes(); ++node) {
        const int base = node_position(node, cfg);
        for (int a = 1; a <= cfg.max_arity; ++a) {
            int& gene = g.genes[base + a];
            if (!cfg.connection_legal(node, gene)) gene = sample_connection_gene(cfg, node, rng);
        }
    }
}

// Subgraph crossover. One crossover point is drawn from each parent's active
// nodes and the smaller of the two becomes the shared cut C_P: blocks of
// nodes <= C_P come from parent1, everything after (including output genes)
// from parent2. Connectivity behind the cut is then repaired by
// neighbourhood connect (single-output case) and random active connect.
// With `restricted_reconnect`, random active connect resamples only
// connection genes that are illegal in the offspring instead of all of them.
template <typename RngT>
CrossoverOutcome subgraph_crossover(const Genome& p1, const Genome& p2, const CgpConfig& cfg,
                                    RngT& rng, bool restricted_reconnect = false) {
    const std::vector<int> m1 = decode_active_nodes(p1, cfg);
    const std::vector<int> m2 = decode_active_nodes(p2, cfg);
    if (m1.empty() || m2.empty()) throw NoActiveNodesError();

    const int cp1 = m1[rng.below(m1.size())];
    const int cp2 = m2[rng.below(m2.size())];
    const int cp = std::min(cp1, cp2);

    Genome child;
    child.genes.resize(cfg.genome_length());
    const int cut = node_position(cp, cfg) + cfg.genes_per_node(); // first gene from parent2
    std::copy(p1.genes.begin(), p1.genes.begin() + cut, child.genes.begin());
    std::copy(p2.genes.begin() + cut, p2.genes.end(), child.genes.begin() + cut);

    // Neighbourhood connect: wire the first connection gene of the first
    // active node behind C_P to the last active node at or before C_P.
    // Activity comes from the parents' lists (m1 in front, m2 behind), not
    // from a re-decode of the half-built child. No-op when either side has
    // no active node on its side of the cut.
    if (cfg.num_outputs == 1) {
        const auto behind = std::upper_bound(m2.begin(), m2.end(), cp);
        const auto front = std::upper_bound(m1.begin(), m1.end(), cp);
        if (behind != m2.end() && front != m1.begin()) {
            child.genes[node_position(*behind, cfg) + 1] = *(front - 1);
        }
    }

    // Random active connect over the part copied from parent2.
    for (int node = cp + 1; node < cfg.total_nodes(); ++node) {
        const int base = node_position(node, cfg);
        for (int a = 1; a <= cfg.max_arity; ++a) {
            int& gene = child.genes[base + a];
            if (!restricted_reconnect || !cfg.connection_legal(node, gene))
                gene = sample_connection_gene(cfg, node, rng);
        }
    }

    if (cfg.num_outputs > 1) {
        for (int o = 0; o < cfg.num_outputs; ++o)
            child.genes[cfg.first_output_gene() + o] = sample_output_gene(cfg, rng);
    }

    CrossoverOutcome out;
    out.offspring.push_back(std::move(child));
    out.crossover_point = cp;
    return out;
}

// Discrete phenotypic recombination. Walks the positionally paired active
// nodes of the two parents and swaps full gene blocks on a fair coin. At the
// final index, when the parents have unequal active-node counts, boundary
// extension draws the longer parent's contribution from the remainder of its
// active list: r uniform in [0, max - i), node index i + r. Swapped-in
// connection genes that became illegal at their new position are repaired by
// uniform resampling afterwards.
template <typename RngT>
CrossoverOutcome discrete_recombination(const Genome& p1, const Genome& p2, const CgpConfig& cfg,
                                        RngT& rng) {
    const std::vector<int> m1 = decode_active_nodes(p1, cfg);
    const std::vector<int> m2 = decode_active_nodes(p2, cfg);
    if (m1.empty() || m2.empty()) throw NoActiveNodesError();

    const std::size_t min_count = std::min(m1.size(), m2.size());
    const std::size_t max_count = std::max(m1.size(), m2.size());

    CrossoverOutcome out;
    out.offspring = {p1, p2};
    Genome& c1 = out.offspring[0];
    Genome& c2 = out.offspring[1];

    const int block = cfg.genes_per_node();
    for (std::size_t i = 0; i < min_count; ++i) {
        if (!rng.coin()) continue;
        int n1, n2;
        if (i + 1 == min_count && m1.size() != m2.size()) {
            const std::size_t r = static_cast<std::size_t>(rng.below(max_count - i));
            if (m1.size() < m2.size()) {
                n1 = m1[i];
                n2 = m2[i + r];
            } else {
                n1 = m1[i + r];
                n2 = m2[i];
            }
        } else {
            n1 = m1[i];
            n2 = m2[i];
        }
        const int pos1 = node_position(n1, cfg);
        const int pos2 = node_position(n2, cfg);
        for (int k = 0; k < block; ++k) std::swap(c1.genes[pos1 + k], c2.genes[pos2 + k]);
        out.swap_trace.emplace_back(pos1, pos2);
    }

    repair_connections(c1, cfg, rng);
    repair_connections(c2, cfg, rng);
    return out;
}

} // namespace cgpbench
