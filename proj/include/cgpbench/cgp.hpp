#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "cgpbench/function_set.hpp"
#include "cgpbench/rng.hpp"

namespace cgpbench {

// Fitness sentinel: non-finite evaluation results never abort a run, they
// rank as the worst possible fitness. Reports store 1e300 in place of the
// infinity so JSON stays portable while preserving the ordering.
inline constexpr double kWorstFitness = std::numeric_limits<double>::infinity();
inline constexpr double kWorstFitnessSerialized = 1e300;

inline double serialize_fitness(double f) {
    return std::isfinite(f) ? f : kWorstFitnessSerialized;
}

// Structural parameters of a single-row CGP graph. Global node numbering:
// inputs occupy 0..num_inputs-1, function nodes follow as
// num_inputs..num_inputs+num_function_nodes-1.
struct CgpConfig {
    int num_inputs = 1;
    int num_outputs = 1;
    int num_function_nodes = 1;
    int max_arity = 2;
    int levels_back = 1; // in nodes; program inputs are always reachable
    FunctionSet functions = default_function_set();

    int genes_per_node() const { return 1 + max_arity; }
    int total_nodes() const { return num_inputs + num_function_nodes; }
    int genome_length() const { return num_function_nodes * genes_per_node() + num_outputs; }
    int first_output_gene() const { return num_function_nodes * genes_per_node(); }

    // Lowest function node inside `node`'s levels-back window.
    int window_lo(int node) const { return std::max(num_inputs, node - levels_back); }

    // Count of legal connection sources for `node`: all inputs plus the
    // function nodes in [window_lo(node), node).
    int num_sources(int node) const { return num_inputs + (node - window_lo(node)); }

    bool connection_legal(int node, int value) const {
        return (value >= 0 && value < num_inputs) ||
               (value >= window_lo(node) && value < node);
    }

    void validate() const {
        if (num_inputs < 1) throw std::invalid_argument("CgpConfig: num_inputs must be >= 1");
        if (num_outputs < 1) throw std::invalid_argument("CgpConfig: num_outputs must be >= 1");
        if (num_function_nodes < 1)
            throw std::invalid_argument("CgpConfig: num_function_nodes must be >= 1");
        if (max_arity < 1) throw std::invalid_argument("CgpConfig: max_arity must be >= 1");
        if (levels_back < 1 || levels_back > num_function_nodes)
            throw std::invalid_argument("CgpConfig: levels_back must be in [1, num_function_nodes]");
        if (functions.empty()) throw std::invalid_argument("CgpConfig: empty function set");
        for (std::size_t i = 0; i < functions.size(); ++i) {
            if (functions[i].arity < 1 || functions[i].arity > max_arity)
                throw std::invalid_argument("CgpConfig: function '" + functions[i].name +
                                            "' arity outside [1, max_arity]");
        }
    }
};

// Flat integer genome: per function node a block of
// [function gene, max_arity connection genes], then num_outputs output genes.
struct Genome {
    std::vector<int> genes;
    friend bool operator==(const Genome&, const Genome&) = default;
};

// Gene index where `node_number`'s block starts. Input nodes have no genes.
inline int node_position(int node_number, const CgpConfig& cfg) {
    if (node_number < cfg.num_inputs || node_number >= cfg.total_nodes())
        throw std::invalid_argument("node_position: node " + std::to_string(node_number) +
                                    " is not a function node");
    return (node_number - cfg.num_inputs) * cfg.genes_per_node();
}

enum class ViolationKind { LengthMismatch, FunctionIndex, ConnectionTarget, OutputTarget };

struct Violation {
    ViolationKind kind;
    int gene_index; // -1 for length mismatch
    std::string message;
};

struct ValidationResult {
    std::vector<Violation> violations;
    bool ok() const { return violations.empty(); }
};

inline ValidationResult validate_genome(const Genome& g, const CgpConfig& cfg) {
    ValidationResult r;
    const int expected = cfg.genome_length();
    if (static_cast<int>(g.genes.size()) != expected) {
        r.violations.push_back({ViolationKind::LengthMismatch, -1,
                                "genome length " + std::to_string(g.genes.size()) +
                                    ", expected " + std::to_string(expected)});
        return r;
    }
    for (int node = cfg.num_inputs; node < cfg.total_nodes(); ++node) {
        const int base = node_position(node, cfg);
        const int f = g.genes[base];
        if (f < 0 || f >= static_cast<int>(cfg.functions.size())) {
            r.violations.push_back({ViolationKind::FunctionIndex, base,
                                    "gene " + std::to_string(base) + ": function index " +
                                        std::to_string(f) + " outside [0, " +
                                        std::to_string(cfg.functions.size()) + ")"});
        }
        for (int a = 1; a <= cfg.max_arity; ++a) {
            const int v = g.genes[base + a];
            if (!cfg.connection_legal(node, v)) {
                r.violations.push_back(
                    {ViolationKind::ConnectionTarget, base + a,
                     "gene " + std::to_string(base + a) + ": connection of node " +
                         std::to_string(node) + " references " + std::to_string(v) +
                         ", legal sources are inputs [0, " + std::to_string(cfg.num_inputs) +
                         ") and nodes [" + std::to_string(cfg.window_lo(node)) + ", " +
                         std::to_string(node) + ")"});
            }
        }
    }
    for (int o = 0; o < cfg.num_outputs; ++o) {
        const int idx = cfg.first_output_gene() + o;
        const int v = g.genes[idx];
        if (v < 0 || v >= cfg.total_nodes()) {
            r.violations.push_back({ViolationKind::OutputTarget, idx,
                                    "gene " + std::to_string(idx) + ": output references " +
                                        std::to_string(v) + ", legal range [0, " +
                                        std::to_string(cfg.total_nodes()) + ")"});
        }
    }
    return r;
}

// Uniform draw from the legal connection sources of `node`.
template <typename RngT>
int sample_connection_gene(const CgpConfig& cfg, int node, RngT& rng) {
    const int lo = cfg.window_lo(node);
    const int k = static_cast<int>(rng.below(static_cast<std::uint64_t>(cfg.num_sources(node))));
    return k < cfg.num_inputs ? k : lo + (k - cfg.num_inputs);
}

template <typename RngT>
int sample_output_gene(const CgpConfig& cfg, RngT& rng) {
    return static_cast<int>(rng.below(static_cast<std::uint64_t>(cfg.total_nodes())));
}

template <typename RngT>
Genome random_genome(const CgpConfig& cfg, RngT& rng) {
    Genome g;
    g.genes.resize(cfg.genome_length());
    int i = 0;
    for (int node = cfg.num_inputs; node < cfg.total_nodes(); ++node) {
        g.genes[i++] = static_cast<int>(rng.below(cfg.functions.size()));
        for (int a = 0; a < cfg.max_arity; ++a) g.genes[i++] = sample_connection_gene(cfg, node, rng);
    }
    for (int o = 0; o < cfg.num_outputs; ++o) g.genes[i++] = sample_output_gene(cfg, rng);
    return g;
}

// Backward decoding: function nodes reachable from the output genes by
// following the connection genes a node's function actually consumes.
// Returned list is strictly ascending; inputs never appear.
inline std::vector<int> decode_active_nodes(const Genome& g, const CgpConfig& cfg) {
    std::vector<char> active(static_cast<std::size_t>(cfg.total_nodes()), 0);
    std::vector<int> stack;
    for (int o = 0; o < cfg.num_outputs; ++o) {
        const int t = g.genes[cfg.first_output_gene() + o];
        if (t >= cfg.num_inputs && !active[t]) {
            active[t] = 1;
            stack.push_back(t);
        }
    }
    while (!stack.empty()) {
        const int node = stack.back();
        stack.pop_back();
        const int base = node_position(node, cfg);
        const int arity = cfg.functions[g.genes[base]].arity;
        for (int a = 1; a <= arity; ++a) {
            const int src = g.genes[base + a];
            if (src >= cfg.num_inputs && !active[src]) {
                active[src] = 1;
                stack.push_back(src);
            }
        }
    }
    std::vector<int> result;
    for (int n = cfg.num_inputs; n < cfg.total_nodes(); ++n)
        if (active[n]) result.push_back(n);
    return result;
}

// Decode-once evaluator for repeated evaluation of one genome. Holds scratch
// buffers, so use one instance per thread; the evaluation itself is a pure
// function of (genome, inputs).
class PhenotypeEvaluator {
public:
    PhenotypeEvaluator(const Genome& genome, const CgpConfig& cfg)
        : genome_(&genome),
          cfg_(&cfg),
          active_(decode_active_nodes(genome, cfg)),
          values_(static_cast<std::size_t>(cfg.total_nodes())),
          args_(static_cast<std::size_t>(cfg.max_arity)) {}

    const std::vector<int>& active() const { return active_; }

    void operator()(std::span<const double> inputs, std::span<double> outputs) {
        const CgpConfig& cfg = *cfg_;
        const std::vector<int>& genes = genome_->genes;
        std::copy(inputs.begin(), inputs.end(), values_.begin());
        for (const int node : active_) {
            const int base = node_position(node, cfg);
            const FunctionSemantics& fn = cfg.functions[genes[base]];
            for (int a = 0; a < fn.arity; ++a) args_[a] = values_[genes[base + 1 + a]];
            values_[node] = fn.apply(std::span<const double>(args_.data(), fn.arity));
        }
        for (int o = 0; o < cfg.num_outputs; ++o)
            outputs[o] = values_[genes[cfg.first_output_gene() + o]];
    }

private:
    const Genome* genome_;
    const CgpConfig* cfg_;
    std::vector<int> active_;
    std::vector<double> values_;
    std::vector<double> args_;
};

// Evaluates the phenotype on one input vector. Only active nodes are
// computed, in ascending node order; non-finite intermediates propagate to
// the outputs and are mapped to worst fitness by the caller.
inline std::vector<double> evaluate(const Genome& g, const CgpConfig& cfg,
                                    std::span<const double> inputs) {
    if (static_cast<int>(inputs.size()) != cfg.num_inputs)
        throw std::invalid_argument("evaluate: expected " + std::to_string(cfg.num_inputs) +
                                    " inputs, got " + std::to_string(inputs.size()));
    PhenotypeEvaluator eval(g, cfg);
    std::vector<double> out(static_cast<std::size_t>(cfg.num_outputs));
    eval(inputs, out);
    return out;
}

} // namespace cgpbench
