#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "cgpbench/cgp.hpp"
#include "cgpbench/evolution.hpp"
#include "cgpbench/rng.hpp"

namespace cgpbench {

struct IngestError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Tabular regression dataset: n rows of d features plus a real target.
struct Dataset {
    std::string name;
    std::vector<std::string> feature_names;
    std::vector<double> features; // row-major, n x d
    std::vector<double> targets;

    std::size_t n() const { return targets.size(); }
    std::size_t d() const { return feature_names.size(); }
    double feature(std::size_t row, std::size_t col) const { return features[row * d() + col]; }
};

namespace detail {

inline std::vector<std::string_view> split_fields(std::string_view line, char delim) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= line.size(); ++i) {
        if (i == line.size() || line[i] == delim) {
            out.push_back(line.substr(start, i - start));
            start = i + 1;
        }
    }
    return out;
}

inline double parse_cell(std::string_view cell, std::size_t row, const std::string& column) {
    double v = 0.0;
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    const auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc{} || res.ptr != last || !std::isfinite(v))
        throw IngestError("row " + std::to_string(row) + ", column '" + column +
                          "': cannot parse '" + std::string(cell) + "' as a finite real");
    return v;
}

} // namespace detail

// Reads a PMLB-style delimited text file: header row, tab or comma
// separated, one column named `target`; all other columns become features in
// header order. Non-finite or unparsable cells are rejected with their
// row/column named.
inline Dataset load_dataset(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IngestError("cannot open dataset file: " + path.string());

    auto next_line = [&in](std::string& line) {
        if (!std::getline(in, line)) return false;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        return true;
    };

    std::string line;
    if (!next_line(line) || line.empty()) throw IngestError("empty dataset file: " + path.string());

    const char delim = line.find('\t') != std::string::npos ? '\t' : ',';
    std::vector<std::string> header;
    for (const auto field : detail::split_fields(line, delim)) header.emplace_back(field);

    int target_col = -1;
    std::vector<std::string> names;
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (header[c] == "target") {
            if (target_col >= 0) throw IngestError("duplicate 'target' column in " + path.string());
            target_col = static_cast<int>(c);
        } else {
            names.push_back(header[c]);
        }
    }
    if (target_col < 0) throw IngestError("no 'target' column in " + path.string());
    if (names.empty()) throw IngestError("no feature columns in " + path.string());

    Dataset ds;
    ds.name = path.stem().string();
    ds.feature_names = std::move(names);

    std::size_t row = 0;
    while (next_line(line)) {
        if (line.empty()) continue;
        ++row;
        const auto fields = detail::split_fields(line, delim);
        if (fields.size() != header.size())
            throw IngestError("row " + std::to_string(row) + ": expected " +
                              std::to_string(header.size()) + " fields, got " +
                              std::to_string(fields.size()));
        for (std::size_t c = 0; c < fields.size(); ++c) {
            const double v = detail::parse_cell(fields[c], row, header[c]);
            if (static_cast<int>(c) == target_col)
                ds.targets.push_back(v);
            else
                ds.features.push_back(v);
        }
    }
    if (ds.targets.empty()) throw IngestError("no data rows in " + path.string());
    return ds;
}

inline int round_half_to_even(double x) {
    const double f = std::floor(x);
    const double frac = x - f;
    if (frac > 0.5) return static_cast<int>(f) + 1;
    if (frac < 0.5) return static_cast<int>(f);
    return (static_cast<long long>(f) % 2 == 0) ? static_cast<int>(f) : static_cast<int>(f) + 1;
}

// Disjoint train/test row index lists covering the whole dataset.
struct SplitSpec {
    std::vector<int> train_indices;
    std::vector<int> test_indices;
    std::uint64_t seed = 0;
    double train_fraction = 0.75;
};

// Seeded uniform shuffle, then prefix/suffix cut. |train| is
// round-half-to-even of train_fraction * n for platform-stable rounding.
inline SplitSpec split(const Dataset& ds, double train_fraction, std::uint64_t seed) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0))
        throw std::invalid_argument("split: train_fraction must be in (0, 1)");
    const int n = static_cast<int>(ds.n());
    const int train_n = round_half_to_even(train_fraction * n);
    if (train_n <= 0 || train_n >= n)
        throw std::invalid_argument("split: fraction leaves an empty side for n=" +
                                    std::to_string(n));
    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    Rng rng(seed);
    shuffle(idx, rng);
    SplitSpec s;
    s.seed = seed;
    s.train_fraction = train_fraction;
    s.train_indices.assign(idx.begin(), idx.begin() + train_n);
    s.test_indices.assign(idx.begin() + train_n, idx.end());
    return s;
}

// fold_of[i] is the fold label of the i-th entry of the index list the
// assignment was built from. Labels are dealt round-robin after a seeded
// shuffle, so fold sizes differ by at most one.
struct FoldAssignment {
    std::vector<int> fold_of;
    int k = 0;
    std::uint64_t seed = 0;
};

inline FoldAssignment kfold(const std::vector<int>& train, int k, std::uint64_t seed) {
    if (k < 2) throw std::invalid_argument("kfold: k must be >= 2");
    if (static_cast<int>(train.size()) < k)
        throw std::invalid_argument("kfold: k exceeds the number of rows");
    const std::size_t m = train.size();
    std::vector<int> order(m);
    std::iota(order.begin(), order.end(), 0);
    Rng rng(seed);
    shuffle(order, rng);
    FoldAssignment fa;
    fa.k = k;
    fa.seed = seed;
    fa.fold_of.resize(m);
    for (std::size_t j = 0; j < m; ++j) fa.fold_of[order[j]] = static_cast<int>(j % k);
    return fa;
}

// Mean squared error; any non-finite prediction yields the worst-fitness
// sentinel instead of poisoning the mean.
inline double mse(std::span<const double> predictions, std::span<const double> targets) {
    if (predictions.size() != targets.size() || predictions.empty())
        throw std::invalid_argument("mse: prediction/target length mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        if (!std::isfinite(predictions[i])) return kWorstFitness;
        const double d = predictions[i] - targets[i];
        acc += d * d;
    }
    return acc / static_cast<double>(predictions.size());
}

// MSE fitness over the selected rows. The config may declare one input more
// than the dataset has features; that extra input is a constant 1.0
// terminal. Pure function of (genome, rows, dataset), safe to call from any
// number of threads.
inline FitnessFn fitness_on(std::vector<int> rows, const Dataset& ds, const CgpConfig& cfg) {
    if (rows.empty()) throw std::invalid_argument("fitness_on: empty row set");
    if (cfg.num_outputs != 1)
        throw std::invalid_argument("fitness_on: symbolic regression needs exactly one output");
    const int d = static_cast<int>(ds.d());
    if (cfg.num_inputs != d && cfg.num_inputs != d + 1)
        throw std::invalid_argument("fitness_on: config expects " +
                                    std::to_string(cfg.num_inputs) + " inputs but dataset has " +
                                    std::to_string(d) + " features");
    for (const int r : rows)
        if (r < 0 || static_cast<std::size_t>(r) >= ds.n())
            throw std::invalid_argument("fitness_on: row index out of range");
    const bool constant_input = cfg.num_inputs == d + 1;

    return [rows = std::move(rows), &ds, cfg, d, constant_input](const Genome& g) -> double {
        PhenotypeEvaluator eval(g, cfg);
        std::vector<double> inputs(static_cast<std::size_t>(cfg.num_inputs));
        if (constant_input) inputs[d] = 1.0;
        double out = 0.0;
        double acc = 0.0;
        for (const int r : rows) {
            for (int c = 0; c < d; ++c) inputs[c] = ds.feature(r, c);
            eval(inputs, std::span<double>(&out, 1));
            if (!std::isfinite(out)) return kWorstFitness;
            const double diff = out - ds.targets[r];
            acc += diff * diff;
        }
        return acc / static_cast<double>(rows.size());
    };
}

} // namespace cgpbench
