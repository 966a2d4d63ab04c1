#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numbers>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace cgpbench {

// Median and quartiles by linear interpolation on the sorted sample at
// positions (n-1) * {0.25, 0.5, 0.75}.
struct SampleSummary {
    double median = 0.0;
    double q1 = 0.0;
    double q3 = 0.0;
    std::size_t n = 0;
    std::vector<double> values; // sorted ascending
};

inline double quantile_sorted(std::span<const double> sorted, double q) {
    const double pos = static_cast<double>(sorted.size() - 1) * q;
    const std::size_t i = static_cast<std::size_t>(pos);
    const double frac = pos - static_cast<double>(i);
    if (frac == 0.0 || i + 1 == sorted.size()) return sorted[i];
    return sorted[i] + frac * (sorted[i + 1] - sorted[i]);
}

inline SampleSummary summarise(std::vector<double> values) {
    if (values.empty()) throw std::invalid_argument("summarise: empty sample");
    std::sort(values.begin(), values.end());
    SampleSummary s;
    s.n = values.size();
    s.q1 = quantile_sorted(values, 0.25);
    s.median = quantile_sorted(values, 0.5);
    s.q3 = quantile_sorted(values, 0.75);
    s.values = std::move(values);
    return s;
}

// Two-sided Mann-Whitney U test. Exact p by enumeration when the pooled
// sample is small and tie-free, otherwise normal approximation with
// tie-corrected variance and continuity correction.
struct MannWhitneyResult {
    double u = 0.0;
    double p_two_sided = 1.0;
    bool exact = false;
};

inline constexpr std::size_t kExactEnumerationLimit = 16;

// U statistic of the first sample from midranked rank sums.
inline double mann_whitney_u_statistic(std::span<const double> a, std::span<const double> b) {
    struct Entry {
        double v;
        int group;
    };
    std::vector<Entry> pooled;
    pooled.reserve(a.size() + b.size());
    for (const double v : a) pooled.push_back({v, 0});
    for (const double v : b) pooled.push_back({v, 1});
    std::sort(pooled.begin(), pooled.end(), [](const Entry& x, const Entry& y) { return x.v < y.v; });

    double rank_sum_a = 0.0;
    std::size_t i = 0;
    while (i < pooled.size()) {
        std::size_t j = i;
        while (j < pooled.size() && pooled[j].v == pooled[i].v) ++j;
        const double midrank = static_cast<double>(i + 1 + j) / 2.0; // mean of ranks i+1..j
        for (std::size_t k = i; k < j; ++k)
            if (pooled[k].group == 0) rank_sum_a += midrank;
        i = j;
    }
    const double n1 = static_cast<double>(a.size());
    return rank_sum_a - n1 * (n1 + 1.0) / 2.0;
}

namespace detail {
// counts[u] = number of rank subsets of size n1 (out of n1+n2, no ties)
// whose U statistic equals u; recurrence f(i,j,u) = f(i-1,j,u-j) + f(i,j-1,u).
inline std::vector<double> mann_whitney_u_counts(int n1, int n2) {
    const int umax = n1 * n2;
    std::vector<std::vector<std::vector<double>>> f(
        n1 + 1, std::vector<std::vector<double>>(n2 + 1, std::vector<double>(umax + 1, 0.0)));
    for (int j = 0; j <= n2; ++j) f[0][j][0] = 1.0;
    for (int i = 1; i <= n1; ++i) {
        for (int j = 0; j <= n2; ++j) {
            const int cap = i * j;
            for (int u = 0; u <= cap; ++u) {
                double total = 0.0;
                if (u >= j) total += f[i - 1][j][u - j];
                if (j >= 1) total += f[i][j - 1][u];
                f[i][j][u] = total;
            }
        }
    }
    return f[n1][n2];
}
} // namespace detail

// Exact two-sided p for a tie-free sample: the probability mass of U values
// at least as far from n1*n2/2 as the observed one.
inline double mann_whitney_exact_p(double u, int n1, int n2) {
    const int umax = n1 * n2;
    const auto counts = detail::mann_whitney_u_counts(n1, n2);
    const long long d_obs = std::llround(std::abs(2.0 * u - umax));
    double extreme = 0.0, total = 0.0;
    for (int v = 0; v <= umax; ++v) {
        total += counts[v];
        if (std::llabs(2LL * v - umax) >= d_obs) extreme += counts[v];
    }
    double p = extreme / total;
    if (p > 1.0) p = 1.0;
    if (p <= 0.0) p = std::numeric_limits<double>::min();
    return p;
}

// Normal approximation with tie-corrected variance and continuity
// correction. `tie_sizes` holds the sizes of tied groups in the pooled
// sample; groups of size one may be omitted.
inline double mann_whitney_normal_p(double u, std::size_t n1, std::size_t n2,
                                    const std::vector<std::size_t>& tie_sizes) {
    const double n = static_cast<double>(n1 + n2);
    const double mu = static_cast<double>(n1) * static_cast<double>(n2) / 2.0;
    double tie_term = 0.0;
    for (const std::size_t t : tie_sizes) {
        const double td = static_cast<double>(t);
        tie_term += td * td * td - td;
    }
    const double var = static_cast<double>(n1) * static_cast<double>(n2) / 12.0 *
                       ((n + 1.0) - tie_term / (n * (n - 1.0)));
    if (var <= 0.0) return 1.0; // every pooled value identical
    double z = (std::abs(u - mu) - 0.5) / std::sqrt(var);
    if (z < 0.0) z = 0.0;
    double p = std::erfc(z / std::numbers::sqrt2);
    if (p > 1.0) p = 1.0;
    if (p <= 0.0) p = std::numeric_limits<double>::min();
    return p;
}

inline MannWhitneyResult mann_whitney_u(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("mann_whitney_u: empty sample");
    const double u = mann_whitney_u_statistic(a, b);

    std::vector<double> pooled;
    pooled.reserve(a.size() + b.size());
    pooled.insert(pooled.end(), a.begin(), a.end());
    pooled.insert(pooled.end(), b.begin(), b.end());
    std::sort(pooled.begin(), pooled.end());
    std::vector<std::size_t> tie_sizes;
    bool ties = false;
    std::size_t i = 0;
    while (i < pooled.size()) {
        std::size_t j = i;
        while (j < pooled.size() && pooled[j] == pooled[i]) ++j;
        if (j - i > 1) {
            ties = true;
            tie_sizes.push_back(j - i);
        }
        i = j;
    }

    if (!ties && a.size() + b.size() <= kExactEnumerationLimit)
        return {u, mann_whitney_exact_p(u, static_cast<int>(a.size()), static_cast<int>(b.size())),
                true};
    return {u, mann_whitney_normal_p(u, a.size(), b.size(), tie_sizes), false};
}

// One row of the comparison table: the group with the best (lowest) median,
// plus every group whose two-sided p against it clears the significance
// level.
struct ComparisonVerdict {
    std::string best_group;
    std::set<std::string> tied_with_best;
    std::map<std::pair<std::string, std::string>, double> p_values;
};

inline ComparisonVerdict compare_groups(const std::map<std::string, std::vector<double>>& groups,
                                        double alpha) {
    if (groups.size() < 2) throw std::invalid_argument("compare_groups: need at least two groups");
    for (const auto& [name, values] : groups)
        if (values.empty())
            throw std::invalid_argument("compare_groups: group '" + name + "' is empty");

    std::string best;
    double best_median = 0.0;
    for (const auto& [name, values] : groups) {
        const double m = summarise(values).median;
        if (best.empty() || m < best_median) { // ties keep the earlier identifier
            best = name;
            best_median = m;
        }
    }

    ComparisonVerdict v;
    v.best_group = best;
    v.tied_with_best.insert(best);
    const auto& best_values = groups.at(best);
    for (const auto& [name, values] : groups) {
        if (name == best) continue;
        const double p = mann_whitney_u(best_values, values).p_two_sided;
        v.p_values[{best, name}] = p;
        v.p_values[{name, best}] = p;
        if (p >= alpha) v.tied_with_best.insert(name);
    }
    return v;
}

} // namespace cgpbench
