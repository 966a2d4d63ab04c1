#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cgpbench/rng.hpp"
#include "cgpbench/stats.hpp"

using namespace cgpbench;

namespace {

// Brute-force two-sided p: enumerate every C(n1+n2, n1) assignment of the
// pooled values to the first group, compute U by direct pair counting and
// count the arrangements at least as far from n1*n2/2 as the observed one.
// Independent of the rank-sum statistic and the DP enumeration in stats.hpp.
struct PermutationOracle {
    long long u2_observed = 0; // 2*U to stay in integers
    long long extreme = 0;
    long long total = 0;

    static long long u2_by_pairs(const std::vector<double>& pooled,
                                 const std::vector<int>& group_a_idx,
                                 const std::vector<int>& group_b_idx) {
        long long u2 = 0;
        for (const int i : group_a_idx) {
            for (const int j : group_b_idx) {
                if (pooled[i] > pooled[j])
                    u2 += 2;
                else if (pooled[i] == pooled[j])
                    u2 += 1;
            }
        }
        return u2;
    }

    double run(const std::vector<double>& a, const std::vector<double>& b) {
        const int n1 = static_cast<int>(a.size());
        const int n2 = static_cast<int>(b.size());
        std::vector<double> pooled = a;
        pooled.insert(pooled.end(), b.begin(), b.end());
        const int n = n1 + n2;

        std::vector<int> a_idx(n1), b_idx;
        std::iota(a_idx.begin(), a_idx.end(), 0);
        b_idx.resize(n2);
        std::iota(b_idx.begin(), b_idx.end(), n1);
        u2_observed = u2_by_pairs(pooled, a_idx, b_idx);

        const long long center2 = 2LL * n1 * n2 / 2; // 2*mu, always integral
        const long long d_obs = std::llabs(u2_observed - center2);

        extreme = 0;
        total = 0;
        std::vector<int> chosen(n1);
        std::vector<char> in_a(n);
        enumerate(pooled, n, n1, 0, 0, chosen, in_a, center2, d_obs);
        return static_cast<double>(extreme) / static_cast<double>(total);
    }

private:
    void enumerate(const std::vector<double>& pooled, int n, int n1, int next, int depth,
                   std::vector<int>& chosen, std::vector<char>& in_a, long long center2,
                   long long d_obs) {
        if (depth == n1) {
            std::vector<int> b_idx;
            for (int i = 0; i < n; ++i)
                if (!in_a[i]) b_idx.push_back(i);
            const long long u2 = u2_by_pairs(pooled, chosen, b_idx);
            ++total;
            if (std::llabs(u2 - center2) >= d_obs) ++extreme;
            return;
        }
        for (int i = next; i <= n - (n1 - depth); ++i) {
            chosen[depth] = i;
            in_a[i] = 1;
            enumerate(pooled, n, n1, i + 1, depth + 1, chosen, in_a, center2, d_obs);
            in_a[i] = 0;
        }
    }
};

std::vector<double> distinct_sample(Rng& rng, int n, std::vector<double>& pool) {
    shuffle(pool, rng);
    return std::vector<double>(pool.begin(), pool.begin() + n);
}

} // namespace

TEST_CASE("summarise uses linear interpolation quartiles") {
    const SampleSummary five = summarise({5, 3, 1, 4, 2});
    CHECK(five.q1 == 2.0);
    CHECK(five.median == 3.0);
    CHECK(five.q3 == 4.0);
    CHECK(five.n == 5);
    CHECK(std::is_sorted(five.values.begin(), five.values.end()));

    const SampleSummary four = summarise({1, 2, 3, 4});
    CHECK(four.q1 == 1.75);
    CHECK(four.median == 2.5);
    CHECK(four.q3 == 3.25);

    const SampleSummary one = summarise({7.5});
    CHECK(one.q1 == 7.5);
    CHECK(one.median == 7.5);
    CHECK(one.q3 == 7.5);

    CHECK_THROWS_AS(summarise({}), std::invalid_argument);
}

TEST_CASE("summarise statistics are affine equivariant") {
    Rng rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> values;
        const int n = 2 + static_cast<int>(rng.below(40));
        for (int i = 0; i < n; ++i) values.push_back(rng.uniform_real(-100.0, 100.0));
        const double c = rng.uniform_real(0.1, 5.0);
        const double d = rng.uniform_real(-10.0, 10.0);
        std::vector<double> scaled;
        for (const double v : values) scaled.push_back(c * v + d);

        const SampleSummary base = summarise(values);
        const SampleSummary after = summarise(scaled);
        CHECK_THAT(after.median, Catch::Matchers::WithinRel(c * base.median + d, 1e-12));
        CHECK_THAT(after.q1, Catch::Matchers::WithinRel(c * base.q1 + d, 1e-12));
        CHECK_THAT(after.q3, Catch::Matchers::WithinRel(c * base.q3 + d, 1e-12));
    }
}

TEST_CASE("mann-whitney matches the worked example") {
    const auto r = mann_whitney_u(std::vector<double>{1, 2}, std::vector<double>{3, 4});
    CHECK(r.u == 0.0);
    CHECK(r.exact);
    CHECK_THAT(r.p_two_sided, Catch::Matchers::WithinAbs(2.0 / 6.0, 1e-15));
}

TEST_CASE("identical samples are maximally tied") {
    const std::vector<double> a{1, 2, 3, 4, 5};
    const auto r = mann_whitney_u(a, a);
    CHECK_THAT(r.p_two_sided, Catch::Matchers::WithinAbs(1.0, 1e-9));
    CHECK(r.u == 12.5); // n1*n2/2 under full symmetry
}

TEST_CASE("exact p matches the permutation oracle on tie-free samples") {
    Rng rng(17);
    std::vector<double> pool;
    for (int i = 0; i < 64; ++i) pool.push_back(i * 0.37 - 7.1);
    for (int trial = 0; trial < 60; ++trial) {
        const int n1 = 1 + static_cast<int>(rng.below(8));
        const int n2 = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(16 - n1 < 8 ? 16 - n1 : 8)));
        const auto a = distinct_sample(rng, n1, pool);
        std::vector<double> rest(pool.begin() + n1, pool.end());
        shuffle(rest, rng);
        const std::vector<double> b(rest.begin(), rest.begin() + n2);

        const auto r = mann_whitney_u(a, b);
        REQUIRE(r.exact);
        PermutationOracle oracle;
        const double p_oracle = oracle.run(a, b);
        REQUIRE_THAT(r.p_two_sided, Catch::Matchers::WithinAbs(p_oracle, 1e-12));
    }
}

TEST_CASE("swapping the samples mirrors U and preserves p exactly") {
    Rng rng(29);
    for (int trial = 0; trial < 200; ++trial) {
        const int n1 = 1 + static_cast<int>(rng.below(10));
        const int n2 = 1 + static_cast<int>(rng.below(10));
        std::vector<double> a, b;
        for (int i = 0; i < n1; ++i) a.push_back(rng.uniform_real(-5, 5));
        for (int i = 0; i < n2; ++i) b.push_back(rng.uniform_real(-5, 5));
        const auto ab = mann_whitney_u(a, b);
        const auto ba = mann_whitney_u(b, a);
        REQUIRE(ab.u == static_cast<double>(n1) * n2 - ba.u);
        REQUIRE(ab.p_two_sided == ba.p_two_sided);
    }
}

TEST_CASE("normal approximation stays near the exact p at the switchover size") {
    Rng rng(31);
    std::vector<double> pool;
    for (int i = 0; i < 40; ++i) pool.push_back(std::sqrt(2.0 + i) * 1.73);
    for (int trial = 0; trial < 40; ++trial) {
        const int n1 = 4 + static_cast<int>(rng.below(9)); // 4..12, n1+n2 = 16
        const int n2 = 16 - n1;
        shuffle(pool, rng);
        const std::vector<double> a(pool.begin(), pool.begin() + n1);
        const std::vector<double> b(pool.begin() + n1, pool.begin() + n1 + n2);
        const auto r = mann_whitney_u(a, b);
        REQUIRE(r.exact);
        const double p_normal = mann_whitney_normal_p(r.u, a.size(), b.size(), {});
        REQUIRE(std::abs(p_normal - r.p_two_sided) < 0.03);
    }
}

TEST_CASE("ties switch to the corrected normal approximation") {
    const std::vector<double> a{1, 1, 2, 3};
    const std::vector<double> b{1, 2, 2, 4};
    const auto r = mann_whitney_u(a, b);
    CHECK_FALSE(r.exact);
    CHECK(r.p_two_sided > 0.0);
    CHECK(r.p_two_sided <= 1.0);

    // large tie-free samples also take the approximation path
    std::vector<double> big_a, big_b;
    for (int i = 0; i < 30; ++i) {
        big_a.push_back(i * 1.01);
        big_b.push_back(i * 1.01 + 0.005);
    }
    CHECK_FALSE(mann_whitney_u(big_a, big_b).exact);
}

TEST_CASE("compare_groups marks ties against the best median") {
    SECTION("identical groups tie") {
        const std::map<std::string, std::vector<double>> groups{
            {"a", {1, 2, 3, 4, 5}},
            {"b", {1, 2, 3, 4, 5}},
        };
        const auto v = compare_groups(groups, 0.05);
        CHECK(v.best_group == "a");
        CHECK(v.tied_with_best == std::set<std::string>{"a", "b"});
        CHECK(v.p_values.at({"a", "b"}) == v.p_values.at({"b", "a"}));
    }

    SECTION("a clearly dominated group is not tied") {
        // shaped like the 210_cloud row: one tight distribution around 0.18,
        // one much larger with a huge upper quartile
        std::map<std::string, std::vector<double>> groups;
        Rng rng(5);
        for (int i = 0; i < 30; ++i) {
            groups["discrete"].push_back(0.18 + 0.001 * rng.uniform01());
            groups["subgraph"].push_back(20.34 + 10000.0 * rng.uniform01());
        }
        const auto v = compare_groups(groups, 0.05);
        CHECK(v.best_group == "discrete");
        CHECK(v.tied_with_best == std::set<std::string>{"discrete"});
    }

    SECTION("three groups with two sharing all values") {
        const std::map<std::string, std::vector<double>> groups{
            {"a", {5, 6, 7, 8}},
            {"b", {5, 6, 7, 8}},
            {"c", {50, 60, 70, 80}},
        };
        const auto v = compare_groups(groups, 0.05);
        CHECK(v.best_group == "a");
        CHECK(v.tied_with_best.count("b") == 1);
        CHECK(v.tied_with_best.count("c") == 0);
    }

    CHECK_THROWS_AS(compare_groups({{"solo", {1.0}}}, 0.05), std::invalid_argument);
}

TEST_CASE("raising alpha never adds groups to the tied set") {
    Rng rng(37);
    std::map<std::string, std::vector<double>> groups;
    for (int g = 0; g < 4; ++g) {
        std::vector<double> values;
        for (int i = 0; i < 20; ++i) values.push_back(rng.uniform_real(0, 1) + 0.2 * g);
        groups["g" + std::to_string(g)] = values;
    }
    std::set<std::string> previous;
    bool first = true;
    for (const double alpha : {0.001, 0.01, 0.05, 0.2, 0.5, 0.9}) {
        const auto v = compare_groups(groups, alpha);
        if (!first)
            for (const auto& name : v.tied_with_best) REQUIRE(previous.count(name) == 1);
        previous = v.tied_with_best;
        first = false;
    }
}
