#include <catch2/catch_amalgamated.hpp>

#include <set>
#include <sstream>

#include "cgpbench/regression.hpp"
#include "test_support.hpp"

using namespace cgpbench;
using test_support::TempDir;
using test_support::write_text;

namespace {

std::string make_table(int rows, int features, char delim, const std::string& target_name = "target") {
    std::ostringstream out;
    for (int c = 0; c < features; ++c) out << "x" << c << delim;
    out << target_name << "\n";
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < features; ++c) out << (r * 0.5 + c) << delim;
        out << (r * 1.5) << "\n";
    }
    return out.str();
}

} // namespace

TEST_CASE("loader accepts tab and comma separated tables") {
    TempDir dir("loader");

    const auto vineyard = dir.path() / "192_vineyard.tsv";
    write_text(vineyard, make_table(52, 3, '\t'));
    const Dataset a = load_dataset(vineyard);
    CHECK(a.n() == 52);
    CHECK(a.d() == 3);
    CHECK(a.name == "192_vineyard");
    CHECK(a.feature_names == std::vector<std::string>{"x0", "x1", "x2"});

    const auto visualizing = dir.path() / "678_visualizing_environmental.csv";
    write_text(visualizing, make_table(11, 4, ','));
    const Dataset b = load_dataset(visualizing);
    CHECK(b.n() == 11);
    CHECK(b.d() == 4);
}

TEST_CASE("loader rejects malformed input with a named cell") {
    TempDir dir("loader_bad");

    const auto nan_file = dir.path() / "nan.tsv";
    write_text(nan_file, "x0\ttarget\n1.0\tNaN\n");
    CHECK_THROWS_MATCHES(load_dataset(nan_file), IngestError,
                         Catch::Matchers::MessageMatches(
                             Catch::Matchers::ContainsSubstring("target") &&
                             Catch::Matchers::ContainsSubstring("row 1")));

    const auto no_target = dir.path() / "no_target.tsv";
    write_text(no_target, "x0\ty\n1.0\t2.0\n");
    CHECK_THROWS_MATCHES(load_dataset(no_target), IngestError,
                         Catch::Matchers::MessageMatches(
                             Catch::Matchers::ContainsSubstring("target")));

    const auto empty = dir.path() / "empty.tsv";
    write_text(empty, "");
    CHECK_THROWS_AS(load_dataset(empty), IngestError);

    const auto header_only = dir.path() / "header_only.tsv";
    write_text(header_only, "x0\ttarget\n");
    CHECK_THROWS_AS(load_dataset(header_only), IngestError);

    const auto garbled = dir.path() / "garbled.tsv";
    write_text(garbled, "x0\ttarget\nabc\t1.0\n");
    CHECK_THROWS_MATCHES(load_dataset(garbled), IngestError,
                         Catch::Matchers::MessageMatches(
                             Catch::Matchers::ContainsSubstring("x0")));

    const auto missing = dir.path() / "missing.tsv";
    CHECK_THROWS_AS(load_dataset(missing), IngestError);
}

TEST_CASE("split sizes, disjointness and determinism") {
    TempDir dir("split");
    const auto file = dir.path() / "d.tsv";
    write_text(file, make_table(100, 2, '\t'));
    const Dataset ds = load_dataset(file);

    const SplitSpec s = split(ds, 0.75, 42);
    CHECK(s.train_indices.size() == 75);
    CHECK(s.test_indices.size() == 25);

    std::set<int> all(s.train_indices.begin(), s.train_indices.end());
    all.insert(s.test_indices.begin(), s.test_indices.end());
    CHECK(all.size() == 100);

    const SplitSpec again = split(ds, 0.75, 42);
    CHECK(again.train_indices == s.train_indices);
    CHECK(again.test_indices == s.test_indices);
    CHECK(split(ds, 0.75, 43).train_indices != s.train_indices);
}

TEST_CASE("split rounding is half-to-even") {
    TempDir dir("split_round");
    const auto file = dir.path() / "d.tsv";
    write_text(file, make_table(11, 2, '\t'));
    const Dataset ds = load_dataset(file);
    const SplitSpec s = split(ds, 0.75, 7); // 8.25 rounds to 8
    CHECK(s.train_indices.size() == 8);
    CHECK(s.test_indices.size() == 3);

    CHECK(round_half_to_even(7.5) == 8);
    CHECK(round_half_to_even(8.5) == 8);
    CHECK(round_half_to_even(8.25) == 8);

    CHECK_THROWS_AS(split(ds, 0.01, 7), std::invalid_argument); // empty train side
    CHECK_THROWS_AS(split(ds, 1.0, 7), std::invalid_argument);
}

TEST_CASE("kfold deals balanced folds deterministically") {
    std::vector<int> train10(10);
    std::iota(train10.begin(), train10.end(), 100);
    const FoldAssignment f10 = kfold(train10, 5, 42);
    std::map<int, int> sizes;
    for (const int f : f10.fold_of) ++sizes[f];
    REQUIRE(sizes.size() == 5);
    for (const auto& [fold, count] : sizes) CHECK(count == 2);

    std::vector<int> train8(8);
    std::iota(train8.begin(), train8.end(), 0);
    const FoldAssignment f8 = kfold(train8, 5, 42);
    std::multiset<int> counts;
    std::map<int, int> sizes8;
    for (const int f : f8.fold_of) ++sizes8[f];
    for (const auto& [fold, count] : sizes8) counts.insert(count);
    CHECK(counts == std::multiset<int>{1, 1, 2, 2, 2});

    CHECK(kfold(train8, 5, 42).fold_of == f8.fold_of);
    CHECK_THROWS_AS(kfold(train8, 9, 42), std::invalid_argument);
    CHECK_THROWS_AS(kfold(train8, 1, 42), std::invalid_argument);
}

TEST_CASE("mse basics and the worst-fitness sentinel") {
    CHECK(mse(std::vector<double>{1, 2, 3}, std::vector<double>{1, 2, 3}) == 0.0);
    CHECK(mse(std::vector<double>{0, 0}, std::vector<double>{1, 3}) == 5.0);
    CHECK(mse(std::vector<double>{std::nan(""), 0}, std::vector<double>{1, 3}) == kWorstFitness);
    CHECK_THROWS_AS(mse(std::vector<double>{1}, std::vector<double>{1, 2}),
                    std::invalid_argument);
}

TEST_CASE("fitness_on computes MSE over the selected rows") {
    TempDir dir("fitness");
    const auto file = dir.path() / "d.tsv";
    // target = x0 + x1
    std::ostringstream table;
    table << "x0\tx1\ttarget\n";
    for (int r = 0; r < 12; ++r) table << r << "\t" << 2 * r << "\t" << 3 * r << "\n";
    write_text(file, table.str());
    const Dataset ds = load_dataset(file);

    CgpConfig cfg;
    cfg.num_inputs = 2;
    cfg.num_outputs = 1;
    cfg.num_function_nodes = 2;
    cfg.max_arity = 2;
    cfg.levels_back = 2;
    cfg.functions = make_function_set({"add", "mul"});

    std::vector<int> rows(ds.n());
    std::iota(rows.begin(), rows.end(), 0);
    const FitnessFn fit = fitness_on(rows, ds, cfg);

    const Genome exact{{0, 0, 1, 1, 2, 0, 2}}; // node 2 = add(x0, x1), output -> node 2
    CHECK(fit(exact) == 0.0);

    // output wired straight to feature 1: MSE of that column against target
    const Genome passthrough{{0, 0, 1, 1, 2, 0, 1}};
    double expected = 0.0;
    for (int r = 0; r < 12; ++r) {
        const double diff = ds.feature(r, 1) - ds.targets[r];
        expected += diff * diff;
    }
    expected /= 12.0;
    CHECK(fit(passthrough) == Catch::Approx(expected).epsilon(1e-12));

    CHECK_THROWS_AS(fitness_on({}, ds, cfg), std::invalid_argument);
    CgpConfig two_out = cfg;
    two_out.num_outputs = 2;
    CHECK_THROWS_AS(fitness_on(rows, ds, two_out), std::invalid_argument);
}

TEST_CASE("a constant input terminal is appended when the config asks for one") {
    TempDir dir("const_input");
    const auto file = dir.path() / "d.tsv";
    std::ostringstream table;
    table << "x0\ttarget\n";
    for (int r = 0; r < 8; ++r) table << r << "\t" << 2.5 << "\n";
    write_text(file, table.str());
    const Dataset ds = load_dataset(file);

    CgpConfig cfg;
    cfg.num_inputs = 2; // x0 plus the constant 1.0
    cfg.num_outputs = 1;
    cfg.num_function_nodes = 1;
    cfg.max_arity = 2;
    cfg.levels_back = 1;
    cfg.functions = make_function_set({"add"});

    std::vector<int> rows(ds.n());
    std::iota(rows.begin(), rows.end(), 0);
    const FitnessFn fit = fitness_on(rows, ds, cfg);

    const Genome const_one{{0, 0, 0, 1}}; // output -> the constant input
    double expected = 0.0;
    for (int r = 0; r < 8; ++r) expected += (1.0 - 2.5) * (1.0 - 2.5);
    expected /= 8.0;
    CHECK(fit(const_one) == Catch::Approx(expected).epsilon(1e-12));
}
