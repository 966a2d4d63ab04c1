#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace cgpbench {

// Guard for protected division: |denominator| at or below this yields 1.0.
inline constexpr double kDivisionGuard = 1e-9;

// One primitive operation over real arguments. `apply` is total on finite
// inputs; protected variants substitute a fixed value where the raw
// operation would be undefined. Non-finite results are allowed to escape and
// are mapped to worst fitness by the regression layer.
struct FunctionSemantics {
    std::string name;
    int arity;
    double (*apply)(std::span<const double>);
};

namespace detail {
inline double fn_add(std::span<const double> a) { return a[0] + a[1]; }
inline double fn_sub(std::span<const double> a) { return a[0] - a[1]; }
inline double fn_mul(std::span<const double> a) { return a[0] * a[1]; }
inline double fn_pdiv(std::span<const double> a) {
    return std::abs(a[1]) <= kDivisionGuard ? 1.0 : a[0] / a[1];
}
inline double fn_sin(std::span<const double> a) { return std::sin(a[0]); }
inline double fn_cos(std::span<const double> a) { return std::cos(a[0]); }
} // namespace detail

// Fixed registry of primitives selectable from experiment configs.
inline const std::vector<FunctionSemantics>& builtin_functions() {
    static const std::vector<FunctionSemantics> registry = {
        {"add", 2, detail::fn_add},  {"sub", 2, detail::fn_sub},
        {"mul", 2, detail::fn_mul},  {"pdiv", 2, detail::fn_pdiv},
        {"sin", 1, detail::fn_sin},  {"cos", 1, detail::fn_cos},
    };
    return registry;
}

// Ordered table of primitives. The order of entries defines the
// function-gene indices, so configs that list the same names in the same
// order reproduce bit-identical runs.
class FunctionSet {
public:
    FunctionSet() = default;
    explicit FunctionSet(std::vector<FunctionSemantics> entries) : entries_(std::move(entries)) {}

    std::size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }
    const FunctionSemantics& operator[](std::size_t i) const { return entries_[i]; }

    int max_entry_arity() const {
        int m = 0;
        for (const auto& f : entries_) m = std::max(m, f.arity);
        return m;
    }

    std::vector<std::string> names() const {
        std::vector<std::string> out;
        out.reserve(entries_.size());
        for (const auto& f : entries_) out.push_back(f.name);
        return out;
    }

private:
    std::vector<FunctionSemantics> entries_;
};

inline FunctionSet make_function_set(const std::vector<std::string>& names) {
    std::vector<FunctionSemantics> entries;
    entries.reserve(names.size());
    for (const auto& name : names) {
        bool found = false;
        for (const auto& f : builtin_functions()) {
            if (f.name == name) {
                entries.push_back(f);
                found = true;
                break;
            }
        }
        if (!found) throw std::invalid_argument("unknown function name: " + name);
    }
    return FunctionSet(std::move(entries));
}

inline FunctionSet default_function_set() {
    return make_function_set({"add", "sub", "mul", "pdiv", "sin", "cos"});
}

} // namespace cgpbench
