#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "mergegame/error.hpp"

namespace mergegame {

struct Literal {
    int var = 1; // 1-based
    bool positive = true;

    constexpr Literal negated() const { return {var, !positive}; }
    constexpr int dimacs() const { return positive ? var : -var; }
    static constexpr Literal from_dimacs(int v) { return {v < 0 ? -v : v, v > 0}; }

    constexpr bool operator==(const Literal&) const = default;
};

using Clause = std::array<Literal, 3>;

struct CnfFormula {
    int num_vars = 0;
    std::vector<Clause> clauses;

    std::size_t num_clauses() const { return clauses.size(); }

    bool operator==(const CnfFormula&) const = default;
};

/// Total truth assignment, indexed by 1-based variable.
class Assignment {
public:
    Assignment() = default;
    explicit Assignment(int num_vars, bool fill = false)
        : values_(static_cast<std::size_t>(num_vars) + 1, fill) {}

    int num_vars() const { return values_.empty() ? 0 : static_cast<int>(values_.size()) - 1; }

    bool value(int var) const { return values_.at(static_cast<std::size_t>(var)); }
    void set(int var, bool v) { values_.at(static_cast<std::size_t>(var)) = v; }

    bool satisfies(Literal lit) const { return value(lit.var) == lit.positive; }

    bool operator==(const Assignment&) const = default;

private:
    std::vector<bool> values_;
};

inline bool satisfies(const Assignment& a, const Clause& clause) {
    for (const auto& lit : clause) {
        if (a.satisfies(lit)) {
            return true;
        }
    }
    return false;
}

inline bool satisfies(const Assignment& a, const CnfFormula& f) {
    for (const auto& clause : f.clauses) {
        if (!satisfies(a, clause)) {
            return false;
        }
    }
    return true;
}

/// Index (1-based) of the first clause `a` leaves false, or 0 when all hold.
inline std::size_t first_false_clause(const Assignment& a, const CnfFormula& f) {
    for (std::size_t j = 0; j < f.clauses.size(); ++j) {
        if (!satisfies(a, f.clauses[j])) {
            return j + 1;
        }
    }
    return 0;
}

inline void validate(const CnfFormula& f) {
    if (f.num_vars < 0) {
        throw Error(ErrorCode::InvalidParameters, "negative variable count");
    }
    for (const auto& clause : f.clauses) {
        for (const auto& lit : clause) {
            if (lit.var < 1 || lit.var > f.num_vars) {
                throw Error(ErrorCode::InvalidParameters,
                            "literal variable " + std::to_string(lit.var) + " out of range");
            }
        }
    }
}

/// Brute-force satisfiability; for test oracles and small formulas only.
inline bool brute_force_satisfiable(const CnfFormula& f) {
    if (f.num_vars > 24) {
        throw Error(ErrorCode::InvalidParameters, "too many variables for enumeration");
    }
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << f.num_vars); ++mask) {
        Assignment a(f.num_vars);
        for (int v = 1; v <= f.num_vars; ++v) {
            a.set(v, (mask >> (v - 1)) & 1u);
        }
        if (satisfies(a, f)) {
            return true;
        }
    }
    return false;
}

} // namespace mergegame
