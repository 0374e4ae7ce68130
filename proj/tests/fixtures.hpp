#pragma once

#include <random>

#include "mergegame/cnf.hpp"

namespace fixtures {

using mergegame::CnfFormula;
using mergegame::Literal;

inline Literal lit(int d) { return Literal::from_dimacs(d); }

inline CnfFormula example() {
    return {4, {{lit(1), lit(-2), lit(3)}, {lit(2), lit(3), lit(-4)}, {lit(-1), lit(-2), lit(4)}}};
}

inline CnfFormula unsat8() {
    CnfFormula f{3, {}};
    for (int mask = 0; mask < 8; ++mask) {
        f.clauses.push_back({lit((mask & 1) ? -1 : 1), lit((mask & 2) ? -2 : 2), lit((mask & 4) ? -3 : 3)});
    }
    return f;
}

inline CnfFormula single() { return {1, {{lit(1), lit(1), lit(1)}}}; }

/// Uniform random 3-CNF with n in [1, max_vars], m in [1, max_clauses].
inline CnfFormula random_formula(std::mt19937_64& rng, int max_vars, int max_clauses) {
    std::uniform_int_distribution<int> nd(1, max_vars), md(1, max_clauses), coin(0, 1);
    CnfFormula f;
    f.num_vars = nd(rng);
    int m = md(rng);
    std::uniform_int_distribution<int> vd(1, f.num_vars);
    for (int j = 0; j < m; ++j) {
        mergegame::Clause c;
        for (auto& l : c) {
            l = {vd(rng), coin(rng) == 1};
        }
        f.clauses.push_back(c);
    }
    return f;
}

} // namespace fixtures
