#pragma once

#include <cstddef>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "mergegame/cnf.hpp"
#include "mergegame/error.hpp"

namespace mergegame::io {

struct DimacsOptions {
    bool lenient = false; // pad 1- and 2-literal clauses by repeating literals
};

namespace detail {

inline bool parse_int(const std::string& tok, long long& out) {
    if (tok.empty()) {
        return false;
    }
    std::size_t used = 0;
    try {
        out = std::stoll(tok, &used);
    } catch (const std::logic_error&) {
        return false;
    }
    return used == tok.size();
}

} // namespace detail

/// Parse DIMACS CNF. Clauses may span lines; each ends at a 0 token.
inline CnfFormula parse_dimacs(std::string_view text, DimacsOptions options = {}) {
    CnfFormula f;
    bool have_header = false;
    long long declared_clauses = 0;
    std::vector<Literal> pending;
    std::size_t pending_line = 0;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t lineno = 0;

    auto finish_clause = [&](std::size_t at) {
        if (pending.empty()) {
            throw ParseError(ErrorCode::SyntaxError, at, "empty clause");
        }
        if (pending.size() > 3 || (pending.size() < 3 && !options.lenient)) {
            throw ParseError(ErrorCode::ClauseArityError, pending_line,
                             "clause has " + std::to_string(pending.size()) + " literals, expected 3");
        }
        Clause c{};
        for (std::size_t i = 0; i < 3; ++i) {
            c[i] = pending[std::min(i, pending.size() - 1)];
        }
        f.clauses.push_back(c);
        pending.clear();
    };

    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        std::istringstream ls(line);
        std::string tok;
        if (!(ls >> tok)) {
            continue;
        }
        if (tok == "c") {
            continue;
        }
        if (tok == "%") { // end marker used by some benchmark sets
            break;
        }
        if (tok == "p") {
            std::string kind, nv, nc, extra;
            long long v = 0, c = 0;
            if (have_header) {
                throw ParseError(ErrorCode::SyntaxError, lineno, "duplicate problem line");
            }
            if (!(ls >> kind >> nv >> nc) || kind != "cnf" || !detail::parse_int(nv, v) ||
                !detail::parse_int(nc, c) || v < 0 || c < 0 || (ls >> extra)) {
                throw ParseError(ErrorCode::SyntaxError, lineno, "expected 'p cnf <vars> <clauses>'");
            }
            f.num_vars = static_cast<int>(v);
            declared_clauses = c;
            have_header = true;
            continue;
        }
        if (!have_header) {
            throw ParseError(ErrorCode::SyntaxError, lineno, "clause before problem line");
        }
        do {
            long long lit = 0;
            if (!detail::parse_int(tok, lit)) {
                throw ParseError(ErrorCode::SyntaxError, lineno, "bad literal '" + tok + "'");
            }
            if (lit == 0) {
                finish_clause(lineno);
                continue;
            }
            if (lit > f.num_vars || -lit > f.num_vars) {
                throw ParseError(ErrorCode::SyntaxError, lineno,
                                 "literal " + tok + " exceeds declared variable count");
            }
            if (pending.empty()) {
                pending_line = lineno;
            }
            pending.push_back(Literal::from_dimacs(static_cast<int>(lit)));
        } while (ls >> tok);
    }
    if (!have_header) {
        throw ParseError(ErrorCode::SyntaxError, lineno, "missing problem line");
    }
    if (!pending.empty()) {
        throw ParseError(ErrorCode::SyntaxError, lineno, "last clause is not terminated by 0");
    }
    if (static_cast<long long>(f.clauses.size()) != declared_clauses) {
        throw ParseError(ErrorCode::SyntaxError, lineno,
                         "header declares " + std::to_string(declared_clauses) + " clauses, found " +
                             std::to_string(f.clauses.size()));
    }
    return f;
}

inline std::string to_dimacs(const CnfFormula& f) {
    std::ostringstream os;
    os << "p cnf " << f.num_vars << ' ' << f.clauses.size() << '\n';
    for (const auto& c : f.clauses) {
        for (const auto& lit : c) {
            os << lit.dimacs() << ' ';
        }
        os << "0\n";
    }
    return os.str();
}

} // namespace mergegame::io
