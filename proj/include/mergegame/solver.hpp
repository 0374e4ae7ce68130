#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "mergegame/board.hpp"
#include "mergegame/cnf.hpp"
#include "mergegame/engine.hpp"
#include "mergegame/error.hpp"
#include "mergegame/reduction.hpp"

namespace mergegame {

// ---------------------------------------------------------------------------
// DPLL

namespace detail {

// value per variable: 0 unassigned, 1 true, -1 false
inline bool dpll_rec(const CnfFormula& f, std::vector<int>& val) {
    // unit propagation to fixpoint
    std::vector<int> trail;
    auto undo = [&] {
        for (int v : trail) {
            val[static_cast<std::size_t>(v)] = 0;
        }
    };
    for (bool changed = true; changed;) {
        changed = false;
        for (const auto& clause : f.clauses) {
            int unassigned = 0;
            Literal last{};
            bool sat = false;
            for (const auto& lit : clause) {
                int v = val[static_cast<std::size_t>(lit.var)];
                if (v == 0) {
                    if (unassigned == 0 || !(last == lit)) {
                        ++unassigned;
                    }
                    last = lit;
                } else if ((v > 0) == lit.positive) {
                    sat = true;
                    break;
                }
            }
            if (sat) {
                continue;
            }
            if (unassigned == 0) {
                undo();
                return false;
            }
            if (unassigned == 1) {
                val[static_cast<std::size_t>(last.var)] = last.positive ? 1 : -1;
                trail.push_back(last.var);
                changed = true;
            }
        }
    }
    int branch = 0;
    for (int v = 1; v <= f.num_vars; ++v) {
        if (val[static_cast<std::size_t>(v)] == 0) {
            branch = v;
            break;
        }
    }
    if (branch == 0) {
        return true;
    }
    for (int choice : {1, -1}) {
        val[static_cast<std::size_t>(branch)] = choice;
        if (dpll_rec(f, val)) {
            return true;
        }
    }
    val[static_cast<std::size_t>(branch)] = 0;
    undo();
    return false;
}

} // namespace detail

/// Unit propagation plus branching on the lowest unassigned variable, true first.
inline std::optional<Assignment> dpll(const CnfFormula& formula) {
    validate(formula);
    std::vector<int> val(static_cast<std::size_t>(formula.num_vars) + 1, 0);
    if (!detail::dpll_rec(formula, val)) {
        return std::nullopt;
    }
    Assignment a(formula.num_vars);
    for (int v = 1; v <= formula.num_vars; ++v) {
        a.set(v, val[static_cast<std::size_t>(v)] > 0);
    }
    return a;
}

// ---------------------------------------------------------------------------
// Traces

struct Trace {
    std::vector<Direction> moves;
    std::vector<Board> snapshots;           // board after each step, when recorded
    std::vector<std::uint64_t> score_per_move;
    bool reached_goal = false;
    std::uint64_t final_score = 0;
};

inline std::string moves_to_string(const std::vector<Direction>& moves) {
    std::string s;
    for (Direction d : moves) {
        s += to_char(d);
    }
    return s;
}

inline std::vector<Direction> moves_from_string(std::string_view s) {
    std::vector<Direction> out;
    for (char c : s) {
        out.push_back(direction_from_char(c));
    }
    return out;
}

/// Play `moves` from the instance start. Throws ReplayMismatch on an illegal
/// move or a failed spawn.
inline Trace replay(const Instance& instance, const std::vector<Direction>& moves, bool keep_snapshots = false) {
    Trace t;
    t.moves = moves;
    GameState s = instance.initial_state();
    for (std::size_t i = 0; i < moves.size(); ++i) {
        MoveOutcome out = apply_move(s, moves[i]);
        if (!out.moved) {
            throw Error(ErrorCode::ReplayMismatch,
                        "move " + std::to_string(i) + " (" + to_char(moves[i]) + ") changes nothing");
        }
        try {
            s = advance(s, out);
        } catch (const Error& e) {
            throw Error(ErrorCode::ReplayMismatch, "spawn after move " + std::to_string(i) + " failed: " + e.what());
        }
        t.score_per_move.push_back(out.score_delta);
        if (keep_snapshots) {
            t.snapshots.push_back(s.board);
        }
    }
    t.reached_goal = s.goal_reached;
    t.final_score = s.running_score;
    return t;
}

// ---------------------------------------------------------------------------
// Canonical strategy

namespace detail {

inline void push(std::vector<Direction>& out, std::initializer_list<Direction> ds) {
    out.insert(out.end(), ds);
}

} // namespace detail

/// Move script for a compiled instance given a truth assignment of the
/// original formula. Built from the layout's occurrence counts and a fixed
/// table per gadget; the result is replayed to fill in the trace.
inline std::vector<Direction> canonical_moves(const Instance& instance, const Assignment& assignment) {
    if (!instance.meta || instance.annotations.empty()) {
        throw Error(ErrorCode::MissingAnnotations, "instance carries no gadget annotations");
    }
    const InstanceMeta& meta = *instance.meta;
    if (assignment.num_vars() < meta.original.num_vars) {
        throw Error(ErrorCode::InvalidParameters, "assignment does not cover every variable");
    }
    if (std::size_t j = first_false_clause(assignment, meta.original); j != 0) {
        throw UnsatisfiedClauseError(j);
    }
    const CnfFormula& f = meta.normalized.formula;
    Assignment a = meta.normalized.record.to_normalized_assignment(assignment);
    const Layout& L = meta.layout;

    using enum Direction;
    std::vector<Direction> out{Left};
    for (int i = 1; i <= L.n; ++i) {
        bool last = i == L.n;
        auto hand_off = [&] { detail::push(out, {last ? Down : Up, Left}); };
        if (a.value(i)) {
            out.push_back(Down);
            for (int k = 1; k <= L.kp(i); ++k) {
                out.push_back(Left);
                if (k < L.kp(i)) {
                    out.push_back(Down);
                }
            }
            hand_off();
        } else {
            detail::push(out, {Up, Left});
            if (L.km(i) > 0) {
                out.push_back(Down);
                for (int k = 1; k <= L.km(i); ++k) {
                    out.push_back(Left);
                    if (k < L.km(i)) {
                        out.push_back(Down);
                    }
                }
            }
            hand_off();
        }
    }
    for (const auto& clause : f.clauses) {
        std::size_t p = 0;
        while (p < 3 && a.value(clause[p].var) != clause[p].positive) {
            ++p;
        }
        switch (p) {
        case 0: detail::push(out, {Up, Right, Down, Left, Up, Left, Up, Left}); break;
        case 1: detail::push(out, {Down, Left, Up, Right, Down, Left, Up, Left}); break;
        default: detail::push(out, {Down, Left, Down, Left, Up, Right, Down, Left}); break;
        }
    }
    out.push_back(Down);
    if (meta.pot_of_gold) {
        detail::push(out, {Right, Up});
        for (int r = 0; r < meta.pot_of_gold->p; ++r) {
            out.push_back(Right);
        }
    }
    return out;
}

inline Trace canonical_play(const Instance& instance, const Assignment& assignment, bool keep_snapshots = false) {
    return replay(instance, canonical_moves(instance, assignment), keep_snapshots);
}

// ---------------------------------------------------------------------------
// Search

/// Upper bound on the moves of any game that never reaches `goal`.
constexpr std::uint64_t move_budget(std::uint64_t goal, std::uint64_t b) { return goal * b * b / 4; }

inline std::uint64_t move_budget(const Instance& instance) {
    auto b = static_cast<std::uint64_t>(std::max(instance.board.rows(), instance.board.cols()));
    return move_budget(instance.goal, b);
}

struct SearchBudget {
    std::optional<std::uint64_t> max_moves; // default: move_budget(instance)
    std::uint64_t max_states = 5'000'000;
};

enum class SearchStatus { Reached, Unreachable, BudgetExceeded };

constexpr std::string_view name_of(SearchStatus s) {
    switch (s) {
    case SearchStatus::Reached: return "reached";
    case SearchStatus::Unreachable: return "unreachable";
    case SearchStatus::BudgetExceeded: return "budget-exceeded";
    }
    return "unknown";
}

struct SearchResult {
    SearchStatus status = SearchStatus::Unreachable;
    std::optional<Trace> trace;
    std::uint64_t states = 0;    // distinct states expanded
    std::uint64_t dead_ends = 0; // forbidden states and failed spawns
    std::uint64_t max_depth = 0;
};

inline constexpr Direction kSearchOrder[] = {Direction::Left, Direction::Up, Direction::Down, Direction::Right};

namespace detail {

struct StateKey {
    std::uint64_t a, b;
    bool operator==(const StateKey&) const = default;
};

struct StateKeyHash {
    std::size_t operator()(const StateKey& k) const { return static_cast<std::size_t>(k.a ^ (k.b * 0x9e3779b97f4a7c15ULL)); }
};

inline StateKey key_of(const GameState& s) {
    std::uint64_t extra = (static_cast<std::uint64_t>(s.script_cursor) << 1) | (s.goal_reached ? 1U : 0U);
    std::uint64_t a = 0, b = 0;
    auto cells = s.board.raw();
    for (std::size_t i = 0; i < cells.size(); ++i) {
        a += mix64(cells[i] + i * 0x9e3779b97f4a7c15ULL);
        b += mix64((cells[i] ^ 0x2545f4914f6cdd1dULL) + i * 0xc2b2ae3d27d4eb4fULL);
    }
    auto dims = static_cast<std::uint64_t>(s.board.rows()) << 32 | static_cast<std::uint64_t>(s.board.cols());
    return {mix64(a ^ dims ^ (extra * 0xbf58476d1ce4e5b9ULL)), mix64(b + dims + extra)};
}

class Dfs {
public:
    Dfs(std::uint64_t max_moves, std::uint64_t max_states) : max_moves_(max_moves), max_states_(max_states) {}

    SearchResult run(const GameState& start) {
        if (start.goal_reached) {
            result_.status = SearchStatus::Reached;
            result_.trace = Trace{{}, {}, {}, true, start.running_score};
            return result_;
        }
        bool found = visit(start, 0);
        if (found) {
            result_.status = SearchStatus::Reached;
            Trace t;
            t.moves = path_;
            t.score_per_move = scores_;
            t.reached_goal = true;
            for (auto s : scores_) {
                t.final_score += s;
            }
            t.final_score += start.running_score;
            result_.trace = std::move(t);
        } else {
            result_.status = cut_ ? SearchStatus::BudgetExceeded : SearchStatus::Unreachable;
        }
        return result_;
    }

private:
    bool visit(const GameState& s, std::uint64_t depth) {
        result_.max_depth = std::max(result_.max_depth, depth);
        if (depth >= max_moves_) {
            cut_ = true;
            return false;
        }
        if (!visited_.insert(key_of(s)).second) {
            return false;
        }
        if (++result_.states > max_states_) {
            cut_ = true;
            aborted_ = true;
            return false;
        }
        bool any_move = false;
        LineHints hints = line_hints(s.board, s.variant);
        for (Direction d : kSearchOrder) {
            MoveOutcome out = apply_move(s.board, s.variant, d, hints);
            if (!out.moved) {
                continue;
            }
            any_move = true;
            path_.push_back(d);
            scores_.push_back(out.score_delta);
            bool goal = s.goal != 0 && std::any_of(out.merges.begin(), out.merges.end(),
                                                   [&](const MergeEvent& e) { return e.result >= s.goal; });
            if (goal) {
                return true;
            }
            std::optional<GameState> next;
            try {
                next = advance(s, out);
            } catch (const Error&) {
                ++result_.dead_ends;
            }
            if (next && visit(*next, depth + 1)) {
                return true;
            }
            path_.pop_back();
            scores_.pop_back();
            if (aborted_) {
                return false;
            }
        }
        if (!any_move) {
            ++result_.dead_ends; // forbidden: full board, nothing moves
        }
        return false;
    }

    std::uint64_t max_moves_;
    std::uint64_t max_states_;
    std::unordered_set<StateKey, StateKeyHash> visited_;
    std::vector<Direction> path_;
    std::vector<std::uint64_t> scores_;
    SearchResult result_;
    bool cut_ = false;
    bool aborted_ = false;
};

} // namespace detail

/// Depth-first search in the fixed order left, up, down, right.
inline SearchResult search(const GameState& start, const SearchBudget& budget, std::uint64_t default_max_moves) {
    detail::Dfs dfs(budget.max_moves.value_or(default_max_moves), budget.max_states);
    return dfs.run(start);
}

inline SearchResult search(const Instance& instance, const SearchBudget& budget = {}) {
    return search(instance.initial_state(), budget, move_budget(instance));
}

// ---------------------------------------------------------------------------
// Audit

enum class AuditRule { Fullness, OneMove, ShiftOnce, AdjacentColumns, AdjacentRows };

constexpr std::string_view name_of(AuditRule r) {
    switch (r) {
    case AuditRule::Fullness: return "fullness";
    case AuditRule::OneMove: return "one-move";
    case AuditRule::ShiftOnce: return "shift-once";
    case AuditRule::AdjacentColumns: return "adjacent-columns";
    case AuditRule::AdjacentRows: return "adjacent-rows";
    }
    return "unknown";
}

struct AuditViolation {
    std::size_t move = 0; // 0-based index of the offending step
    AuditRule rule = AuditRule::Fullness;
    std::string location;
};

struct AuditReport {
    bool fullness_ok = true;
    bool one_move_ok = true;
    bool shift_once_ok = true;
    bool adjacent_column_ok = true;
    bool adjacent_row_ok = true;
    std::vector<AuditViolation> violations;
    std::vector<int> row_shifts;
    std::vector<int> column_shifts;
    std::size_t audited_moves = 0; // steps up to and including the goal merge
    std::size_t allowed_adjacent_rows = 0;

    bool ok() const { return violations.empty(); }
};

namespace detail {

struct Region {
    int row_lo, row_hi, col_lo, col_hi;
};

/// Bounding box of the literal pieces on each clause's side of the board.
inline std::vector<Region> clause_regions(const Instance& instance) {
    std::map<int, Region> by_clause;
    for (const auto& a : instance.annotations) {
        if (a.tag.role != GadgetRole::LiteralEF && a.tag.role != GadgetRole::LiteralGH) {
            continue;
        }
        for (Cell c : a.cells) {
            auto [it, fresh] = by_clause.try_emplace(a.tag.clause, Region{c.row, c.row, c.col, c.col});
            Region& r = it->second;
            r.row_lo = std::min(r.row_lo, c.row);
            r.row_hi = std::max(r.row_hi, c.row);
            r.col_lo = std::min(r.col_lo, c.col);
            r.col_hi = std::max(r.col_hi, c.col);
        }
    }
    std::vector<Region> out;
    for (auto& [j, r] : by_clause) {
        out.push_back(r);
    }
    return out;
}

} // namespace detail

/// Replays the trace up to the goal merge and checks the structural rules.
/// Moves after the goal tile appears (the pot-of-gold cascade) are not audited.
inline AuditReport audit(const Instance& instance, const std::vector<Direction>& moves) {
    AuditReport rep;
    const Board& b0 = instance.board;
    rep.row_shifts.assign(static_cast<std::size_t>(b0.rows()), 0);
    rep.column_shifts.assign(static_cast<std::size_t>(b0.cols()), 0);
    auto regions = detail::clause_regions(instance);
    auto violate = [&rep](std::size_t i, AuditRule rule, std::string where) {
        rep.violations.push_back({i, rule, std::move(where)});
        switch (rule) {
        case AuditRule::Fullness: rep.fullness_ok = false; break;
        case AuditRule::OneMove: rep.one_move_ok = false; break;
        case AuditRule::ShiftOnce: rep.shift_once_ok = false; break;
        case AuditRule::AdjacentColumns: rep.adjacent_column_ok = false; break;
        case AuditRule::AdjacentRows: rep.adjacent_row_ok = false; break;
        }
    };

    // changed column span of every row shift
    std::vector<std::vector<std::pair<int, int>>> row_spans(static_cast<std::size_t>(b0.rows()));
    GameState s = instance.initial_state();
    for (std::size_t i = 0; i < moves.size() && !s.goal_reached; ++i) {
        MoveOutcome out = apply_move(s, moves[i]);
        if (!out.moved) {
            throw Error(ErrorCode::ReplayMismatch, "move " + std::to_string(i) + " changes nothing");
        }
        bool horizontal = is_horizontal(moves[i]);
        int lines = horizontal ? b0.rows() : b0.cols();
        int len = horizontal ? b0.cols() : b0.rows();
        for (int line = 0; line < lines; ++line) {
            int lo = -1, hi = -1;
            for (int k = 0; k < len; ++k) {
                Cell c = horizontal ? Cell{line, k} : Cell{k, line};
                if (s.board.face(c) != out.board_after.face(c)) {
                    lo = lo < 0 ? k : lo;
                    hi = k;
                }
            }
            if (lo < 0) {
                continue;
            }
            auto& counter = horizontal ? rep.row_shifts[static_cast<std::size_t>(line)]
                                       : rep.column_shifts[static_cast<std::size_t>(line)];
            if (++counter > 1) {
                violate(i, AuditRule::ShiftOnce, (horizontal ? "row " : "column ") + std::to_string(line));
            }
            if (horizontal) {
                row_spans[static_cast<std::size_t>(line)].push_back({lo, hi});
            }
        }
        try {
            s = advance(s, out);
        } catch (const Error& e) {
            throw Error(ErrorCode::ReplayMismatch, "spawn after move " + std::to_string(i) + " failed: " + e.what());
        }
        ++rep.audited_moves;
        if (s.goal_reached) {
            break;
        }
        if (!s.board.full()) {
            violate(i, AuditRule::Fullness, std::to_string(s.board.empty_count()) + " empty cells");
        }
        auto pairs = mergeable_neighbours(s.board, s.variant);
        if (pairs.size() > 1) {
            std::string where;
            for (const auto& [a, b] : pairs) {
                where += "(" + std::to_string(a.row) + "," + std::to_string(a.col) + ")-(" + std::to_string(b.row) +
                         "," + std::to_string(b.col) + ") ";
            }
            violate(i, AuditRule::OneMove, where);
        }
    }

    for (std::size_t c = 0; c + 1 < rep.column_shifts.size(); ++c) {
        if (rep.column_shifts[c] > 0 && rep.column_shifts[c + 1] > 0) {
            violate(rep.audited_moves, AuditRule::AdjacentColumns,
                    "columns " + std::to_string(c) + "," + std::to_string(c + 1));
        }
    }
    for (std::size_t r = 0; r + 1 < rep.row_shifts.size(); ++r) {
        if (rep.row_shifts[r] == 0 || rep.row_shifts[r + 1] == 0) {
            continue;
        }
        bool inside = std::any_of(regions.begin(), regions.end(), [&](const detail::Region& reg) {
            auto inside_rows = [&reg](std::size_t row) {
                return static_cast<int>(row) >= reg.row_lo && static_cast<int>(row) <= reg.row_hi;
            };
            auto spans_hit = [&reg](const std::vector<std::pair<int, int>>& spans) {
                return std::all_of(spans.begin(), spans.end(),
                                   [&reg](auto sp) { return sp.first <= reg.col_hi && sp.second >= reg.col_lo; });
            };
            return inside_rows(r) && inside_rows(r + 1) && spans_hit(row_spans[r]) && spans_hit(row_spans[r + 1]);
        });
        if (inside) {
            ++rep.allowed_adjacent_rows;
        } else {
            violate(rep.audited_moves, AuditRule::AdjacentRows, "rows " + std::to_string(r) + "," + std::to_string(r + 1));
        }
    }
    return rep;
}

inline AuditReport audit(const Instance& instance, const Trace& trace) { return audit(instance, trace.moves); }

// ---------------------------------------------------------------------------
// Equivalence

struct EquivalenceResult {
    bool sat = false;
    bool reachable = false;
    bool agree = false;
    bool inconclusive = false; // search ran out of budget
    bool shortcut = false;     // reachability shown by the canonical witness
    std::uint64_t states = 0;
};

inline EquivalenceResult equivalence_check(const CnfFormula& formula, const ReductionOptions& options,
                                           const SearchBudget& budget = {}, bool witness_shortcut = true) {
    EquivalenceResult r;
    auto witness = dpll(formula);
    r.sat = witness.has_value();
    Instance inst = compile(formula, options);
    if (witness && witness_shortcut) {
        Trace t = canonical_play(inst, *witness);
        if (t.reached_goal) {
            r.reachable = true;
            r.shortcut = true;
            r.agree = true;
            return r;
        }
    }
    SearchResult s = search(inst, budget);
    r.states = s.states;
    if (s.status == SearchStatus::BudgetExceeded) {
        r.inconclusive = true;
        r.agree = true;
        return r;
    }
    r.reachable = s.status == SearchStatus::Reached;
    r.agree = r.sat == r.reachable;
    return r;
}

} // namespace mergegame
