// Acceptance checks, one PASS/FAIL line each. Exit status is the number of failures.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "mergegame/solver.hpp"

using namespace mergegame;
using fixtures::lit;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

ReductionOptions with_variant(VariantKind k, std::optional<Face> goal = std::nullopt) {
    ReductionOptions o;
    o.variant = Variant{k};
    o.goal = goal;
    return o;
}

Outcome example_end_to_end() {
    auto t0 = std::chrono::steady_clock::now();
    Instance inst = compile(fixtures::example(), with_variant(VariantKind::Cirulli2048, 4096));
    SearchResult r = search(inst);
    double dt = seconds_since(t0);
    if (r.status != SearchStatus::Reached || !r.trace) {
        return {false, std::string("search: ") + std::string(name_of(r.status))};
    }
    Trace t = replay(inst, r.trace->moves, true);
    bool tile = !t.snapshots.empty() && t.snapshots.back().max_face() >= 4096;
    std::ostringstream os;
    os << inst.board.rows() << "x" << inst.board.cols() << " board, " << t.moves.size() << " moves, " << r.states
       << " states, " << dt << " s";
    return {t.reached_goal && tile && dt < 60.0, os.str()};
}

Outcome unsat_control() {
    auto t0 = std::chrono::steady_clock::now();
    Instance inst = compile(fixtures::unsat8(), ReductionOptions{});
    SearchResult r = search(inst);
    std::ostringstream os;
    os << name_of(r.status) << ", " << r.states << " states, " << inst.board.rows() << "x" << inst.board.cols()
       << ", goal " << inst.goal << ", " << seconds_since(t0) << " s";
    return {r.status == SearchStatus::Unreachable && !dpll(fixtures::unsat8()), os.str()};
}

std::vector<CnfFormula> random_suite() {
    std::mt19937_64 rng(20240601);
    std::vector<CnfFormula> out;
    for (int i = 0; i < 50; ++i) {
        out.push_back(fixtures::random_formula(rng, 4, 4));
    }
    return out;
}

Outcome sat_equivalence() {
    int agree = 0, disagree = 0, inconclusive = 0, sat = 0;
    for (const auto& f : random_suite()) {
        auto r = equivalence_check(f, ReductionOptions{}, {}, false);
        sat += r.sat ? 1 : 0;
        if (r.inconclusive) {
            ++inconclusive;
        } else if (r.agree) {
            ++agree;
        } else {
            ++disagree;
        }
    }
    std::ostringstream os;
    os << agree << " agree, " << disagree << " disagree, " << inconclusive << " budget-exceeded (" << sat
       << " satisfiable)";
    return {disagree == 0 && agree > 0, os.str()};
}

Outcome invariant_audit() {
    std::vector<CnfFormula> fixtures_list = {fixtures::example(), fixtures::single(),
                                             CnfFormula{3, {{lit(1), lit(-2), lit(3)}, {lit(-1), lit(-2), lit(3)}}}};
    for (const auto& f : random_suite()) {
        fixtures_list.push_back(f);
    }
    int audited = 0, failures = 0;
    std::string first_failure;
    for (const auto& f : fixtures_list) {
        auto w = dpll(f);
        if (!w) {
            continue;
        }
        for (VariantKind k : {VariantKind::Cirulli2048, VariantKind::Threes, VariantKind::Fibonacci}) {
            Instance inst = compile(f, with_variant(k));
            Trace t = canonical_play(inst, *w);
            AuditReport rep = audit(inst, t);
            ++audited;
            bool ok = t.reached_goal && rep.fullness_ok && rep.one_move_ok && rep.shift_once_ok &&
                      rep.adjacent_column_ok && rep.adjacent_row_ok && rep.violations.empty();
            if (!ok) {
                ++failures;
                if (first_failure.empty()) {
                    first_failure = "; first failure on " + std::string(name_of(k)) +
                                    (rep.violations.empty() ? "" : ": " + std::string(name_of(rep.violations[0].rule)));
                }
            }
        }
    }
    std::ostringstream os;
    os << audited << " canonical traces audited, " << failures << " failing" << first_failure;
    return {failures == 0 && audited > 0, os.str()};
}

Outcome conservation() {
    std::mt19937_64 rng(1000);
    const std::vector<std::pair<VariantKind, std::vector<Face>>> kinds = {
        {VariantKind::Cirulli2048, {2, 4, 8, 16, 32, 64}},
        {VariantKind::Saming2048, {2, 4, 8, 16}},
        {VariantKind::Game1024, {2, 4, 8, 16}},
        {VariantKind::Threes, {1, 2, 3, 6, 12}},
        {VariantKind::Fibonacci, {1, 2, 3, 5, 8, 13, 21}},
    };
    int cases = 0, bad = 0, merges = 0;
    for (int i = 0; i < 1000; ++i) {
        const auto& [kind, faces] = kinds[static_cast<std::size_t>(i) % kinds.size()];
        Variant v{kind};
        std::uniform_int_distribution<int> side(1, 6);
        Board b(side(rng), side(rng));
        std::uniform_int_distribution<std::size_t> pick(0, faces.size());
        for (int r = 0; r < b.rows(); ++r) {
            for (int c = 0; c < b.cols(); ++c) {
                std::size_t k = pick(rng);
                if (k < faces.size()) {
                    b.set({r, c}, faces[k]);
                }
            }
        }
        Direction d = kAllDirections[std::uniform_int_distribution<std::size_t>(0, 3)(rng)];
        MoveOutcome out = apply_move(b, v, d);
        const Board& after = out.moved ? out.board_after : b;
        ++cases;
        merges += static_cast<int>(out.merges.size());
        if (after.face_sum() != b.face_sum()) {
            ++bad;
        }
    }
    std::ostringstream os;
    os << cases << " cases, " << merges << " merges, " << bad << " sum mismatches";
    return {bad == 0 && cases == 1000, os.str()};
}

Outcome variant_substitution() {
    std::ostringstream os;
    bool ok = true;
    for (auto [kind, goal] : {std::pair{VariantKind::Threes, Face{12}}, std::pair{VariantKind::Fibonacci, Face{34}}}) {
        Instance inst = compile(fixtures::example(), with_variant(kind));
        SearchResult r = search(inst);
        bool reached = r.status == SearchStatus::Reached && r.trace;
        Face top = 0;
        if (reached) {
            Trace t = replay(inst, r.trace->moves, true);
            reached = t.reached_goal;
            top = t.snapshots.back().max_face();
        }
        ok = ok && reached && inst.goal == goal && top == goal;
        os << name_of(kind) << ": goal " << inst.goal << ", largest tile " << top << " (" << name_of(r.status)
           << "); ";
    }
    return {ok, os.str()};
}

Outcome pot_of_gold() {
    ReductionOptions o;
    o.pot_of_gold = PotOfGoldOptions{3, 2};
    Instance inst = compile(fixtures::example(), o);
    auto w = dpll(fixtures::example());
    std::vector<Direction> moves = canonical_moves(inst, *w);
    Trace t = replay(inst, moves, true);
    const Board& end = t.snapshots.back();
    const auto& meta = *inst.meta;
    int row = meta.translation.to_board({0, meta.layout.yt(meta.layout.m) + 20}).row;

    // the last move is one of log K = 3 right shifts and creates the 128
    std::size_t rights = 0;
    for (std::size_t i = moves.size(); i-- > 0 && moves[i] == Direction::Right;) {
        ++rights;
    }
    Board before = t.snapshots[t.snapshots.size() - 2];
    MoveOutcome last = apply_move(GameState::make(before, inst.variant, SpawnPolicy::none(), 0), Direction::Right);
    int col128 = -1;
    for (const auto& m : last.merges) {
        if (m.result == 128 && m.at.row == row) {
            col128 = m.at.col;
        }
    }
    int big_left = 0;
    for (int c = 0; c < col128; ++c) {
        big_left += end.face({row, c}) >= 16 ? 1 : 0;
    }
    std::ostringstream os;
    os << rights << " final right moves, 128 at column " << col128 << ", " << big_left
       << " tiles >= 16 left of it, score " << t.final_score;
    return {t.reached_goal && rights == 3 && col128 >= 0 && end.face({row, col128}) == 128 && big_left == 0,
            os.str()};
}

Outcome size_bound() {
    // n variables, m clauses, each variable used positively at least once
    auto family = [](int n, int m) {
        CnfFormula f{n, {}};
        for (int j = 0; j < m; ++j) {
            int a = j % n + 1, b = (j + 1) % n + 1, c = (j + 2) % n + 1;
            f.clauses.push_back({lit(a), lit(-b), lit(c)});
        }
        return f;
    };
    std::vector<double> rows, cols;
    std::ostringstream os;
    for (int nm : {4, 6, 8}) {
        Instance inst = compile(family(nm / 2, nm / 2), ReductionOptions{});
        rows.push_back(inst.board.rows() / static_cast<double>(nm));
        cols.push_back(inst.board.cols() / static_cast<double>(nm));
        os << "n+m=" << nm << ": " << inst.board.rows() << "x" << inst.board.cols() << "; ";
    }
    auto spread = [](const std::vector<double>& v) {
        auto [lo, hi] = std::minmax_element(v.begin(), v.end());
        return *hi / *lo;
    };
    os << "side/(n+m) spread rows " << spread(rows) << ", cols " << spread(cols);
    return {spread(rows) <= 2.0 && spread(cols) <= 2.0, os.str()};
}

Outcome budget_formula() { return {move_budget(2048, 4) == 8192, "move_budget(2048, 4) = " + std::to_string(move_budget(2048, 4))}; }

} // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
        {"example formula solved end to end", example_end_to_end},
        {"unsatisfiable control exhausts", unsat_control},
        {"search agrees with DPLL on 50 random formulas", sat_equivalence},
        {"canonical traces pass the invariant audit", invariant_audit},
        {"tile sum conserved on 1000 random moves", conservation},
        {"Threes reaches 12 and Fibonacci reaches 34", variant_substitution},
        {"pot of gold cascades into one 128", pot_of_gold},
        {"board sides grow linearly", size_bound},
        {"move budget formula", budget_formula},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o{false, ""};
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failures += o.pass ? 0 : 1;
        std::printf("%s %zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str());
        std::fflush(stdout);
    }
    return failures;
}
