#pragma once

// Compiler from 3-CNF formulas to full-board Make-T instances.
//
// Gadgets are laid out in a "gadget frame": x grows to the right, y grows
// upward, and the variable gadgets live at negative y below the literal and
// clause rows. Every gadget is a set of pair tiles (face 2 before variant
// substitution); every other cell holds the base pattern, which never merges.
// The compiled board starts full and has exactly one mergeable adjacent pair,
// so each legal move frees a single wall cell and the spawn is forced.

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "mergegame/board.hpp"
#include "mergegame/cnf.hpp"
#include "mergegame/engine.hpp"
#include "mergegame/error.hpp"
#include "mergegame/variant.hpp"

namespace mergegame {

/// Gadget-frame coordinate (x right, y up, negatives allowed).
struct Point {
    int x = 0;
    int y = 0;

    constexpr bool operator==(const Point&) const = default;
    constexpr auto operator<=>(const Point&) const = default;
};

// ---------------------------------------------------------------------------
// Normalization

/// Maps assignments between the input formula and its normalized form.
/// Normalized variables are the used input variables renumbered densely;
/// a variable is flipped when it never occurs positively.
struct FlipRecord {
    int original_vars = 0;
    std::vector<bool> flipped;      // [1..original_vars]
    std::vector<int> to_normalized; // [1..original_vars], 0 for unused variables
    std::vector<int> to_original;   // [1..normalized vars]

    bool is_identity() const {
        for (int v = 1; v <= original_vars; ++v) {
            if (flipped[static_cast<std::size_t>(v)] || to_normalized[static_cast<std::size_t>(v)] != v) {
                return false;
            }
        }
        return true;
    }

    std::vector<int> flipped_vars() const {
        std::vector<int> out;
        for (int v = 1; v <= original_vars; ++v) {
            if (flipped[static_cast<std::size_t>(v)]) {
                out.push_back(v);
            }
        }
        return out;
    }

    Assignment to_original_assignment(const Assignment& normalized) const {
        Assignment out(original_vars);
        for (int v = 1; v <= original_vars; ++v) {
            int nv = to_normalized[static_cast<std::size_t>(v)];
            bool value = nv != 0 && normalized.value(nv);
            out.set(v, flipped[static_cast<std::size_t>(v)] ? !value : value);
        }
        return out;
    }

    Assignment to_normalized_assignment(const Assignment& original) const {
        Assignment out(static_cast<int>(to_original.size()) - 1);
        for (std::size_t nv = 1; nv < to_original.size(); ++nv) {
            int v = to_original[nv];
            bool value = original.value(v);
            out.set(static_cast<int>(nv), flipped[static_cast<std::size_t>(v)] ? !value : value);
        }
        return out;
    }

    bool operator==(const FlipRecord&) const = default;
};

struct NormalizedFormula {
    CnfFormula formula;
    FlipRecord record;
};

inline NormalizedFormula normalize(const CnfFormula& input) {
    validate(input);
    if (input.clauses.empty()) {
        throw Error(ErrorCode::EmptyClauseList, "formula has no clauses");
    }
    auto n = static_cast<std::size_t>(input.num_vars);
    std::vector<int> positive(n + 1, 0);
    std::vector<bool> used(n + 1, false);
    for (const auto& clause : input.clauses) {
        for (const auto& lit : clause) {
            used[static_cast<std::size_t>(lit.var)] = true;
            if (lit.positive) {
                ++positive[static_cast<std::size_t>(lit.var)];
            }
        }
    }

    FlipRecord rec;
    rec.original_vars = input.num_vars;
    rec.flipped.assign(n + 1, false);
    rec.to_normalized.assign(n + 1, 0);
    rec.to_original.assign(1, 0);
    for (std::size_t v = 1; v <= n; ++v) {
        if (!used[v]) {
            continue;
        }
        rec.flipped[v] = positive[v] == 0;
        rec.to_original.push_back(static_cast<int>(v));
        rec.to_normalized[v] = static_cast<int>(rec.to_original.size()) - 1;
    }

    NormalizedFormula out;
    out.formula.num_vars = static_cast<int>(rec.to_original.size()) - 1;
    out.formula.clauses.reserve(input.clauses.size());
    for (const auto& clause : input.clauses) {
        Clause c{};
        for (std::size_t p = 0; p < 3; ++p) {
            auto v = static_cast<std::size_t>(clause[p].var);
            c[p] = {rec.to_normalized[v], rec.flipped[v] ? !clause[p].positive : clause[p].positive};
        }
        out.formula.clauses.push_back(c);
    }
    out.record = std::move(rec);
    return out;
}

// ---------------------------------------------------------------------------
// Layout

/// One literal occurrence; `k` numbers the occurrences of the same signed
/// literal in clause order starting at 1.
struct Occurrence {
    int var = 0;
    bool positive = true;
    int clause = 0;   // 1-based
    int position = 0; // 0..2
    int k = 0;

    bool operator==(const Occurrence&) const = default;
};

/// Offset sequences of the construction, indexed from 1. Entries outside a
/// sequence's range are unused and left at 0.
struct Layout {
    int n = 0;
    int m = 0;
    std::vector<int> k_plus;  // [1..n]
    std::vector<int> k_minus; // [1..n]
    std::vector<int> XV;      // [0..n]
    std::vector<int> YV;      // [0..n-1]
    std::vector<int> XL;      // [0..n+m]
    std::vector<int> YL;      // [1..m]
    std::vector<int> XT;      // [0..m]
    std::vector<int> YT;      // [1..m]
    std::vector<Occurrence> occurrences;

    int kp(int i) const { return k_plus[static_cast<std::size_t>(i)]; }
    int km(int i) const { return k_minus[static_cast<std::size_t>(i)]; }
    int xv(int i) const { return XV[static_cast<std::size_t>(i)]; }
    int yv(int i) const { return YV[static_cast<std::size_t>(i)]; }
    int xl(int i) const { return XL[static_cast<std::size_t>(i)]; }
    int yl(int j) const { return YL[static_cast<std::size_t>(j)]; }
    int xt(int j) const { return XT[static_cast<std::size_t>(j)]; }
    int yt(int j) const { return YT[static_cast<std::size_t>(j)]; }

    bool operator==(const Layout&) const = default;
};

inline Layout compute_layout(const CnfFormula& formula) {
    validate(formula);
    Layout L;
    L.n = formula.num_vars;
    L.m = static_cast<int>(formula.clauses.size());
    auto n = static_cast<std::size_t>(L.n);
    auto m = static_cast<std::size_t>(L.m);
    if (L.n < 1 || L.m < 1) {
        throw Error(ErrorCode::InvalidParameters, "layout needs at least one variable and one clause");
    }
    L.k_plus.assign(n + 1, 0);
    L.k_minus.assign(n + 1, 0);
    for (std::size_t j = 0; j < m; ++j) {
        for (std::size_t p = 0; p < 3; ++p) {
            const Literal& lit = formula.clauses[j][p];
            auto& counter = lit.positive ? L.k_plus : L.k_minus;
            int k = ++counter[static_cast<std::size_t>(lit.var)];
            L.occurrences.push_back({lit.var, lit.positive, static_cast<int>(j) + 1, static_cast<int>(p), k});
        }
    }
    for (std::size_t i = 1; i <= n; ++i) {
        if (L.k_plus[i] == 0) {
            throw Error(ErrorCode::InvalidParameters,
                        "variable " + std::to_string(i) + " never occurs positively; normalize first");
        }
    }

    L.XV.assign(n + 1, 0);
    for (std::size_t i = 1; i <= n; ++i) {
        L.XV[i] = L.XV[i - 1] + 3 * (L.k_plus[i] + L.k_minus[i]) + 7;
    }
    L.YV.assign(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        L.YV[i] = -6 * static_cast<int>(i);
    }
    L.XL.assign(n + m + 1, 0);
    for (std::size_t i = 0; i <= n; ++i) {
        L.XL[i] = L.XV[i];
    }
    for (std::size_t j = 1; j <= m; ++j) {
        L.XL[n + j] = L.XL[n + j - 1] + 25;
    }
    L.YL.assign(m + 1, 0);
    for (std::size_t j = 1; j <= m; ++j) {
        L.YL[j] = 12 * (static_cast<int>(j) - 1) + 4;
    }
    L.XT.assign(m + 1, 0);
    for (std::size_t j = 0; j <= m; ++j) {
        L.XT[j] = L.XL[n + j];
    }
    L.YT.assign(m + 1, 0);
    L.YT[1] = 12 * L.m + 12;
    for (std::size_t j = 2; j <= m; ++j) {
        L.YT[j] = L.YT[j - 1] + 15;
    }
    return L;
}

// ---------------------------------------------------------------------------
// Gadgets

enum class GadgetRole {
    VariableAB,      // truth choice pair
    VariableCD,      // first pair of the false branch
    VariableEF,      // second pair of the false branch
    LiteralAB,       // receives the vertical shift of its variable
    LiteralCD,       // forwards the vertical shift to the next occurrence
    LiteralEF,       // clause side: turns the selector shift into a collector shift
    LiteralGH,       // clause side: lined up by the literal row shift
    Activation,      // the pair merged by the very first move
    VariableLink,    // hands control from variable i to variable i+1
    ClauseLink,      // hands control from the last variable to the first clause
    ClauseSelector,  // chooses which literal of a clause is checked
    ClauseCollector, // gathers the checked literal into one row shift
    Goal,
    PotOfGold,
};

inline constexpr std::pair<GadgetRole, std::string_view> kRoleNames[] = {
    {GadgetRole::VariableAB, "variable-AB"},
    {GadgetRole::VariableCD, "variable-CD"},
    {GadgetRole::VariableEF, "variable-EF"},
    {GadgetRole::LiteralAB, "literal-AB"},
    {GadgetRole::LiteralCD, "literal-CD"},
    {GadgetRole::LiteralEF, "literal-EF"},
    {GadgetRole::LiteralGH, "literal-GH"},
    {GadgetRole::Activation, "activation"},
    {GadgetRole::VariableLink, "activation-variable"},
    {GadgetRole::ClauseLink, "activation-clause"},
    {GadgetRole::ClauseSelector, "clause-selector"},
    {GadgetRole::ClauseCollector, "clause-collector"},
    {GadgetRole::Goal, "goal"},
    {GadgetRole::PotOfGold, "pot-of-gold"},
};

constexpr std::string_view name_of(GadgetRole role) {
    for (const auto& [r, name] : kRoleNames) {
        if (r == role) {
            return name;
        }
    }
    return "unknown";
}

/// Identifies one gadget piece. Fields a role does not use stay at their defaults.
struct GadgetTag {
    GadgetRole role = GadgetRole::Activation;
    int var = 0;
    int sign = 0; // +1 / -1 for signed pieces
    int clause = 0;
    int position = -1;
    int k = 0;
    int index = 0;

    bool operator==(const GadgetTag&) const = default;
};

/// "literal-EF x2- c1 p0 k1", "clause-selector c3 #2", "goal", ...
inline std::string label_of(const GadgetTag& tag) {
    std::ostringstream os;
    os << name_of(tag.role);
    if (tag.var != 0) {
        os << " x" << tag.var;
        if (tag.sign > 0) {
            os << '+';
        } else if (tag.sign < 0) {
            os << '-';
        }
    }
    if (tag.clause != 0) {
        os << " c" << tag.clause;
    }
    if (tag.position >= 0) {
        os << " p" << tag.position;
    }
    if (tag.k != 0) {
        os << " k" << tag.k;
    }
    if (tag.index != 0) {
        os << " #" << tag.index;
    }
    return os.str();
}

inline GadgetTag parse_label(const std::string& label) {
    std::istringstream is(label);
    std::string word;
    is >> word;
    GadgetTag tag;
    bool found = false;
    for (const auto& [r, name] : kRoleNames) {
        if (name == word) {
            tag.role = r;
            found = true;
        }
    }
    if (!found) {
        throw Error(ErrorCode::FormatError, "unknown gadget role in label '" + label + "'");
    }
    try {
        while (is >> word) {
            if (word.size() < 2) {
                throw Error(ErrorCode::FormatError, "bad label token '" + word + "'");
            }
            std::string rest = word.substr(1);
            switch (word[0]) {
            case 'x':
                if (rest.back() == '+' || rest.back() == '-') {
                    tag.sign = rest.back() == '+' ? 1 : -1;
                    rest.pop_back();
                }
                tag.var = std::stoi(rest);
                break;
            case 'c': tag.clause = std::stoi(rest); break;
            case 'p': tag.position = std::stoi(rest); break;
            case 'k': tag.k = std::stoi(rest); break;
            case '#': tag.index = std::stoi(rest); break;
            default: throw Error(ErrorCode::FormatError, "bad label token '" + word + "'");
            }
        }
    } catch (const std::logic_error&) {
        throw Error(ErrorCode::FormatError, "bad number in label '" + label + "'");
    }
    return tag;
}

using PointPair = std::pair<Point, Point>;

/// Tiles of one gadget piece in the gadget frame. Pairs carry `face`, except
/// that a nonzero `partner_face` overrides the second cell of each pair.
/// `tiles` holds the odd non-pair cells (pot-of-gold rows).
struct GadgetPlacement {
    GadgetTag tag;
    Face face = 2;
    Face partner_face = 0;
    std::vector<PointPair> pairs;
    std::vector<std::pair<Point, Face>> tiles;

    std::vector<Point> cells() const {
        std::vector<Point> out;
        for (const auto& [a, b] : pairs) {
            out.push_back(a);
            out.push_back(b);
        }
        for (const auto& [p, f] : tiles) {
            out.push_back(p);
        }
        return out;
    }
};

/// Base-pattern tile at gadget cell (i, j).
inline Face base_pattern_face(int i, int j, Variant variant) {
    switch (variant.kind()) {
    case VariantKind::Threes: return 1;
    case VariantKind::Fibonacci: return 5;
    default: break;
    }
    auto mod3 = [](int v) { return ((v % 3) + 3) % 3; };
    return Face{1} << (3 * mod3(i) + mod3(j) + 3);
}

inline std::vector<GadgetPlacement> place_variable_gadgets(const Layout& L) {
    std::vector<GadgetPlacement> out;
    for (int i = 1; i <= L.n; ++i) {
        int X = L.xv(i - 1);
        int Y = L.yv(i - 1);
        int kp = L.kp(i);
        out.push_back({{GadgetRole::VariableAB, i}, 2, 0, {{{X + 1, Y + 1}, {X + 2, Y}}}, {}});
        out.push_back({{GadgetRole::VariableCD, i}, 2, 0, {{{X + 2, Y - 2}, {X + 1, Y - 3}}}, {}});
        out.push_back({{GadgetRole::VariableEF, i}, 2, 0, {{{X + 3 * kp + 5, Y - 2}, {X + 3 * kp + 4, Y - 3}}}, {}});
    }
    return out;
}

inline std::vector<GadgetPlacement> place_literal_gadgets(const Layout& L, const CnfFormula& formula) {
    (void)formula; // occurrences were extracted into the layout
    std::vector<GadgetPlacement> out;
    for (const auto& occ : L.occurrences) {
        int X = L.xl(occ.var - 1);
        int slot = occ.positive ? 3 * (occ.k - 1) : 3 * (L.kp(occ.var) + occ.k);
        int y = L.yl(occ.clause) + 4 * occ.position;
        int xc = L.xl(L.n + occ.clause - 1);
        int p = occ.position;
        GadgetTag tag{GadgetRole::LiteralAB, occ.var, occ.positive ? 1 : -1, occ.clause, p, occ.k, 0};
        out.push_back({tag, 2, 0, {{{X + slot + 1, y + 1}, {X + slot + 2, y}}}, {}});
        tag.role = GadgetRole::LiteralCD;
        out.push_back({tag, 2, 0, {{{X + slot + 4, y - 1}, {X + slot + 5, y}}}, {}});
        tag.role = GadgetRole::LiteralEF;
        out.push_back({tag, 2, 0, {{{xc + 6 * p + 1, y + 1}, {xc + 6 * p + 2, y + 2}}}, {}});
        tag.role = GadgetRole::LiteralGH;
        out.push_back({tag, 2, 0, {{{xc + 3 * p + 16, y + 1}, {xc + 3 * p + 18, y}}}, {}});
    }
    return out;
}

/// Link pairs that turn the last occurrence's vertical shift into the next
/// activation. The positive-side pair is mirrored when the variable has no
/// negative occurrence.
inline std::vector<GadgetPlacement> place_activation(const Layout& L, const CnfFormula& formula) {
    (void)formula;
    std::vector<GadgetPlacement> out;
    out.push_back({{GadgetRole::Activation}, 2, 0, {{{-3, 0}, {-2, 0}}}, {}});
    for (int i = 1; i <= L.n; ++i) {
        int X = L.xl(i - 1);
        int kp = L.kp(i);
        int km = L.km(i);
        int pos_col = X + 3 * (kp - 1) + 4;
        int neg_col = X + 3 * (kp + km) + 4;
        bool last = i == L.n;
        GadgetRole role = last ? GadgetRole::ClauseLink : GadgetRole::VariableLink;
        // Rows where the vertical shift is caught: below the gadget (shift up)
        // for i < n, above every literal (shift down) for the last variable.
        int catch_row = last ? 12 * L.m + 5 : L.yv(i - 1) - 7;
        int link_row = last ? 12 * L.m + 4 : L.yv(i - 1) - 6;
        if (km > 0) {
            out.push_back({{role, i, 1}, 2, 0, {{{pos_col, catch_row}, {pos_col + 1, link_row}}}, {}});
        } else {
            // With no negative occurrence the two link pairs would touch on the
            // link row; hang the positive one on the left of its column instead.
            out.push_back({{role, i, 1}, 2, 0, {{{pos_col, catch_row}, {pos_col - 1, link_row}}}, {}});
        }
        out.push_back({{role, i, -1}, 2, 0, {{{neg_col - 1, link_row}, {neg_col, catch_row}}}, {}});
    }
    return out;
}

inline std::vector<GadgetPlacement> place_clause_gadgets(const Layout& L) {
    std::vector<GadgetPlacement> out;
    for (int j = 1; j <= L.m; ++j) {
        int X = L.xt(j - 1);
        int Y = L.yt(j);
        const PointPair selectors[5] = {
            {{X + 17, Y - 7}, {X + 18, Y - 8}}, {{X + 17, Y + 2}, {X + 18, Y + 1}},
            {{X + 20, Y + 2}, {X + 21, Y + 1}}, {{X + 20, Y + 5}, {X + 21, Y + 4}},
            {{X + 23, Y + 5}, {X + 24, Y + 4}},
        };
        for (int s = 0; s < 5; ++s) {
            out.push_back({{GadgetRole::ClauseSelector, 0, 0, j, -1, 0, s + 1}, 2, 0, {selectors[s]}, {}});
        }
        const PointPair collectors[7] = {
            {{X + 1, Y + 13}, {X + 2, Y + 14}},  {{X + 4, Y + 14}, {X + 5, Y + 13}},
            {{X + 4, Y + 9}, {X + 5, Y + 10}},   {{X + 7, Y + 10}, {X + 8, Y + 11}},
            {{X + 10, Y + 11}, {X + 11, Y + 10}}, {{X + 10, Y + 6}, {X + 11, Y + 7}},
            {{X + 13, Y + 7}, {X + 14, Y + 8}},
        };
        for (int c = 0; c < 7; ++c) {
            out.push_back({{GadgetRole::ClauseCollector, 0, 0, j, -1, 0, c + 1}, 2, 0, {collectors[c]}, {}});
        }
    }
    return out;
}

struct PotOfGoldOptions {
    int p = 0; // extension width K = 2^p
    int q = 0; // trailing spawn count S = 2^q

    bool operator==(const PotOfGoldOptions&) const = default;
};

struct ReductionOptions {
    Variant variant{VariantKind::Cirulli2048};
    std::optional<Face> goal; // default per variant
    int margin = 3;
    std::optional<PotOfGoldOptions> pot_of_gold;
};

/// Faces a variant uses for pair tiles, spawns and the goal.
struct VariantFaces {
    Face pair;
    Face spawn;
    Face goal;
    Face goal_first;
    Face goal_second;
};

inline constexpr Face kDefaultGoal2048 = 8192;

inline VariantFaces variant_faces(const ReductionOptions& options) {
    switch (options.variant.kind()) {
    case VariantKind::Cirulli2048: {
        Face goal = options.goal.value_or(kDefaultGoal2048);
        if (!detail::is_power_of_two(goal)) {
            throw Error(ErrorCode::InvalidParameters, "goal must be a power of two");
        }
        if (goal <= 2048) {
            throw Error(ErrorCode::GoalTooSmall, "goal must exceed 2048, got " + std::to_string(goal));
        }
        return {2, 2, goal, goal / 2, goal / 2};
    }
    case VariantKind::Threes:
        if (options.goal && *options.goal != 12) {
            throw Error(ErrorCode::InvalidParameters, "Threes instances always target tile 12");
        }
        return {3, 1, 12, 6, 6};
    case VariantKind::Fibonacci:
        if (options.goal && *options.goal != 34) {
            throw Error(ErrorCode::InvalidParameters, "Fibonacci instances always target tile 34");
        }
        return {1, 1, 34, 13, 21};
    default:
        throw Error(ErrorCode::UnsupportedVariant,
                    "no reduction for variant " + std::string(name_of(options.variant)));
    }
}

/// The pair that becomes adjacent once the last clause check succeeds.
inline GadgetPlacement place_goal(const Layout& L, const ReductionOptions& options) {
    VariantFaces faces = variant_faces(options);
    int X = L.xt(L.m);
    int Y = L.yt(L.m);
    GadgetPlacement g{{GadgetRole::Goal}, faces.goal_first, 0, {{{X + 1, Y + 8}, {X + 2, Y + 7}}}, {}};
    if (faces.goal_second != faces.goal_first) {
        g.partner_face = faces.goal_second;
    }
    return g;
}

/// Leftmost gadget column of the board before any pot-of-gold extension.
inline int left_edge(int margin) { return -3 - margin; }

/// Trigger pair plus the two alternating rows in the K extension columns.
inline std::vector<GadgetPlacement> place_pot_of_gold(const Layout& L, int p, int q, int margin = 3) {
    if (p < 1 || p > 16 || q < 0) {
        throw Error(ErrorCode::InvalidParameters, "pot of gold needs p >= 1 and q >= 0");
    }
    int K = 1 << p;
    if (q >= K) {
        throw Error(ErrorCode::InvalidParameters, "pot of gold needs q < K");
    }
    int X = L.xt(L.m);
    int Y = L.yt(L.m);
    std::vector<GadgetPlacement> out;
    out.push_back({{GadgetRole::PotOfGold}, 2, 0, {{{X + 1, Y + 21}, {X + 2, Y + 20}}}, {}});
    GadgetPlacement rows{{GadgetRole::PotOfGold, 0, 0, 0, -1, 0, 1}, 0, 0, {}, {}};
    int first = left_edge(margin) - K;
    for (int e = 0; e < K; ++e) {
        bool even = e % 2 == 0;
        rows.tiles.push_back({{first + e, Y + 20}, even ? Face{8} : Face{16}});
        rows.tiles.push_back({{first + e, Y + 19}, even ? Face{32} : Face{8}});
    }
    out.push_back(std::move(rows));
    return out;
}

// ---------------------------------------------------------------------------
// Instances

/// board cell = (dy - y, x + dx)
struct Translation {
    int dx = 0;
    int dy = 0;

    Cell to_board(Point p) const { return {dy - p.y, p.x + dx}; }
    Point to_gadget(Cell c) const { return {c.col - dx, dy - c.row}; }

    bool operator==(const Translation&) const = default;
};

/// A gadget piece in board coordinates.
struct Annotation {
    GadgetTag tag;
    Face face = 0;
    std::vector<Cell> cells;

    std::string label() const { return label_of(tag); }

    bool operator==(const Annotation&) const = default;
};

struct InstanceMeta {
    CnfFormula original;
    NormalizedFormula normalized;
    Layout layout;
    Translation translation;
    std::optional<PotOfGoldOptions> pot_of_gold;
};

struct Instance {
    Board board;
    Variant variant;
    SpawnPolicy spawn;
    Face goal = 0;
    std::vector<Annotation> annotations;
    std::optional<InstanceMeta> meta;

    GameState initial_state() const { return GameState::make(board, variant, spawn, goal); }

    std::vector<const Annotation*> find(GadgetRole role) const {
        std::vector<const Annotation*> out;
        for (const auto& a : annotations) {
            if (a.tag.role == role) {
                out.push_back(&a);
            }
        }
        return out;
    }
};

/// Adjacent cell pairs whose tiles would combine under `variant`.
inline std::vector<std::pair<Cell, Cell>> mergeable_neighbours(const Board& board, Variant variant) {
    std::vector<std::pair<Cell, Cell>> out;
    for (int r = 0; r < board.rows(); ++r) {
        for (int c = 0; c < board.cols(); ++c) {
            Face a = board.face({r, c});
            if (a == 0) {
                continue;
            }
            if (c + 1 < board.cols() && merge_result(variant, a, board.face({r, c + 1}))) {
                out.push_back({{r, c}, {r, c + 1}});
            }
            if (r + 1 < board.rows() && merge_result(variant, a, board.face({r + 1, c}))) {
                out.push_back({{r, c}, {r + 1, c}});
            }
        }
    }
    return out;
}

inline std::vector<GadgetPlacement> all_placements(const NormalizedFormula& nf, const Layout& L,
                                                   const ReductionOptions& options) {
    std::vector<GadgetPlacement> all;
    auto append = [&all](std::vector<GadgetPlacement> v) {
        std::move(v.begin(), v.end(), std::back_inserter(all));
    };
    append(place_activation(L, nf.formula));
    append(place_variable_gadgets(L));
    append(place_literal_gadgets(L, nf.formula));
    append(place_clause_gadgets(L));
    all.push_back(place_goal(L, options));
    if (options.pot_of_gold) {
        append(place_pot_of_gold(L, options.pot_of_gold->p, options.pot_of_gold->q, options.margin));
    }
    return all;
}

/// Extension cells just above and below the two pot-of-gold rows get faces
/// from 64..2048 that differ from every orthogonal neighbour; everything else
/// in the extension keeps the base pattern, which stays merge-free when a
/// single row or column is shifted. The three margin cells at the seam are
/// chosen so the cascade tiles 16..16K never merge with them, before or after
/// the row shift that starts the cascade.
inline void settle_pot_of_gold(Board& board, const Translation& tr, const std::map<Point, Face>& fixed, int ext_lo,
                               int ext_hi, int yt) {
    Face top_cascade = Face{16} * static_cast<Face>(ext_hi - ext_lo + 1);
    auto at = [&](int x, int y) { return tr.to_board({x, y}); };
    auto clashes = [&board](Cell c, Face f) {
        const Cell around[4] = {{c.row - 1, c.col}, {c.row + 1, c.col}, {c.row, c.col - 1}, {c.row, c.col + 1}};
        for (Cell n : around) {
            if (board.contains(n) && board.face(n) == f) {
                return true;
            }
        }
        return false;
    };
    auto pick = [&](Cell c, auto&& allowed) {
        for (Face f = 8; f <= (Face{1} << 40); f *= 2) {
            if (allowed(f) && !clashes(c, f)) {
                board.set(c, f);
                return;
            }
        }
    };
    for (int x = ext_lo; x <= ext_hi; ++x) {
        for (int y : {yt + 18, yt + 21}) {
            if (fixed.count({x, y}) == 0) {
                pick(at(x, y), [](Face f) { return f >= 64; });
            }
        }
    }
    int seam = ext_hi + 1;
    Face after_up = board.face(at(seam + 1, yt + 21));
    Face after_down = board.face(at(seam + 1, yt + 19));
    pick(at(seam, yt + 20), [&](Face f) {
        return (f < 16 || f > top_cascade) && f != after_up && f != after_down;
    });
    Face v = board.face(at(seam, yt + 20));
    for (int y : {yt + 19, yt + 21}) {
        pick(at(seam, y), [&](Face f) { return f != 16 && f != v; });
    }
}

inline Instance compile(const CnfFormula& formula, const ReductionOptions& options) {
    if (options.margin < 3) {
        throw Error(ErrorCode::InvalidParameters, "margin must be at least 3");
    }
    VariantFaces faces = variant_faces(options);
    if (options.pot_of_gold && options.variant.kind() != VariantKind::Cirulli2048) {
        throw Error(ErrorCode::InvalidParameters, "pot of gold is only defined for 2048");
    }

    NormalizedFormula nf = normalize(formula);
    Layout L = compute_layout(nf.formula);
    std::vector<GadgetPlacement> placements = all_placements(nf, L, options);

    // Bounding box of the gadgets, widened by the margin; the pot-of-gold rows
    // sit in extra columns flush with the left wall.
    std::map<Point, Face> fixed;
    int min_x = 0, max_x = 0, min_y = 0, max_y = 0;
    bool first = true;
    for (const auto& g : placements) {
        auto place = [&](Point pt, Face f, bool counts_for_box) {
            if (!fixed.emplace(pt, f).second) {
                throw Error(ErrorCode::OverlappingGadgets,
                            "cell (" + std::to_string(pt.x) + "," + std::to_string(pt.y) + ") used twice (" +
                                label_of(g.tag) + ")");
            }
            if (!counts_for_box) {
                return;
            }
            if (first) {
                min_x = max_x = pt.x;
                min_y = max_y = pt.y;
                first = false;
            }
            min_x = std::min(min_x, pt.x);
            max_x = std::max(max_x, pt.x);
            min_y = std::min(min_y, pt.y);
            max_y = std::max(max_y, pt.y);
        };
        for (const auto& [a, b] : g.pairs) {
            Face fa = g.face == 2 ? faces.pair : g.face;
            Face fb = g.partner_face != 0 ? g.partner_face : fa;
            place(a, fa, true);
            place(b, fb, true);
        }
        for (const auto& [pt, f] : g.tiles) {
            place(pt, f, false);
        }
    }
    int left = min_x - options.margin;
    int right = max_x + options.margin;
    int bottom = min_y - options.margin;
    int top = max_y + options.margin;
    if (options.pot_of_gold) {
        left -= 1 << options.pot_of_gold->p;
    }

    Translation tr{-left, top};
    Board board(top - bottom + 1, right - left + 1);
    for (int row = 0; row < board.rows(); ++row) {
        for (int col = 0; col < board.cols(); ++col) {
            Point pt = tr.to_gadget({row, col});
            auto it = fixed.find(pt);
            board.set({row, col}, it != fixed.end() ? it->second : base_pattern_face(pt.x, pt.y, options.variant));
        }
    }

    if (options.pot_of_gold) {
        settle_pot_of_gold(board, tr, fixed, left, left_edge(options.margin) - 1, L.yt(L.m));
    }

    Instance inst;
    inst.variant = options.variant;
    inst.goal = faces.goal;
    std::vector<ScriptedSpawn> trailing;
    if (options.pot_of_gold) {
        int S = 1 << options.pot_of_gold->q;
        Cell anchor = tr.to_board({left, L.yt(L.m) + 20});
        trailing.assign(static_cast<std::size_t>(S), ScriptedSpawn{faces.pair, {anchor, LocatorRule::FirstEmptyFrom}});
    }
    inst.spawn = SpawnPolicy::unique_empty(faces.spawn, std::move(trailing));
    for (const auto& g : placements) {
        Annotation a{g.tag, g.face == 2 ? faces.pair : g.face, {}};
        for (Point pt : g.cells()) {
            a.cells.push_back(tr.to_board(pt));
        }
        inst.annotations.push_back(std::move(a));
    }

    auto touching = mergeable_neighbours(board, options.variant);
    if (touching.size() != 1) {
        std::string where;
        for (const auto& [a, b] : touching) {
            where += " (" + std::to_string(a.row) + "," + std::to_string(a.col) + ")-(" + std::to_string(b.row) +
                     "," + std::to_string(b.col) + ") faces " + std::to_string(board.face(a));
        }
        bool goal_involved = std::any_of(touching.begin(), touching.end(), [&](const auto& pr) {
            Face f = board.face(pr.first);
            return f == faces.goal_first || f == faces.goal_second;
        });
        if (goal_involved && options.variant.kind() == VariantKind::Cirulli2048) {
            throw Error(ErrorCode::InvalidParameters,
                        "goal tiles touch equal base-pattern tiles; use a goal of at least 8192:" + where);
        }
        throw Error(ErrorCode::OverlappingGadgets,
                    "expected exactly one mergeable pair at start, found " + std::to_string(touching.size()) +
                        ":" + where);
    }

    inst.board = std::move(board);
    inst.meta = InstanceMeta{formula, std::move(nf), std::move(L), tr, options.pot_of_gold};
    return inst;
}

/// Rebuild the meta block of a loaded instance from its formula text.
inline InstanceMeta rebuild_meta(const CnfFormula& original, Translation tr,
                                 std::optional<PotOfGoldOptions> pot = std::nullopt) {
    NormalizedFormula nf = normalize(original);
    Layout L = compute_layout(nf.formula);
    return InstanceMeta{original, std::move(nf), std::move(L), tr, pot};
}

} // namespace mergegame
