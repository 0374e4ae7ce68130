#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mergegame/board.hpp"
#include "mergegame/error.hpp"
#include "mergegame/variant.hpp"

namespace mergegame {

enum class Direction { Up, Down, Left, Right };

inline constexpr std::array<Direction, 4> kAllDirections = {Direction::Up, Direction::Down,
                                                             Direction::Left, Direction::Right};

constexpr char to_char(Direction d) {
    switch (d) {
    case Direction::Up: return 'U';
    case Direction::Down: return 'D';
    case Direction::Left: return 'L';
    case Direction::Right: return 'R';
    }
    return '?';
}

inline Direction direction_from_char(char c) {
    switch (c) {
    case 'U': case 'u': return Direction::Up;
    case 'D': case 'd': return Direction::Down;
    case 'L': case 'l': return Direction::Left;
    case 'R': case 'r': return Direction::Right;
    default: break;
    }
    throw Error(ErrorCode::FormatError, std::string("unknown direction '") + c + "'");
}

constexpr bool is_horizontal(Direction d) { return d == Direction::Left || d == Direction::Right; }

struct MergeEvent {
    Cell at;
    Face result = 0;

    bool operator==(const MergeEvent&) const = default;
};

struct MoveOutcome {
    Board board_after;
    std::uint64_t score_delta = 0;
    std::vector<MergeEvent> merges;
    bool moved = false;
};

namespace detail {

// Cells of one line ordered from the wall the move pushes toward.
inline std::vector<std::size_t> line_cells(const Board& board, Direction dir, int line) {
    std::vector<std::size_t> out;
    if (is_horizontal(dir)) {
        out.reserve(static_cast<std::size_t>(board.cols()));
        for (int k = 0; k < board.cols(); ++k) {
            int col = dir == Direction::Left ? k : board.cols() - 1 - k;
            out.push_back(board.index({line, col}));
        }
    } else {
        out.reserve(static_cast<std::size_t>(board.rows()));
        for (int k = 0; k < board.rows(); ++k) {
            int row = dir == Direction::Up ? k : board.rows() - 1 - k;
            out.push_back(board.index({row, line}));
        }
    }
    return out;
}

// Each collapse routine rewrites `w` (faces ordered from the wall, no blocks)
// in place and appends the positions of merge results to `merged_at`.

inline void collapse_slide(Variant variant, std::vector<Face>& w, std::vector<std::size_t>& merged_at) {
    std::vector<Face> tiles;
    tiles.reserve(w.size());
    for (Face v : w) {
        if (v != 0) {
            tiles.push_back(v);
        }
    }
    std::size_t out = 0;
    for (std::size_t i = 0; i < tiles.size(); ++i) {
        if (i + 1 < tiles.size()) {
            if (auto r = merge_result(variant, tiles[i], tiles[i + 1])) {
                w[out] = *r;
                merged_at.push_back(out);
                ++out;
                ++i;
                continue;
            }
        }
        w[out++] = tiles[i];
    }
    for (; out < w.size(); ++out) {
        w[out] = 0;
    }
}

inline void collapse_shift_by_one(Variant variant, std::vector<Face>& w,
                                  std::vector<std::size_t>& merged_at) {
    // `free_behind`: the cell nearer the wall is empty (or was just vacated),
    // so the current tile slides into it.
    bool free_behind = false;
    for (std::size_t i = 0; i < w.size(); ++i) {
        Face t = w[i];
        if (t == 0) {
            free_behind = true;
            continue;
        }
        if (i == 0) {
            free_behind = false;
            continue;
        }
        if (free_behind) {
            w[i - 1] = t;
            w[i] = 0;
            continue;
        }
        if (auto r = merge_result(variant, w[i - 1], t)) {
            w[i - 1] = *r;
            w[i] = 0;
            merged_at.push_back(i - 1);
            free_behind = true;
        }
    }
}

inline void collapse_saming(Variant variant, std::vector<Face>& w, std::vector<std::size_t>& merged_at) {
    std::vector<bool> merged(w.size(), false);
    for (std::size_t i = w.size(); i-- > 1;) {
        Face t = w[i];
        if (t == 0 || merged[i]) {
            continue;
        }
        Face neighbour = w[i - 1];
        if (neighbour != 0 && !merge_result(variant, neighbour, t)) {
            continue;
        }
        std::size_t j = i;
        while (j > 0 && w[j - 1] == 0) {
            --j;
        }
        if (j == 0) {
            w[0] = t;
            w[i] = 0;
            continue;
        }
        std::size_t s = j - 1;
        if (auto r = merge_result(variant, w[s], t); r && !merged[s]) {
            w[s] = *r;
            merged[s] = true;
            w[i] = 0;
            merged_at.push_back(s);
        } else if (j != i) {
            w[j] = t;
            w[i] = 0;
        }
    }
}

inline void collapse(Variant variant, std::vector<Face>& w, std::vector<std::size_t>& merged_at) {
    switch (variant.movement()) {
    case Movement::SlideToWall: collapse_slide(variant, w, merged_at); break;
    case Movement::ShiftByOne: collapse_shift_by_one(variant, w, merged_at); break;
    case Movement::SamingScan: collapse_saming(variant, w, merged_at); break;
    }
}

} // namespace detail

/// Collapse one line given in wall-first order. Blocks (Board::kBlock) split
/// the line into independent segments, each with the block acting as a wall.
inline std::vector<Face> collapse_line(Variant variant, std::vector<Face> line,
                                       std::vector<std::size_t>* merged_at = nullptr) {
    std::vector<std::size_t> scratch_merges;
    std::size_t start = 0;
    while (start < line.size()) {
        if (line[start] == Board::kBlock) {
            ++start;
            continue;
        }
        std::size_t end = start;
        while (end < line.size() && line[end] != Board::kBlock) {
            ++end;
        }
        std::vector<Face> segment(line.begin() + static_cast<std::ptrdiff_t>(start),
                                  line.begin() + static_cast<std::ptrdiff_t>(end));
        scratch_merges.clear();
        detail::collapse(variant, segment, scratch_merges);
        std::copy(segment.begin(), segment.end(), line.begin() + static_cast<std::ptrdiff_t>(start));
        if (merged_at) {
            for (std::size_t m : scratch_merges) {
                merged_at->push_back(start + m);
            }
        }
        start = end;
    }
    return line;
}

namespace detail {

// Collapse one line of `board` into `out`, copying the board on first change.
inline void move_line(const Board& board, Variant variant, Direction dir, int line, MoveOutcome& out,
                      std::vector<Face>& values, std::vector<std::size_t>& merged_at) {
    auto cells = line_cells(board, dir, line);
    values.resize(cells.size());
    bool any_tile = false;
    for (std::size_t k = 0; k < cells.size(); ++k) {
        values[k] = board.raw(cells[k]);
        any_tile = any_tile || (values[k] != 0 && values[k] != Board::kBlock);
    }
    if (!any_tile) {
        return;
    }
    merged_at.clear();
    auto result = collapse_line(variant, values, &merged_at);
    for (std::size_t k = 0; k < cells.size(); ++k) {
        if (result[k] != values[k]) {
            if (!out.moved) {
                out.board_after = board;
                out.moved = true;
            }
            out.board_after.raw(cells[k]) = result[k];
        }
    }
    for (std::size_t m : merged_at) {
        out.merges.push_back({board.cell_at(cells[m]), result[m]});
        out.score_delta += result[m];
    }
}

} // namespace detail

/// Rows and columns that can change under some move: those holding an empty
/// cell or a mergeable pair along them. Every other line is fixed by any move.
struct LineHints {
    std::vector<int> rows;
    std::vector<int> cols;
};

inline LineHints line_hints(const Board& board, Variant variant) {
    auto R = static_cast<std::size_t>(board.rows());
    auto C = static_cast<std::size_t>(board.cols());
    std::vector<char> row_hit(R, 0), col_hit(C, 0);
    for (std::size_t r = 0; r < R; ++r) {
        for (std::size_t c = 0; c < C; ++c) {
            Face v = board.raw(r * C + c);
            if (v == 0) {
                row_hit[r] = col_hit[c] = 1;
                continue;
            }
            if (v == Board::kBlock) {
                continue;
            }
            if (c + 1 < C) {
                Face w = board.raw(r * C + c + 1);
                if (w != Board::kBlock && w != 0 && merge_result(variant, v, w)) {
                    row_hit[r] = 1;
                }
            }
            if (r + 1 < R) {
                Face w = board.raw((r + 1) * C + c);
                if (w != Board::kBlock && w != 0 && merge_result(variant, v, w)) {
                    col_hit[c] = 1;
                }
            }
        }
    }
    LineHints h;
    for (std::size_t r = 0; r < R; ++r) {
        if (row_hit[r]) {
            h.rows.push_back(static_cast<int>(r));
        }
    }
    for (std::size_t c = 0; c < C; ++c) {
        if (col_hit[c]) {
            h.cols.push_back(static_cast<int>(c));
        }
    }
    return h;
}

/// Same result as apply_move(board, variant, dir) given the board's hints.
inline MoveOutcome apply_move(const Board& board, Variant variant, Direction dir, const LineHints& hints) {
    MoveOutcome out{Board(), 0, {}, false};
    std::vector<Face> values;
    std::vector<std::size_t> merged_at;
    for (int line : is_horizontal(dir) ? hints.rows : hints.cols) {
        detail::move_line(board, variant, dir, line, out, values, merged_at);
    }
    if (!out.moved) {
        out.board_after = board;
    }
    return out;
}

/// Pure move function: the result depends only on (board, variant, dir).
inline MoveOutcome apply_move(const Board& board, Variant variant, Direction dir) {
    return apply_move(board, variant, dir, line_hints(board, variant));
}

inline std::vector<Direction> legal_moves(const Board& board, Variant variant) {
    LineHints hints = line_hints(board, variant);
    std::vector<Direction> out;
    for (Direction d : kAllDirections) {
        if (apply_move(board, variant, d, hints).moved) {
            out.push_back(d);
        }
    }
    return out;
}

/// Full board (every non-block cell occupied) with no valid move.
inline bool is_forbidden(const Board& board, Variant variant) {
    return board.full() && legal_moves(board, variant).empty();
}

// ---------------------------------------------------------------------------
// Spawning

enum class LocatorRule {
    Exact,        // the anchor itself; must be empty
    FirstEmptyFrom, // first empty cell in row-major order starting at the anchor, wrapping
};

struct Locator {
    Cell anchor;
    LocatorRule rule = LocatorRule::FirstEmptyFrom;

    bool operator==(const Locator&) const = default;
};

struct ScriptedSpawn {
    Face face = 2;
    Locator where;

    bool operator==(const ScriptedSpawn&) const = default;
};

enum class SpawnKind { None, Scripted, DeterministicFirstEmpty, UniqueEmpty, Angel };

/// How the game places the tile that appears after every valid move.
///
/// `script` is the whole spawn sequence for Scripted. For UniqueEmpty it is an
/// optional trailing sequence consumed once the goal tile exists (the board is
/// no longer kept full at that point); when it runs out, no more tiles appear.
struct SpawnPolicy {
    SpawnKind kind = SpawnKind::None;
    Face face = 2;
    std::vector<ScriptedSpawn> script;

    static SpawnPolicy none() { return {}; }
    static SpawnPolicy scripted(std::vector<ScriptedSpawn> s) { return {SpawnKind::Scripted, 2, std::move(s)}; }
    static SpawnPolicy deterministic(Face f = 2) { return {SpawnKind::DeterministicFirstEmpty, f, {}}; }
    static SpawnPolicy unique_empty(Face f, std::vector<ScriptedSpawn> trailing = {}) {
        return {SpawnKind::UniqueEmpty, f, std::move(trailing)};
    }
    static SpawnPolicy angel() { return {SpawnKind::Angel, 2, {}}; }

    bool operator==(const SpawnPolicy&) const = default;
};

constexpr std::string_view name_of(SpawnKind kind) {
    switch (kind) {
    case SpawnKind::None: return "none";
    case SpawnKind::Scripted: return "scripted";
    case SpawnKind::DeterministicFirstEmpty: return "deterministic";
    case SpawnKind::UniqueEmpty: return "unique-empty";
    case SpawnKind::Angel: return "angel";
    }
    return "unknown";
}

/// Tile chosen by the player under the Angel policy.
struct AngelChoice {
    Face face = 2;
    Cell at;
};

struct GameState {
    Board board;
    Variant variant;
    std::shared_ptr<const SpawnPolicy> spawn = std::make_shared<const SpawnPolicy>();
    Face goal = 0;
    std::uint64_t running_score = 0;
    std::uint64_t move_count = 0;
    std::size_t script_cursor = 0;
    bool goal_reached = false;

    static GameState make(Board board, Variant variant, SpawnPolicy policy, Face goal) {
        GameState s;
        s.board = std::move(board);
        s.variant = variant;
        s.spawn = std::make_shared<const SpawnPolicy>(std::move(policy));
        s.goal = goal;
        s.goal_reached = goal != 0 && s.board.max_face() >= goal;
        return s;
    }
};

inline MoveOutcome apply_move(const GameState& state, Direction dir) {
    return apply_move(state.board, state.variant, dir);
}
inline std::vector<Direction> legal_moves(const GameState& state) {
    return legal_moves(state.board, state.variant);
}
inline bool is_forbidden(const GameState& state) { return is_forbidden(state.board, state.variant); }

inline Cell resolve_locator(const Board& board, const Locator& loc) {
    if (!board.contains(loc.anchor)) {
        throw Error(ErrorCode::AmbiguousLocator, "locator anchor outside the board");
    }
    if (loc.rule == LocatorRule::Exact) {
        if (!board.is_empty(loc.anchor)) {
            throw Error(ErrorCode::AmbiguousLocator, "exact locator cell is occupied");
        }
        return loc.anchor;
    }
    std::size_t n = board.size();
    std::size_t start = board.index(loc.anchor);
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t idx = (start + k) % n;
        if (board.raw(idx) == 0) {
            return board.cell_at(idx);
        }
    }
    throw Error(ErrorCode::NoEmptyCell, "no empty cell for locator");
}

/// Place the next tile according to the state's policy, updating `next`.
inline void spawn_in_place(GameState& next, const std::optional<AngelChoice>& angel = std::nullopt) {
    const GameState& state = next;
    const SpawnPolicy& policy = *state.spawn;
    if (policy.kind == SpawnKind::None) {
        return;
    }
    Board& board = next.board;
    if (board.empty_count() == 0) {
        throw Error(ErrorCode::NoEmptyCell, "board has no empty cell");
    }
    switch (policy.kind) {
    case SpawnKind::None: break;
    case SpawnKind::DeterministicFirstEmpty: {
        // leftmost column first, topmost within it
        for (int c = 0; c < board.cols(); ++c) {
            for (int r = 0; r < board.rows(); ++r) {
                if (board.is_empty({r, c})) {
                    board.set({r, c}, policy.face);
                    return;
                }
            }
        }
        break;
    }
    case SpawnKind::UniqueEmpty: {
        if (state.goal_reached && !policy.script.empty()) {
            if (state.script_cursor >= policy.script.size()) {
                return;
            }
            const auto& entry = policy.script[state.script_cursor];
            board.set(resolve_locator(board, entry.where), entry.face);
            ++next.script_cursor;
            return;
        }
        auto empties = board.empty_cells();
        if (empties.size() != 1) {
            throw Error(ErrorCode::AmbiguousLocator,
                        std::to_string(empties.size()) + " empty cells, unique-empty spawn needs exactly one");
        }
        board.set(empties.front(), policy.face);
        break;
    }
    case SpawnKind::Scripted: {
        if (state.script_cursor >= policy.script.size()) {
            throw Error(ErrorCode::ScriptExhausted, "spawn script has no entry left");
        }
        const auto& entry = policy.script[state.script_cursor];
        board.set(resolve_locator(board, entry.where), entry.face);
        ++next.script_cursor;
        break;
    }
    case SpawnKind::Angel: {
        if (!angel) {
            throw Error(ErrorCode::MissingChoice, "angel policy needs the player's tile choice");
        }
        if (!board.contains(angel->at) || !board.is_empty(angel->at)) {
            throw Error(ErrorCode::InvalidParameters, "angel tile must go on an empty cell");
        }
        if (!is_valid_face(state.variant, angel->face)) {
            throw Error(ErrorCode::InvalidParameters, "angel tile face invalid for variant");
        }
        board.set(angel->at, angel->face);
        break;
    }
    }
}

inline GameState spawn(const GameState& state, const std::optional<AngelChoice>& angel = std::nullopt) {
    GameState next = state;
    spawn_in_place(next, angel);
    return next;
}

/// Move phase (goal checked here) followed by the spawn.
inline GameState advance(const GameState& state, const MoveOutcome& outcome,
                         const std::optional<AngelChoice>& angel = std::nullopt) {
    GameState next;
    next.board = outcome.board_after;
    next.variant = state.variant;
    next.spawn = state.spawn;
    next.goal = state.goal;
    next.running_score = state.running_score + outcome.score_delta;
    next.move_count = state.move_count + 1;
    next.script_cursor = state.script_cursor;
    next.goal_reached = state.goal_reached;
    if (next.goal != 0 && !next.goal_reached) {
        for (const auto& m : outcome.merges) {
            if (m.result >= next.goal) {
                next.goal_reached = true;
                break;
            }
        }
    }
    spawn_in_place(next, angel);
    return next;
}

inline GameState step(const GameState& state, Direction dir,
                      const std::optional<AngelChoice>& angel = std::nullopt) {
    MoveOutcome outcome = apply_move(state, dir);
    if (!outcome.moved) {
        throw Error(ErrorCode::IllegalMove, std::string("move ") + to_char(dir) + " changes nothing");
    }
    return advance(state, outcome, angel);
}

/// End-of-game score: 3^(i+1) for every tile base*2^i, where base is 3 for
/// Threes and 5 for Fives. The two small base tiles score nothing.
inline std::uint64_t final_score_threes(const Board& board, Variant variant = Variant{VariantKind::Threes}) {
    Face base = variant.kind() == VariantKind::Fives ? 5 : 3;
    std::uint64_t total = 0;
    for (Face v : board.raw()) {
        if (v == Board::kBlock || !detail::is_scaled_power(v, base)) {
            continue;
        }
        int i = std::countr_zero(v / base);
        std::uint64_t points = 1;
        for (int k = 0; k <= i; ++k) {
            points *= 3;
        }
        total += points;
    }
    return total;
}

} // namespace mergegame
