#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "mergegame/engine.hpp"

using namespace mergegame;

namespace {

const Variant kCirulli{VariantKind::Cirulli2048};
const Variant kThrees{VariantKind::Threes};
const Variant kSaming{VariantKind::Saming2048};
const Variant kFib{VariantKind::Fibonacci};
const Variant kFives{VariantKind::Fives};

Board row_board(const std::vector<Face>& row) {
    Board b(1, static_cast<int>(row.size()));
    for (std::size_t c = 0; c < row.size(); ++c) {
        if (row[c] != 0) {
            b.set({0, static_cast<int>(c)}, row[c]);
        }
    }
    return b;
}

std::vector<Face> row_of(const Board& b) {
    std::vector<Face> out;
    for (int c = 0; c < b.cols(); ++c) {
        out.push_back(b.face({0, c}));
    }
    return out;
}

// Hand-written single-line oracles, wall at index 0. They follow the rule
// statements directly and share no code with the engine.
std::vector<Face> oracle_slide(Variant v, const std::vector<Face>& in) {
    std::vector<Face> out;
    bool last_fresh = false;
    for (Face t : in) {
        if (t == 0) {
            continue;
        }
        if (!out.empty() && !last_fresh && merge_result(v, out.back(), t)) {
            out.back() = *merge_result(v, out.back(), t);
            last_fresh = true;
        } else {
            out.push_back(t);
            last_fresh = false;
        }
    }
    out.resize(in.size(), 0);
    return out;
}

std::vector<Face> oracle_shift_one(Variant v, std::vector<Face> w) {
    std::vector<bool> fresh(w.size(), false);
    for (std::size_t i = 1; i < w.size(); ++i) {
        if (w[i] == 0) {
            continue;
        }
        if (w[i - 1] == 0) {
            std::swap(w[i - 1], w[i]);
        } else if (!fresh[i - 1] && merge_result(v, w[i - 1], w[i])) {
            w[i - 1] = *merge_result(v, w[i - 1], w[i]);
            w[i] = 0;
            fresh[i - 1] = true;
        }
    }
    return w;
}

// Scan from the far end; each tile slides to its nearest neighbour toward the
// wall and merges with it unless that neighbour was itself produced this move.
std::vector<Face> oracle_saming(Variant v, std::vector<Face> w) {
    std::vector<bool> fresh(w.size(), false);
    for (std::size_t i = w.size(); i-- > 1;) {
        if (w[i] == 0 || fresh[i]) {
            continue;
        }
        std::size_t j = i;
        while (j > 0 && w[j - 1] == 0) {
            --j;
        }
        if (j > 0 && !fresh[j - 1] && merge_result(v, w[j - 1], w[i])) {
            w[j - 1] = *merge_result(v, w[j - 1], w[i]);
            fresh[j - 1] = true;
            w[i] = 0;
        } else if (j != i) {
            w[j] = w[i];
            w[i] = 0;
        }
    }
    return w;
}

std::vector<Face> oracle(Variant v, const std::vector<Face>& w) {
    switch (v.movement()) {
    case Movement::ShiftByOne: return oracle_shift_one(v, w);
    case Movement::SamingScan: return oracle_saming(v, w);
    default: return oracle_slide(v, w);
    }
}

std::vector<Face> faces_for(Variant v) {
    switch (v.kind()) {
    case VariantKind::Threes: return {1, 2, 3, 6, 12, 24};
    case VariantKind::Fives: return {2, 3, 5, 10, 20};
    case VariantKind::Fibonacci: return {1, 2, 3, 5, 8, 13, 21};
    default: return {2, 4, 8, 16, 32};
    }
}

Board random_board(std::mt19937_64& rng, Variant v, int rows, int cols, double fill) {
    auto faces = faces_for(v);
    std::uniform_int_distribution<std::size_t> pick(0, faces.size() - 1);
    std::bernoulli_distribution occupied(fill);
    Board b(rows, cols);
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            if (occupied(rng)) {
                b.set({r, c}, faces[pick(rng)]);
            }
        }
    }
    return b;
}

} // namespace

TEST(MergeResult, SpecExamples) {
    EXPECT_EQ(merge_result(kCirulli, 2, 2), 4u);
    EXPECT_EQ(merge_result(kThrees, 1, 2), 3u);
    EXPECT_EQ(merge_result(kThrees, 2, 1), 3u);
    EXPECT_FALSE(merge_result(kThrees, 1, 1));
    EXPECT_FALSE(merge_result(kThrees, 2, 2));
    EXPECT_EQ(merge_result(kThrees, 3, 3), 6u);
    EXPECT_EQ(merge_result(kFib, 1, 1), 2u);
    EXPECT_EQ(merge_result(kFib, 13, 21), 34u);
    EXPECT_FALSE(merge_result(kFib, 5, 13));
    EXPECT_EQ(merge_result(kFives, 2, 3), 5u);
    EXPECT_EQ(merge_result(kFives, 5, 5), 10u);
    EXPECT_FALSE(merge_result(kCirulli, 2, 4));
    EXPECT_FALSE(merge_result(kCirulli, 0, 0));
}

TEST(MergeResult, Symmetric) {
    for (Variant v : {kCirulli, kThrees, kFib, kFives, kSaming}) {
        auto faces = faces_for(v);
        for (Face a : faces) {
            for (Face b : faces) {
                EXPECT_EQ(merge_result(v, a, b), merge_result(v, b, a)) << a << "," << b;
            }
        }
    }
}

TEST(ApplyMove, CirulliRowOfFourTwos) {
    auto out = apply_move(row_board({2, 2, 2, 2}), kCirulli, Direction::Left);
    ASSERT_TRUE(out.moved);
    EXPECT_EQ(row_of(out.board_after), (std::vector<Face>{4, 4, 0, 0}));
    EXPECT_EQ(out.score_delta, 8u);
    EXPECT_EQ(out.merges.size(), 2u);
}

TEST(ApplyMove, CirulliMergedTileDoesNotMergeAgain) {
    auto out = apply_move(row_board({2, 2, 4, 0}), kCirulli, Direction::Left);
    EXPECT_EQ(row_of(out.board_after), (std::vector<Face>{4, 4, 0, 0}));
}

TEST(ApplyMove, CirulliPairsFromTheWall) {
    auto out = apply_move(row_board({2, 2, 2, 0}), kCirulli, Direction::Right);
    EXPECT_EQ(row_of(out.board_after), (std::vector<Face>{0, 0, 2, 4}));
}

TEST(ApplyMove, ThreesWallTileBlocked) {
    auto out = apply_move(row_board({2, 1, 0, 0}), kThrees, Direction::Left);
    EXPECT_EQ(row_of(out.board_after), (std::vector<Face>{3, 0, 0, 0}));
}

TEST(ApplyMove, ThreesTriple) {
    auto out = apply_move(row_board({3, 3, 3, 0}), kThrees, Direction::Left);
    EXPECT_EQ(row_of(out.board_after), (std::vector<Face>{6, 3, 0, 0}));
    EXPECT_EQ(out.score_delta, 6u);
}

TEST(ApplyMove, ThreesShiftsOnlyOneCell) {
    auto out = apply_move(row_board({0, 0, 0, 3}), kThrees, Direction::Left);
    EXPECT_EQ(row_of(out.board_after), (std::vector<Face>{0, 0, 3, 0}));
}

TEST(ApplyMove, SamingMergedTileStays) {
    auto out = apply_move(row_board({0, 2, 2, 0}), kSaming, Direction::Left);
    EXPECT_EQ(row_of(out.board_after), (std::vector<Face>{0, 4, 0, 0}));
}

TEST(ApplyMove, EmptyBoardNeverMoves) {
    Board b(4, 4);
    for (Variant v : {kCirulli, kThrees, kSaming, kFib}) {
        for (Direction d : kAllDirections) {
            EXPECT_FALSE(apply_move(b, v, d).moved);
        }
    }
}

TEST(ApplyMove, BlocksActAsWalls) {
    Board b = row_board({0, 2, 0, 0, 2});
    b.set_block({0, 2});
    auto out = apply_move(b, kCirulli, Direction::Left);
    EXPECT_EQ(out.board_after.raw(0), 2u);
    EXPECT_TRUE(out.board_after.is_block({0, 2}));
    EXPECT_EQ(out.board_after.raw(3), 2u);
    EXPECT_EQ(out.board_after.raw(4), 0u);
}

TEST(ApplyMove, VerticalMatchesTransposedRow) {
    Board col(4, 1);
    col.set({1, 0}, 2);
    col.set({3, 0}, 2);
    auto up = apply_move(col, kCirulli, Direction::Up);
    EXPECT_EQ(up.board_after.face({0, 0}), 4u);
    auto down = apply_move(col, kCirulli, Direction::Down);
    EXPECT_EQ(down.board_after.face({3, 0}), 4u);
    EXPECT_EQ(down.merges.front().at, (Cell{3, 0}));
}

TEST(ApplyMove, MatchesLineOracle) {
    std::mt19937_64 rng(7);
    for (Variant v : {kCirulli, kThrees, kSaming, kFib, kFives}) {
        for (int t = 0; t < 400; ++t) {
            std::uniform_int_distribution<int> len(1, 7);
            Board b = random_board(rng, v, 1, len(rng), 0.6);
            auto w = row_of(b);
            auto out = apply_move(b, v, Direction::Left);
            auto expect = oracle(v, w);
            EXPECT_EQ(out.moved ? row_of(out.board_after) : w, expect) << name_of(v);
            EXPECT_EQ(out.moved, expect != w);
            std::vector<Face> rev(w.rbegin(), w.rend());
            auto right = apply_move(b, v, Direction::Right);
            auto er = oracle(v, rev);
            std::reverse(er.begin(), er.end());
            EXPECT_EQ(right.moved ? row_of(right.board_after) : w, er) << name_of(v);
        }
    }
}

TEST(LegalMoves, FullCheckerboardIsForbidden) {
    Board b(4, 4);
    for (int r = 0; r < 4; ++r) {
        for (int c = 0; c < 4; ++c) {
            b.set({r, c}, (r + c) % 2 == 0 ? 2 : 4);
        }
    }
    EXPECT_TRUE(legal_moves(b, kCirulli).empty());
    EXPECT_TRUE(is_forbidden(b, kCirulli));
    b.set({0, 1}, 2);
    EXPECT_FALSE(is_forbidden(b, kCirulli));
    EXPECT_EQ(legal_moves(b, kCirulli).size(), 4u);
}

TEST(LegalMoves, CentreTileMovesEverywhere) {
    Board b(4, 4);
    b.set({1, 2}, 8);
    EXPECT_EQ(legal_moves(b, kCirulli).size(), 4u);
    EXPECT_FALSE(is_forbidden(b, kCirulli));
}

TEST(Spawn, DeterministicFirstEmpty) {
    GameState s = GameState::make(Board(2, 2), kCirulli, SpawnPolicy::deterministic(), 0);
    GameState t = spawn(s);
    EXPECT_EQ(t.board.face({0, 0}), 2u);
    EXPECT_EQ(t.board.tile_count(), 1u);
    // next empty is in the same (leftmost) column
    EXPECT_EQ(spawn(t).board.face({1, 0}), 2u);
}

TEST(Spawn, UniqueEmpty) {
    Board b(2, 2);
    b.set({0, 0}, 8);
    b.set({0, 1}, 16);
    b.set({1, 1}, 32);
    GameState s = GameState::make(b, kCirulli, SpawnPolicy::unique_empty(2), 0);
    EXPECT_EQ(spawn(s).board.face({1, 0}), 2u);
    b.clear({0, 0});
    GameState two = GameState::make(b, kCirulli, SpawnPolicy::unique_empty(2), 0);
    try {
        spawn(two);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::AmbiguousLocator);
    }
}

TEST(Spawn, ScriptedAndErrors) {
    GameState s = GameState::make(Board(2, 2), kCirulli, SpawnPolicy::scripted({}), 0);
    try {
        spawn(s);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::ScriptExhausted);
    }
    GameState sc = GameState::make(Board(2, 2), kCirulli,
                                   SpawnPolicy::scripted({{4, {{1, 1}, LocatorRule::Exact}},
                                                          {2, {{1, 1}, LocatorRule::FirstEmptyFrom}}}),
                                   0);
    GameState a = spawn(sc);
    EXPECT_EQ(a.board.face({1, 1}), 4u);
    GameState b = spawn(a);
    EXPECT_EQ(b.board.face({0, 0}), 2u); // wraps around in row-major order

    Board full(1, 1);
    full.set({0, 0}, 2);
    try {
        spawn(GameState::make(full, kCirulli, SpawnPolicy::deterministic(), 0));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::NoEmptyCell);
    }
    try {
        spawn(GameState::make(Board(1, 1), kCirulli, SpawnPolicy::angel(), 0));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::MissingChoice);
    }
    auto angel = spawn(GameState::make(Board(1, 2), kCirulli, SpawnPolicy::angel(), 0), AngelChoice{4, {0, 1}});
    EXPECT_EQ(angel.board.face({0, 1}), 4u);
}

TEST(Step, GoalAndIllegalMove) {
    Board b(1, 3);
    b.set({0, 1}, 2048);
    b.set({0, 2}, 2048);
    GameState s = GameState::make(b, kCirulli, SpawnPolicy::none(), 4096);
    EXPECT_FALSE(s.goal_reached);
    GameState t = step(s, Direction::Left);
    EXPECT_TRUE(t.goal_reached);
    EXPECT_EQ(t.running_score, 4096u);
    EXPECT_EQ(t.move_count, 1u);
    try {
        step(t, Direction::Left);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::IllegalMove);
    }
}

TEST(Step, RunningScoreSumsDeltas) {
    std::mt19937_64 rng(3);
    GameState s = GameState::make(random_board(rng, kCirulli, 4, 4, 0.5), kCirulli, SpawnPolicy::deterministic(), 0);
    std::uint64_t total = 0;
    for (int i = 0; i < 40; ++i) {
        auto legal = legal_moves(s);
        if (legal.empty()) {
            break;
        }
        auto out = apply_move(s, legal[static_cast<std::size_t>(i) % legal.size()]);
        total += out.score_delta;
        s = advance(s, out);
    }
    EXPECT_EQ(s.running_score, total);
}

TEST(FinalScoreThrees, Examples) {
    Board b(1, 1);
    b.set({0, 0}, 3);
    EXPECT_EQ(final_score_threes(b), 3u);
    b.set({0, 0}, 12);
    EXPECT_EQ(final_score_threes(b), 27u);
    Board small(1, 3);
    small.set({0, 0}, 1);
    small.set({0, 1}, 2);
    EXPECT_EQ(final_score_threes(small), 0u);
    Board fives(1, 2);
    fives.set({0, 0}, 5);
    fives.set({0, 1}, 10);
    EXPECT_EQ(final_score_threes(fives, kFives), 3u + 9u);
}

// ---------------------------------------------------------------------------
// Properties over random boards

class EngineProperty : public ::testing::TestWithParam<VariantKind> {};

TEST_P(EngineProperty, Invariants) {
    Variant v{GetParam()};
    std::mt19937_64 rng(static_cast<std::uint64_t>(GetParam()) * 977 + 1);
    std::uniform_int_distribution<int> side(1, 6);
    std::uniform_real_distribution<double> fill(0.2, 1.0);
    for (int t = 0; t < 300; ++t) {
        Board b = random_board(rng, v, side(rng), side(rng), fill(rng));
        std::vector<Direction> legal;
        for (Direction d : kAllDirections) {
            auto out = apply_move(b, v, d);
            auto again = apply_move(b, v, d);
            EXPECT_EQ(out.board_after, again.board_after); // determinism
            EXPECT_EQ(out.merges, again.merges);
            if (!out.moved) {
                continue;
            }
            legal.push_back(d);
            const Board& a = out.board_after;
            EXPECT_EQ(a.face_sum(), b.face_sum());
            EXPECT_EQ(a.tile_count(), b.tile_count() - out.merges.size());
            std::uint64_t delta = 0;
            for (const auto& m : out.merges) {
                delta += m.result;
            }
            EXPECT_EQ(out.score_delta, delta);
            // merge-once: no output cell is the target of two merges
            std::vector<Cell> at;
            for (const auto& m : out.merges) {
                at.push_back(m.at);
            }
            std::sort(at.begin(), at.end());
            EXPECT_EQ(std::adjacent_find(at.begin(), at.end()), at.end());
            auto hinted = apply_move(b, v, d, line_hints(b, v));
            EXPECT_EQ(hinted.board_after, a);
            if (v.movement() == Movement::ShiftByOne) {
                // each line position either keeps its tile, or receives it from one cell behind
                for (int r = 0; r < b.rows(); ++r) {
                    for (int c = 0; c < b.cols(); ++c) {
                        Face before = b.face({r, c});
                        bool merged_here = std::any_of(out.merges.begin(), out.merges.end(),
                                                       [&](const MergeEvent& m) { return m.at == Cell{r, c}; });
                        if (before == 0 || a.face({r, c}) == before || merged_here) {
                            continue;
                        }
                        int dr = d == Direction::Up ? -1 : d == Direction::Down ? 1 : 0;
                        int dc = d == Direction::Left ? -1 : d == Direction::Right ? 1 : 0;
                        Cell ahead{r + dr, c + dc};
                        ASSERT_TRUE(a.contains(ahead)) << "tile moved off the board";
                        Face there = a.face(ahead);
                        EXPECT_TRUE(there == before || merge_result(v, b.face(ahead), before) == there)
                            << "tile at " << r << "," << c << " moved more than one cell";
                    }
                }
            }
        }
        EXPECT_EQ(legal_moves(b, v), legal);
        EXPECT_EQ(is_forbidden(b, v), b.full() && legal.empty());
    }
}

INSTANTIATE_TEST_SUITE_P(AllVariants, EngineProperty,
                         ::testing::Values(VariantKind::Cirulli2048, VariantKind::Saming2048, VariantKind::Threes,
                                           VariantKind::Fives, VariantKind::Game1024, VariantKind::Fibonacci),
                         [](const auto& info) { return std::string(name_of(info.param)); });

TEST(BoardHash, DistinguishesAndRepeats) {
    Board a(3, 3), b(3, 3);
    a.set({0, 0}, 2);
    b.set({0, 1}, 2);
    EXPECT_NE(board_hash(a), board_hash(b));
    EXPECT_EQ(board_hash(a), board_hash(Board(a)));
}
