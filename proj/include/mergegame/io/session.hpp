#pragma once

#include <string>
#include <utility>
#include <vector>

#include "mergegame/engine.hpp"
#include "mergegame/io/documents.hpp"
#include "mergegame/reduction.hpp"

namespace mergegame::io {

/// One game over one instance with full history, for the play loop and the
/// HTTP bridge. A move whose spawn cannot be placed (for example two empty
/// cells under the unique-empty policy) ends the game.
class GameSession {
public:
    enum class MoveResult { Ok, Illegal, NotPlaying };

    explicit GameSession(Instance instance) : instance_(std::move(instance)) { reset(); }

    const Instance& instance() const { return instance_; }
    const GameState& state() const { return history_.back().state; }
    const std::vector<Direction>& moves() const { return moves_; }
    const std::string& fault() const { return history_.back().fault; }

    std::string status() const {
        const Entry& e = history_.back();
        if (e.state.goal_reached) {
            return "goal";
        }
        if (!e.fault.empty() || legal_moves(e.state).empty()) {
            return "game_over";
        }
        return "playing";
    }

    MoveResult move(Direction d) {
        if (status() != "playing") {
            return MoveResult::NotPlaying;
        }
        const GameState& s = state();
        MoveOutcome out = apply_move(s, d);
        if (!out.moved) {
            return MoveResult::Illegal;
        }
        Entry next;
        try {
            next.state = advance(s, out);
        } catch (const Error& e) {
            // keep the post-move board so the failure is visible
            next.state = s;
            next.state.board = out.board_after;
            next.state.running_score += out.score_delta;
            ++next.state.move_count;
            next.fault = e.what();
        }
        next.merges = std::move(out.merges);
        history_.push_back(std::move(next));
        moves_.push_back(d);
        return MoveResult::Ok;
    }

    bool undo() {
        if (moves_.empty()) {
            return false;
        }
        history_.pop_back();
        moves_.pop_back();
        return true;
    }

    void reset() {
        history_.clear();
        moves_.clear();
        history_.push_back({instance_.initial_state(), {}, {}});
    }

    json state_json() const {
        const GameState& s = state();
        json grid = json::array();
        for (int r = 0; r < s.board.rows(); ++r) {
            json row = json::array();
            for (int c = 0; c < s.board.cols(); ++c) {
                Face v = s.board.raw(s.board.index({r, c}));
                if (v == Board::kBlock) {
                    row.push_back(-1);
                } else {
                    row.push_back(v);
                }
            }
            grid.push_back(std::move(row));
        }
        json legal = json::array();
        for (Direction d : legal_moves(s)) {
            legal.push_back(std::string(1, to_char(d)));
        }
        json merges = json::array();
        for (const auto& m : history_.back().merges) {
            merges.push_back({{"r", m.at.row}, {"c", m.at.col}, {"v", m.result}});
        }
        json out = {{"board", grid},
                    {"move_count", s.move_count},
                    {"running_score", s.running_score},
                    {"legal_moves", legal},
                    {"status", status()},
                    {"last_merges", merges}};
        if (!fault().empty()) {
            out["fault"] = fault();
        }
        return out;
    }

    TraceDocument trace() const {
        return {instance_digest(instance_), moves_, state().goal_reached, state().running_score};
    }

private:
    struct Entry {
        GameState state;
        std::vector<MergeEvent> merges;
        std::string fault;
    };

    Instance instance_;
    std::vector<Entry> history_;
    std::vector<Direction> moves_;
};

} // namespace mergegame::io
