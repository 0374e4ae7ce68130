#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mergegame/error.hpp"
#include "mergegame/variant.hpp"

namespace mergegame {

/// Board coordinate, row 0 at the top.
struct Cell {
    int row = 0;
    int col = 0;

    constexpr bool operator==(const Cell&) const = default;
    constexpr auto operator<=>(const Cell&) const = default;
};

/// Rectangular grid of optional tiles plus immovable blocks.
///
/// Stored row-major; an empty cell holds 0 and a block holds `kBlock`, so a
/// snapshot is a flat value array that copies, compares and hashes cheaply.
class Board {
public:
    static constexpr Face kBlock = std::numeric_limits<Face>::max();

    Board() = default;
    Board(int rows, int cols) : rows_(rows), cols_(cols) {
        if (rows <= 0 || cols <= 0) {
            throw Error(ErrorCode::InvalidParameters, "board dimensions must be positive");
        }
        cells_.assign(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols), 0);
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    std::size_t size() const { return cells_.size(); }

    bool contains(Cell c) const { return c.row >= 0 && c.row < rows_ && c.col >= 0 && c.col < cols_; }

    std::size_t index(Cell c) const {
        return static_cast<std::size_t>(c.row) * static_cast<std::size_t>(cols_) +
               static_cast<std::size_t>(c.col);
    }
    Cell cell_at(std::size_t idx) const {
        return {static_cast<int>(idx / static_cast<std::size_t>(cols_)),
                static_cast<int>(idx % static_cast<std::size_t>(cols_))};
    }

    /// Face at `c`; 0 when empty. Blocks report 0 here, use `is_block`.
    Face face(Cell c) const {
        Face v = cells_[index(c)];
        return v == kBlock ? 0 : v;
    }
    std::optional<Face> tile(Cell c) const {
        Face v = cells_[index(c)];
        if (v == 0 || v == kBlock) {
            return std::nullopt;
        }
        return v;
    }
    bool is_block(Cell c) const { return cells_[index(c)] == kBlock; }
    bool is_empty(Cell c) const { return cells_[index(c)] == 0; }

    void set(Cell c, Face v) {
        checked(c);
        if (cells_[index(c)] == kBlock) {
            throw Error(ErrorCode::InvalidParameters, "cannot place a tile on a block");
        }
        cells_[index(c)] = v;
    }
    void clear(Cell c) { set(c, 0); }
    void set_block(Cell c) {
        checked(c);
        cells_[index(c)] = kBlock;
    }

    std::size_t tile_count() const {
        return static_cast<std::size_t>(
            std::count_if(cells_.begin(), cells_.end(), [](Face v) { return v != 0 && v != kBlock; }));
    }
    std::size_t empty_count() const {
        return static_cast<std::size_t>(std::count(cells_.begin(), cells_.end(), Face{0}));
    }
    bool has_blocks() const { return std::find(cells_.begin(), cells_.end(), kBlock) != cells_.end(); }
    bool full() const { return empty_count() == 0; }

    std::vector<Cell> empty_cells() const {
        std::vector<Cell> out;
        for (std::size_t i = 0; i < cells_.size(); ++i) {
            if (cells_[i] == 0) {
                out.push_back(cell_at(i));
            }
        }
        return out;
    }

    Face max_face() const {
        Face best = 0;
        for (Face v : cells_) {
            if (v != kBlock) {
                best = std::max(best, v);
            }
        }
        return best;
    }

    Face face_sum() const {
        Face sum = 0;
        for (Face v : cells_) {
            if (v != kBlock) {
                sum += v;
            }
        }
        return sum;
    }

    /// Raw storage (0 = empty, kBlock = block), row-major.
    std::span<const Face> raw() const { return cells_; }
    Face raw(std::size_t idx) const { return cells_[idx]; }
    Face& raw(std::size_t idx) { return cells_[idx]; }

    bool operator==(const Board&) const = default;

private:
    void checked(Cell c) const {
        if (!contains(c)) {
            throw Error(ErrorCode::InvalidParameters,
                        "cell (" + std::to_string(c.row) + "," + std::to_string(c.col) + ") outside board");
        }
    }

    int rows_ = 0;
    int cols_ = 0;
    std::vector<Face> cells_;
};

namespace detail {

constexpr std::uint64_t mix64(std::uint64_t x) {
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ULL;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebULL;
    x ^= x >> 31;
    return x;
}

} // namespace detail

/// 64-bit content hash of a board (dimensions and every cell). Each cell is
/// mixed with its index independently, so the loop has no serial chain.
inline std::uint64_t board_hash(const Board& board, std::uint64_t seed = 0x9e3779b97f4a7c15ULL) {
    std::uint64_t h = detail::mix64(seed ^ static_cast<std::uint64_t>(board.rows()));
    h = detail::mix64(h ^ static_cast<std::uint64_t>(board.cols()));
    std::uint64_t acc = 0;
    auto cells = board.raw();
    for (std::size_t i = 0; i < cells.size(); ++i) {
        acc += detail::mix64((cells[i] ^ h) + i * 0x9e3779b97f4a7c15ULL);
    }
    return detail::mix64(h ^ acc);
}

} // namespace mergegame
