#pragma once

#include <algorithm>
#include <set>
#include <sstream>
#include <string>

#include "mergegame/board.hpp"
#include "mergegame/reduction.hpp"

namespace mergegame::io {

/// Fixed-width grid: '.' empty, '#' block, faces right-aligned.
inline std::string render_ascii(const Board& board) {
    std::size_t width = 1;
    for (Face v : board.raw()) {
        if (v != 0 && v != Board::kBlock) {
            width = std::max(width, std::to_string(v).size());
        }
    }
    std::ostringstream os;
    for (int r = 0; r < board.rows(); ++r) {
        for (int c = 0; c < board.cols(); ++c) {
            Face v = board.raw(board.index({r, c}));
            std::string s = v == 0 ? "." : v == Board::kBlock ? "#" : std::to_string(v);
            if (c > 0) {
                os << ' ';
            }
            os << std::string(width - s.size(), ' ') << s;
        }
        os << '\n';
    }
    return os.str();
}

struct TileStyle {
    const char* fill;
    const char* text;
};

/// Classic 2048 palette; faces past 2048 share the darkest tone.
inline TileStyle tile_style(Variant variant, Face v) {
    if (variant.kind() == VariantKind::Threes || variant.kind() == VariantKind::Fives) {
        Face small_a = variant.kind() == VariantKind::Threes ? 1 : 2;
        if (v == small_a) {
            return {"#66ccff", "#ffffff"};
        }
        if (v == small_a + 1) {
            return {"#ff6680", "#ffffff"};
        }
        return {"#fefefe", "#333333"};
    }
    switch (v) {
    case 2: return {"#eee4da", "#776e65"};
    case 4: return {"#ede0c8", "#776e65"};
    case 8: return {"#f2b179", "#f9f6f2"};
    case 16: return {"#f59563", "#f9f6f2"};
    case 32: return {"#f67c5f", "#f9f6f2"};
    case 64: return {"#f65e3b", "#f9f6f2"};
    case 128: return {"#edcf72", "#f9f6f2"};
    case 256: return {"#edcc61", "#f9f6f2"};
    case 512: return {"#edc850", "#f9f6f2"};
    case 1024: return {"#edc53f", "#f9f6f2"};
    case 2048: return {"#edc22e", "#f9f6f2"};
    default: return {"#3c3a32", "#f9f6f2"};
    }
}

inline const char* annotation_colour(GadgetRole role) {
    switch (role) {
    case GadgetRole::VariableAB:
    case GadgetRole::VariableCD:
    case GadgetRole::VariableEF: return "#1f77b4";
    case GadgetRole::LiteralAB:
    case GadgetRole::LiteralCD:
    case GadgetRole::LiteralEF:
    case GadgetRole::LiteralGH: return "#2ca02c";
    case GadgetRole::Activation:
    case GadgetRole::VariableLink:
    case GadgetRole::ClauseLink: return "#9467bd";
    case GadgetRole::ClauseSelector:
    case GadgetRole::ClauseCollector: return "#d62728";
    case GadgetRole::Goal: return "#ff7f0e";
    case GadgetRole::PotOfGold: return "#8c564b";
    }
    return "#000000";
}

struct SvgOptions {
    int cell = 20;
    bool annotations = true;
    bool labels = true; // face numbers inside tiles
};

/// SVG 1.1. `board` overrides the instance's start board (for a trace step).
/// Pair tiles (annotation cells still holding their pair face) get a black dot.
inline std::string render_svg(const Instance& inst, const Board* board = nullptr, SvgOptions opt = {}) {
    const Board& b = board ? *board : inst.board;
    const int s = opt.cell;
    const int gap = std::max(1, s / 10);
    std::set<Cell> pair_cells;
    for (const auto& a : inst.annotations) {
        for (Cell c : a.cells) {
            if (a.face != 0 && b.contains(c) && b.face(c) == a.face && a.tag.role != GadgetRole::Goal) {
                pair_cells.insert(c);
            }
        }
    }
    std::ostringstream os;
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
       << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << b.cols() * s << "\" height=\""
       << b.rows() * s << "\" viewBox=\"0 0 " << b.cols() * s << ' ' << b.rows() * s << "\">\n"
       << "<rect width=\"100%\" height=\"100%\" fill=\"#bbada0\"/>\n";
    for (int r = 0; r < b.rows(); ++r) {
        for (int c = 0; c < b.cols(); ++c) {
            Face v = b.raw(b.index({r, c}));
            int x = c * s + gap / 2;
            int y = r * s + gap / 2;
            int w = s - gap;
            if (v == Board::kBlock) {
                os << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << w << "\" height=\"" << w
                   << "\" fill=\"#5a5048\"/>\n";
                continue;
            }
            if (v == 0) {
                os << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << w << "\" height=\"" << w
                   << "\" fill=\"#cdc1b4\"/>\n";
                continue;
            }
            TileStyle st = tile_style(inst.variant, v);
            os << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << w << "\" height=\"" << w << "\" fill=\""
               << st.fill << "\"/>\n";
            if (pair_cells.count({r, c}) != 0) {
                os << "<circle class=\"pair\" cx=\"" << c * s + s / 2 << "\" cy=\"" << r * s + s / 2 << "\" r=\""
                   << std::max(2, s / 5) << "\" fill=\"#000000\"/>\n";
            } else if (opt.labels) {
                std::string text = std::to_string(v);
                int fs = std::max(4, static_cast<int>(s * (text.size() <= 2 ? 0.5 : 1.4 / static_cast<double>(text.size()))));
                os << "<text x=\"" << c * s + s / 2 << "\" y=\"" << r * s + s / 2 + fs / 3 << "\" font-size=\"" << fs
                   << "\" text-anchor=\"middle\" font-family=\"sans-serif\" fill=\"" << st.text << "\">" << text
                   << "</text>\n";
            }
        }
    }
    if (opt.annotations) {
        for (const auto& a : inst.annotations) {
            if (a.cells.empty()) {
                continue;
            }
            int r0 = a.cells.front().row, r1 = r0, c0 = a.cells.front().col, c1 = c0;
            for (Cell c : a.cells) {
                r0 = std::min(r0, c.row);
                r1 = std::max(r1, c.row);
                c0 = std::min(c0, c.col);
                c1 = std::max(c1, c.col);
            }
            os << "<rect class=\"annotation\" x=\"" << c0 * s << "\" y=\"" << r0 * s << "\" width=\""
               << (c1 - c0 + 1) * s << "\" height=\"" << (r1 - r0 + 1) * s << "\" fill=\"none\" stroke=\""
               << annotation_colour(a.tag.role) << "\" stroke-width=\"" << std::max(1, s / 10) << "\"><title>"
               << a.label() << "</title></rect>\n";
        }
    }
    os << "</svg>\n";
    return os.str();
}

} // namespace mergegame::io
