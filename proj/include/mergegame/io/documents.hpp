#pragma once

// JSON instance and trace documents (schema in docs/formats.md).

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <initializer_list>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "mergegame/engine.hpp"
#include "mergegame/error.hpp"
#include "mergegame/io/dimacs.hpp"
#include "mergegame/reduction.hpp"
#include "mergegame/solver.hpp"

namespace mergegame::io {

using json = nlohmann::json;

inline constexpr int kInstanceVersion = 1;
inline constexpr int kTraceVersion = 1;

namespace detail {

inline void check_keys(const json& obj, std::string_view what, std::initializer_list<std::string_view> required,
                       std::initializer_list<std::string_view> optional = {}) {
    if (!obj.is_object()) {
        throw Error(ErrorCode::FormatError, std::string(what) + " must be an object");
    }
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        const std::string& k = it.key();
        bool known = std::find(required.begin(), required.end(), k) != required.end() ||
                     std::find(optional.begin(), optional.end(), k) != optional.end();
        if (!known) {
            throw Error(ErrorCode::FormatError, "unknown field '" + k + "' in " + std::string(what));
        }
    }
    for (auto k : required) {
        if (!obj.contains(std::string(k))) {
            throw Error(ErrorCode::FormatError, "missing field '" + std::string(k) + "' in " + std::string(what));
        }
    }
}

template <typename T>
T get(const json& obj, const char* key, std::string_view what) {
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception&) {
        throw Error(ErrorCode::FormatError, "field '" + std::string(key) + "' in " + std::string(what) +
                                                " has the wrong type");
    }
}

inline json cell_json(Cell c) { return {{"r", c.row}, {"c", c.col}}; }

inline Cell cell_from(const json& j, std::string_view what) {
    check_keys(j, what, {"r", "c"});
    return {get<int>(j, "r", what), get<int>(j, "c", what)};
}

inline std::string rule_name(LocatorRule r) { return r == LocatorRule::Exact ? "exact" : "first-empty"; }

inline LocatorRule rule_from(const std::string& s) {
    if (s == "exact") {
        return LocatorRule::Exact;
    }
    if (s == "first-empty") {
        return LocatorRule::FirstEmptyFrom;
    }
    throw Error(ErrorCode::FormatError, "unknown locator rule '" + s + "'");
}

inline SpawnKind spawn_kind_from(const std::string& s) {
    for (SpawnKind k : {SpawnKind::None, SpawnKind::Scripted, SpawnKind::DeterministicFirstEmpty,
                        SpawnKind::UniqueEmpty, SpawnKind::Angel}) {
        if (name_of(k) == s) {
            return k;
        }
    }
    throw Error(ErrorCode::FormatError, "unknown spawn policy '" + s + "'");
}

} // namespace detail

/// Hex FNV-1a digest over (rows, cols, sorted cell triples, goal, variant name).
inline std::string board_digest(const Board& board, Face goal, Variant variant) {
    std::vector<std::tuple<int, int, Face>> cells;
    for (int r = 0; r < board.rows(); ++r) {
        for (int c = 0; c < board.cols(); ++c) {
            Face v = board.raw(board.index({r, c}));
            if (v != 0) {
                cells.emplace_back(r, c, v);
            }
        }
    }
    std::sort(cells.begin(), cells.end());
    std::string text = std::to_string(board.rows()) + "x" + std::to_string(board.cols()) + ";";
    for (const auto& [r, c, v] : cells) {
        text += std::to_string(r) + "," + std::to_string(c) + "," +
                (v == Board::kBlock ? std::string("#") : std::to_string(v)) + ";";
    }
    text += "goal=" + std::to_string(goal) + ";variant=" + std::string(name_of(variant));
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

inline std::string instance_digest(const Instance& inst) { return board_digest(inst.board, inst.goal, inst.variant); }

// ---------------------------------------------------------------------------
// Instances

inline json instance_to_json(const Instance& inst) {
    json cells = json::array();
    json blocks = json::array();
    for (int r = 0; r < inst.board.rows(); ++r) {
        for (int c = 0; c < inst.board.cols(); ++c) {
            Face v = inst.board.raw(inst.board.index({r, c}));
            if (v == Board::kBlock) {
                blocks.push_back(detail::cell_json({r, c}));
            } else if (v != 0) {
                cells.push_back({{"r", r}, {"c", c}, {"v", v}});
            }
        }
    }
    json spawn = {{"policy", std::string(name_of(inst.spawn.kind))}, {"face", inst.spawn.face}};
    if (!inst.spawn.script.empty()) {
        json script = json::array();
        for (const auto& s : inst.spawn.script) {
            script.push_back({{"face", s.face},
                              {"r", s.where.anchor.row},
                              {"c", s.where.anchor.col},
                              {"rule", detail::rule_name(s.where.rule)}});
        }
        spawn["script"] = script;
    }
    json annotations = json::array();
    for (const auto& a : inst.annotations) {
        json cs = json::array();
        for (Cell c : a.cells) {
            cs.push_back(detail::cell_json(c));
        }
        annotations.push_back({{"label", a.label()}, {"face", a.face}, {"cells", cs}});
    }
    json doc = {{"version", kInstanceVersion},
                {"variant", std::string(name_of(inst.variant))},
                {"rows", inst.board.rows()},
                {"cols", inst.board.cols()},
                {"cells", cells},
                {"blocks", blocks},
                {"spawn", spawn},
                {"goal", inst.goal},
                {"annotations", annotations}};
    if (inst.meta) {
        const auto& m = *inst.meta;
        json meta = {{"formula", to_dimacs(m.original)},
                     {"flips", m.normalized.record.flipped_vars()},
                     {"translation", {{"dx", m.translation.dx}, {"dy", m.translation.dy}}}};
        if (m.pot_of_gold) {
            meta["pot_of_gold"] = {{"p", m.pot_of_gold->p}, {"q", m.pot_of_gold->q}};
        }
        doc["meta"] = meta;
    }
    return doc;
}

inline Instance instance_from_json(const json& doc) {
    detail::check_keys(doc, "instance",
                       {"version", "variant", "rows", "cols", "cells", "spawn", "goal"},
                       {"blocks", "annotations", "meta"});
    int version = detail::get<int>(doc, "version", "instance");
    if (version != kInstanceVersion) {
        throw Error(ErrorCode::FormatError, "unsupported instance version " + std::to_string(version));
    }
    Instance inst;
    try {
        inst.variant = Variant{variant_from_name(detail::get<std::string>(doc, "variant", "instance"))};
    } catch (const Error& e) {
        throw Error(ErrorCode::FormatError, e.what());
    }
    int rows = detail::get<int>(doc, "rows", "instance");
    int cols = detail::get<int>(doc, "cols", "instance");
    if (rows < 1 || cols < 1 || static_cast<long long>(rows) * cols > 100'000'000LL) {
        throw Error(ErrorCode::FormatError, "bad board dimensions");
    }
    inst.board = Board(rows, cols);
    auto place_check = [&](Cell c) {
        if (!inst.board.contains(c)) {
            throw Error(ErrorCode::FormatError, "cell outside the board");
        }
        if (!inst.board.is_empty(c)) {
            throw Error(ErrorCode::FormatError, "cell listed twice");
        }
    };
    if (doc.contains("blocks")) {
        for (const auto& b : doc.at("blocks")) {
            Cell c = detail::cell_from(b, "block");
            place_check(c);
            inst.board.set_block(c);
        }
    }
    if (!doc.at("cells").is_array()) {
        throw Error(ErrorCode::FormatError, "cells must be an array");
    }
    for (const auto& j : doc.at("cells")) {
        detail::check_keys(j, "cell", {"r", "c", "v"});
        Cell c{detail::get<int>(j, "r", "cell"), detail::get<int>(j, "c", "cell")};
        auto v = detail::get<Face>(j, "v", "cell");
        place_check(c);
        if (!is_valid_face(inst.variant, v)) {
            throw Error(ErrorCode::FormatError, "face " + std::to_string(v) + " is not valid for the variant");
        }
        inst.board.set(c, v);
    }

    const json& sp = doc.at("spawn");
    detail::check_keys(sp, "spawn", {"policy"}, {"face", "script"});
    inst.spawn.kind = detail::spawn_kind_from(detail::get<std::string>(sp, "policy", "spawn"));
    inst.spawn.face = sp.contains("face") ? detail::get<Face>(sp, "face", "spawn") : 2;
    if (sp.contains("script")) {
        for (const auto& e : sp.at("script")) {
            detail::check_keys(e, "spawn script entry", {"face", "r", "c", "rule"});
            inst.spawn.script.push_back({detail::get<Face>(e, "face", "spawn script entry"),
                                         {{detail::get<int>(e, "r", "spawn script entry"),
                                           detail::get<int>(e, "c", "spawn script entry")},
                                          detail::rule_from(detail::get<std::string>(e, "rule", "spawn script entry"))}});
        }
    }
    inst.goal = detail::get<Face>(doc, "goal", "instance");

    if (doc.contains("annotations")) {
        for (const auto& a : doc.at("annotations")) {
            detail::check_keys(a, "annotation", {"label", "cells"}, {"face"});
            Annotation ann;
            ann.tag = parse_label(detail::get<std::string>(a, "label", "annotation"));
            ann.face = a.contains("face") ? detail::get<Face>(a, "face", "annotation") : 0;
            for (const auto& c : a.at("cells")) {
                Cell cell = detail::cell_from(c, "annotation cell");
                if (!inst.board.contains(cell)) {
                    throw Error(ErrorCode::FormatError, "annotation cell outside the board");
                }
                ann.cells.push_back(cell);
            }
            inst.annotations.push_back(std::move(ann));
        }
    }

    if (doc.contains("meta")) {
        const json& m = doc.at("meta");
        detail::check_keys(m, "meta", {"formula", "translation"}, {"flips", "pot_of_gold"});
        CnfFormula original;
        try {
            original = parse_dimacs(detail::get<std::string>(m, "formula", "meta"));
        } catch (const Error& e) {
            throw Error(ErrorCode::FormatError, std::string("meta.formula: ") + e.what());
        }
        const json& t = m.at("translation");
        detail::check_keys(t, "translation", {"dx", "dy"});
        Translation tr{detail::get<int>(t, "dx", "translation"), detail::get<int>(t, "dy", "translation")};
        std::optional<PotOfGoldOptions> pot;
        if (m.contains("pot_of_gold")) {
            const json& p = m.at("pot_of_gold");
            detail::check_keys(p, "pot_of_gold", {"p", "q"});
            pot = PotOfGoldOptions{detail::get<int>(p, "p", "pot_of_gold"), detail::get<int>(p, "q", "pot_of_gold")};
        }
        InstanceMeta meta = rebuild_meta(original, tr, pot);
        if (m.contains("flips") &&
            detail::get<std::vector<int>>(m, "flips", "meta") != meta.normalized.record.flipped_vars()) {
            throw Error(ErrorCode::FormatError, "meta.flips does not match the formula");
        }
        inst.meta = std::move(meta);
    }
    return inst;
}

inline Instance parse_instance(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::FormatError, std::string("invalid JSON: ") + e.what());
    }
    return instance_from_json(doc);
}

inline std::string serialize_instance(const Instance& inst) { return instance_to_json(inst).dump() + "\n"; }

// ---------------------------------------------------------------------------
// Traces

struct TraceDocument {
    std::string instance_digest;
    std::vector<Direction> moves;
    bool reached_goal = false;
    std::uint64_t final_score = 0;

    bool operator==(const TraceDocument&) const = default;
};

inline TraceDocument make_trace_document(const Instance& inst, const Trace& t) {
    return {instance_digest(inst), t.moves, t.reached_goal, t.final_score};
}

inline json trace_to_json(const TraceDocument& t) {
    json moves = json::array();
    for (Direction d : t.moves) {
        moves.push_back(std::string(1, to_char(d)));
    }
    return {{"version", kTraceVersion},
            {"instance_digest", t.instance_digest},
            {"moves", moves},
            {"reached_goal", t.reached_goal},
            {"final_score", t.final_score}};
}

inline TraceDocument trace_from_json(const json& doc) {
    detail::check_keys(doc, "trace", {"version", "instance_digest", "moves", "reached_goal", "final_score"});
    if (detail::get<int>(doc, "version", "trace") != kTraceVersion) {
        throw Error(ErrorCode::FormatError, "unsupported trace version");
    }
    TraceDocument t;
    t.instance_digest = detail::get<std::string>(doc, "instance_digest", "trace");
    for (const auto& m : doc.at("moves")) {
        if (!m.is_string() || m.get<std::string>().size() != 1) {
            throw Error(ErrorCode::FormatError, "moves must be one-letter strings");
        }
        try {
            t.moves.push_back(direction_from_char(m.get<std::string>()[0]));
        } catch (const Error& e) {
            throw Error(ErrorCode::FormatError, e.what());
        }
    }
    t.reached_goal = detail::get<bool>(doc, "reached_goal", "trace");
    t.final_score = detail::get<std::uint64_t>(doc, "final_score", "trace");
    return t;
}

inline TraceDocument parse_trace(const std::string& text) {
    try {
        return trace_from_json(json::parse(text));
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::FormatError, std::string("invalid JSON: ") + e.what());
    }
}

inline std::string serialize_trace(const TraceDocument& t) { return trace_to_json(t).dump(2) + "\n"; }

} // namespace mergegame::io
