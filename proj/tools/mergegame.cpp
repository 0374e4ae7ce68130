// mergegame: compile 3-CNF formulas into merge-game instances, solve, play,
// render and serve them.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mergegame/io/dimacs.hpp"
#include "mergegame/io/documents.hpp"
#include "mergegame/io/render.hpp"
#include "mergegame/io/server.hpp"
#include "mergegame/io/session.hpp"
#include "mergegame/reduction.hpp"
#include "mergegame/solver.hpp"

namespace mg = mergegame;
namespace io = mergegame::io;

namespace {

constexpr int kExitUsage = 64;
constexpr int kExitFile = 66;
constexpr int kExitInternal = 70;
constexpr int kExitSat = 10;
constexpr int kExitUnsat = 20;

struct ExitError {
    int code;
    std::string message;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ExitError{kExitFile, "cannot read " + path};
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
    if (path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out || !(out << text)) {
        throw ExitError{kExitFile, "cannot write " + path};
    }
}

mg::CnfFormula load_cnf(const std::string& path, bool lenient) {
    try {
        return io::parse_dimacs(read_file(path), {lenient});
    } catch (const mg::ParseError& e) {
        throw ExitError{kExitFile, path + ":" + std::to_string(e.line()) + ": " + e.what()};
    }
}

mg::Instance load_instance(const std::string& path) {
    try {
        return io::parse_instance(read_file(path));
    } catch (const mg::Error& e) {
        throw ExitError{kExitFile, path + ": " + e.what()};
    }
}

io::TraceDocument load_trace(const std::string& path, const mg::Instance& inst) {
    io::TraceDocument t;
    try {
        t = io::parse_trace(read_file(path));
    } catch (const mg::Error& e) {
        throw ExitError{kExitFile, path + ": " + e.what()};
    }
    if (t.instance_digest != io::instance_digest(inst)) {
        throw ExitError{kExitFile, path + ": trace was recorded for a different instance"};
    }
    return t;
}

mg::ReductionOptions reduction_options(const std::string& variant, std::uint64_t goal, int margin,
                                       const std::string& pot) {
    mg::ReductionOptions o;
    try {
        o.variant = mg::Variant{mg::variant_from_name(variant)};
    } catch (const mg::Error& e) {
        throw ExitError{kExitUsage, e.what()};
    }
    if (goal != 0) {
        o.goal = goal;
    }
    o.margin = margin;
    if (!pot.empty()) {
        int p = 0, q = 0;
        char comma = 0;
        std::istringstream ps(pot);
        if (!(ps >> p >> comma >> q) || comma != ',' || !ps.eof()) {
            throw ExitError{kExitUsage, "--pot-of-gold expects p,q"};
        }
        o.pot_of_gold = mg::PotOfGoldOptions{p, q};
    }
    return o;
}

std::string status_line(const mg::GameState& s, const std::string& status) {
    std::ostringstream os;
    os << "moves " << s.move_count << "  score " << s.running_score << "  max " << s.board.max_face() << "  "
       << status;
    return os.str();
}

// --------------------------------------------------------------------------

int cmd_compile(const std::string& cnf, const std::string& out, const std::string& variant, std::uint64_t goal,
                int margin, const std::string& pot, bool lenient) {
    mg::CnfFormula f = load_cnf(cnf, lenient);
    mg::ReductionOptions o = reduction_options(variant, goal, margin, pot);
    mg::Instance inst;
    try {
        inst = mg::compile(f, o);
    } catch (const mg::Error& e) {
        if (e.code() == mg::ErrorCode::OverlappingGadgets) {
            throw ExitError{kExitInternal, e.what()};
        }
        throw ExitError{kExitUsage, e.what()};
    }
    write_file(out, io::serialize_instance(inst));
    std::cerr << "compiled " << f.num_vars << " vars, " << f.clauses.size() << " clauses into a "
              << inst.board.rows() << "x" << inst.board.cols() << " board, goal " << inst.goal << "\n";
    return 0;
}

int cmd_solve(const std::string& path, std::uint64_t budget, std::uint64_t max_states, const std::string& emit) {
    mg::Instance inst = load_instance(path);
    mg::SearchBudget b;
    if (budget != 0) {
        b.max_moves = budget;
    }
    b.max_states = max_states;
    mg::SearchResult r = mg::search(inst, b);
    std::cout << mg::name_of(r.status) << " states=" << r.states << " dead_ends=" << r.dead_ends
              << " max_depth=" << r.max_depth << "\n";
    if (r.trace) {
        mg::Trace replayed;
        try {
            replayed = mg::replay(inst, r.trace->moves);
        } catch (const mg::Error& e) {
            throw ExitError{kExitInternal, std::string("search trace does not replay: ") + e.what()};
        }
        if (!replayed.reached_goal) {
            throw ExitError{kExitInternal, "search trace does not reach the goal on replay"};
        }
        std::cout << "moves " << mg::moves_to_string(replayed.moves) << "\n";
        if (!emit.empty()) {
            write_file(emit, io::serialize_trace(io::make_trace_document(inst, replayed)));
        }
    }
    switch (r.status) {
    case mg::SearchStatus::Reached: return 0;
    case mg::SearchStatus::Unreachable: return 1;
    case mg::SearchStatus::BudgetExceeded: return 2;
    }
    return kExitInternal;
}

int cmd_play(const std::string& path) {
    io::GameSession session(load_instance(path));
    auto show = [&] {
        std::cout << io::render_ascii(session.state().board) << status_line(session.state(), session.status())
                  << "\n";
        if (!session.fault().empty()) {
            std::cout << "spawn failed: " << session.fault() << "\n";
        }
    };
    show();
    std::cout << "keys: L R U D move, z undo, x reset, q quit\n";
    std::string line;
    while (std::cout << "> " << std::flush, std::getline(std::cin, line)) {
        for (char ch : line) {
            if (ch == ' ' || ch == '\t' || ch == '\r') {
                continue;
            }
            char up = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
            if (up == 'Q') {
                return 0;
            }
            if (up == 'Z') {
                if (!session.undo()) {
                    std::cout << "nothing to undo\n";
                }
                continue;
            }
            if (up == 'X') {
                session.reset();
                continue;
            }
            mg::Direction d;
            try {
                d = mg::direction_from_char(up);
            } catch (const mg::Error&) {
                std::cout << "unknown key '" << ch << "'\n";
                continue;
            }
            switch (session.move(d)) {
            case io::GameSession::MoveResult::Ok: break;
            case io::GameSession::MoveResult::Illegal: std::cout << "illegal move " << up << "\n"; break;
            case io::GameSession::MoveResult::NotPlaying: std::cout << "game is " << session.status() << "\n"; break;
            }
        }
        show();
    }
    return 0;
}

int cmd_verify(const std::vector<std::string>& files, int samples, int max_vars, int max_clauses,
               std::uint64_t seed, const std::string& variant, std::uint64_t max_states, bool shortcut,
               bool lenient) {
    mg::ReductionOptions o = reduction_options(variant, 0, 3, "");
    std::vector<std::pair<std::string, mg::CnfFormula>> formulas;
    for (const auto& f : files) {
        formulas.emplace_back(f, load_cnf(f, lenient));
    }
    if (max_vars < 1 || max_clauses < 1 || samples < 0) {
        throw ExitError{kExitUsage, "--max-vars and --max-clauses must be positive"};
    }
    std::mt19937_64 rng(seed);
    for (int i = 0; i < samples; ++i) {
        int n = std::uniform_int_distribution<int>(1, max_vars)(rng);
        int m = std::uniform_int_distribution<int>(1, max_clauses)(rng);
        mg::CnfFormula f{n, {}};
        for (int j = 0; j < m; ++j) {
            mg::Clause c{};
            for (auto& lit : c) {
                lit = {std::uniform_int_distribution<int>(1, n)(rng), std::bernoulli_distribution(0.5)(rng)};
            }
            f.clauses.push_back(c);
        }
        formulas.emplace_back("sample " + std::to_string(i + 1), f);
    }
    mg::SearchBudget b;
    b.max_states = max_states;
    int disagree = 0, inconclusive = 0, sat = 0;
    for (const auto& [name, f] : formulas) {
        mg::EquivalenceResult r;
        try {
            r = mg::equivalence_check(f, o, b, shortcut);
        } catch (const mg::Error& e) {
            std::cout << name << ": error " << e.what() << "\n";
            ++disagree;
            continue;
        }
        sat += r.sat ? 1 : 0;
        inconclusive += r.inconclusive ? 1 : 0;
        if (!r.agree) {
            ++disagree;
        }
        std::cout << name << ": sat=" << r.sat << " reachable=" << (r.inconclusive ? "?" : r.reachable ? "1" : "0")
                  << (r.shortcut ? " (witness)" : "") << (r.agree ? "" : " DISAGREE") << "\n";
    }
    std::cout << formulas.size() << " formulas, " << sat << " satisfiable, " << inconclusive << " inconclusive, "
              << disagree << " disagreements\n";
    return disagree == 0 ? 0 : 1;
}

int cmd_render(const std::string& path, const std::string& svg, const std::string& trace_path, int step,
               int cell, bool ascii) {
    mg::Instance inst = load_instance(path);
    mg::Board board = inst.board;
    if (!trace_path.empty()) {
        io::TraceDocument t = load_trace(trace_path, inst);
        std::size_t k = step < 0 ? t.moves.size() : static_cast<std::size_t>(step);
        if (k > t.moves.size()) {
            throw ExitError{kExitUsage, "--step exceeds the trace length"};
        }
        std::vector<mg::Direction> prefix(t.moves.begin(), t.moves.begin() + static_cast<std::ptrdiff_t>(k));
        try {
            mg::Trace tr = mg::replay(inst, prefix, true);
            if (!tr.snapshots.empty()) {
                board = tr.snapshots.back();
            }
        } catch (const mg::Error& e) {
            throw ExitError{kExitFile, trace_path + ": " + e.what()};
        }
    } else if (step > 0) {
        throw ExitError{kExitUsage, "--step needs --trace"};
    }
    if (ascii) {
        std::cout << io::render_ascii(board);
    }
    if (!svg.empty()) {
        io::SvgOptions opt;
        opt.cell = cell;
        write_file(svg, io::render_svg(inst, &board, opt));
    }
    if (!ascii && svg.empty()) {
        throw ExitError{kExitUsage, "nothing to render: pass --svg and/or --ascii"};
    }
    return 0;
}

int cmd_serve(const std::string& path, const std::string& host, int port) {
    io::DebugServer server(load_instance(path));
    std::cerr << "serving on http://" << host << ":" << port << "/api/state\n";
    if (!server.listen(host, port)) {
        throw ExitError{kExitFile, "cannot listen on " + host + ":" + std::to_string(port)};
    }
    return 0;
}

int cmd_sat(const std::string& path, bool lenient) {
    mg::CnfFormula f = load_cnf(path, lenient);
    auto a = mg::dpll(f);
    if (!a) {
        std::cout << "s UNSATISFIABLE\n";
        return kExitUnsat;
    }
    std::cout << "s SATISFIABLE\nv";
    for (int v = 1; v <= f.num_vars; ++v) {
        std::cout << ' ' << (a->value(v) ? v : -v);
    }
    std::cout << " 0\n";
    return kExitSat;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Merge-game engine and 3-CNF reduction compiler"};
    app.require_subcommand(1);
    int rc = 0;

    std::string cnf, out = "-", variant = "cirulli2048", pot, instance, emit, svg, trace, host = "127.0.0.1";
    std::uint64_t goal = 0, budget = 0, max_states = 5'000'000, seed = 1;
    int margin = 3, port = 8080, step = -1, samples = 0, max_vars = 4, max_clauses = 4, cell = 20;
    bool lenient = false, no_shortcut = false, ascii = false;
    std::vector<std::string> cnfs;

    auto* c_compile = app.add_subcommand("compile", "compile a DIMACS formula into an instance document");
    c_compile->add_option("cnf", cnf, "DIMACS CNF file")->required();
    c_compile->add_option("-o,--output", out, "output instance file ('-' for stdout)");
    c_compile->add_option("--variant", variant, "cirulli2048 | threes | fibonacci");
    c_compile->add_option("--goal", goal, "goal tile (2048 family only; default 8192)");
    c_compile->add_option("--margin", margin, "base-pattern margin around the gadgets (>= 3)");
    c_compile->add_option("--pot-of-gold", pot, "p,q: 2^p extension columns, 2^q trailing spawns");
    c_compile->add_flag("--lenient", lenient, "pad short clauses by repeating literals");

    auto* c_solve = app.add_subcommand("solve", "search for a goal-reaching move sequence");
    c_solve->add_option("instance", instance, "instance document")->required();
    c_solve->add_option("--budget", budget, "maximum moves per line of play (default T*b^2/4)");
    c_solve->add_option("--max-states", max_states, "maximum distinct states expanded");
    c_solve->add_option("--emit-trace", emit, "write the trace document here");

    auto* c_play = app.add_subcommand("play", "interactive terminal game");
    c_play->add_option("instance", instance, "instance document")->required();

    auto* c_verify = app.add_subcommand("verify", "check satisfiability against goal reachability");
    c_verify->add_option("cnf", cnfs, "DIMACS files to check");
    c_verify->add_option("--samples", samples, "number of random formulas");
    c_verify->add_option("--max-vars", max_vars, "variables per random formula");
    c_verify->add_option("--max-clauses", max_clauses, "clauses per random formula");
    c_verify->add_option("--seed", seed, "random seed");
    c_verify->add_option("--variant", variant, "variant to compile for");
    c_verify->add_option("--max-states", max_states, "search state budget per formula");
    c_verify->add_flag("--no-shortcut", no_shortcut, "always search, even when the canonical witness works");
    c_verify->add_flag("--lenient", lenient, "pad short clauses by repeating literals");

    auto* c_render = app.add_subcommand("render", "draw an instance or a trace step");
    c_render->add_option("instance", instance, "instance document")->required();
    c_render->add_option("--svg", svg, "SVG output file");
    c_render->add_flag("--ascii", ascii, "print the board as text");
    c_render->add_option("--trace", trace, "trace document to replay");
    c_render->add_option("--step", step, "number of trace moves to apply (default: all)");
    c_render->add_option("--cell", cell, "SVG cell size in pixels");

    auto* c_serve = app.add_subcommand("serve", "HTTP/JSON bridge for the web debugger");
    c_serve->add_option("instance", instance, "instance document")->required();
    c_serve->add_option("--port", port, "TCP port");
    c_serve->add_option("--host", host, "bind address");

    auto* c_sat = app.add_subcommand("sat", "decide a DIMACS formula with DPLL (exit 10 sat, 20 unsat)");
    c_sat->add_option("cnf", cnf, "DIMACS CNF file")->required();
    c_sat->add_flag("--lenient", lenient, "pad short clauses by repeating literals");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (*c_compile) {
            rc = cmd_compile(cnf, out, variant, goal, margin, pot, lenient);
        } else if (*c_solve) {
            rc = cmd_solve(instance, budget, max_states, emit);
        } else if (*c_play) {
            rc = cmd_play(instance);
        } else if (*c_verify) {
            rc = cmd_verify(cnfs, samples, max_vars, max_clauses, seed, variant, max_states, !no_shortcut, lenient);
        } else if (*c_render) {
            rc = cmd_render(instance, svg, trace, step, cell, ascii);
        } else if (*c_serve) {
            rc = cmd_serve(instance, host, port);
        } else if (*c_sat) {
            rc = cmd_sat(cnf, lenient);
        }
    } catch (const ExitError& e) {
        std::cerr << "mergegame: " << e.message << "\n";
        return e.code;
    } catch (const std::exception& e) {
        std::cerr << "mergegame: internal error: " << e.what() << "\n";
        return kExitInternal;
    }
    return rc;
}
