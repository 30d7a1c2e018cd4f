// Command-line runner for the definable-set library: demos over infinite,
// first-order definable structures with selectable atom theory and solver
// backend.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "nlam/nlam.hpp"

namespace {

using namespace nlam;

struct RunConfig {
    AtomTheory theory = AtomTheory::equality_atoms;
    SolverBackend backend = SolverBackend::internal();
    std::string demo;
    int k = 0;  // 0: per-demo default
    std::optional<int> step_bound;
    bool verbose = false;
};

using AtomPair = std::pair<Atom, Atom>;

DefinableSet<AtomPair> distinct_pairs() {
    return filter([](const AtomPair& p) { return neq(p.first, p.second); },
                  pairs(atoms(), atoms()));
}

Graph<AtomPair> swap_graph() {
    auto vs = distinct_pairs();
    auto es = map(
        [](const AtomPair& p) {
            return std::pair<AtomPair, AtomPair>{p, {p.second, p.first}};
        },
        vs);
    return {vs, es};
}

Graph<AtomPair> overlapping_pairs_graph() {
    auto triples = filter(
        [](const std::pair<Atom, std::pair<Atom, Atom>>& t) {
            return conj(neq(t.first, t.second.first), neq(t.first, t.second.second),
                        neq(t.second.first, t.second.second));
        },
        pairs(atoms(), pairs(atoms(), atoms())));
    auto forward = map(
        [](const std::pair<Atom, std::pair<Atom, Atom>>& t) {
            return std::pair<AtomPair, AtomPair>{{t.first, t.second.first},
                                                 {t.second.first, t.second.second}};
        },
        triples);
    auto backward = map(
        [](const std::pair<AtomPair, AtomPair>& e) {
            return std::pair<AtomPair, AtomPair>{e.second, e.first};
        },
        forward);
    return {distinct_pairs(), set_union(forward, backward)};
}

std::string verdict_text(const Formula& f) {
    switch (ambient_solver().decide(f)) {
        case Verdict::valid: return "true";
        case Verdict::contradictory: return "false";
        case Verdict::contingent: return f.to_string();
    }
    return {};
}

int run(const RunConfig& cfg) {
    std::ostream& out = std::cout;

    if (cfg.demo == "atom-pairs") {
        out << pairs(atoms(), atoms()).to_string() << "\n";
        return 0;
    }
    if (cfg.demo == "transitive-closure") {
        int iterations = 0;
        auto tc = transitive_closure(distinct_pairs(), &iterations, cfg.step_bound);
        out << tc.to_string() << "\n";
        if (cfg.verbose) out << "iterations: " << iterations << "\n";
        return 0;
    }
    if (cfg.demo == "has-cycle") {
        out << verdict_text(has_cycle(swap_graph())) << "\n";
        return 0;
    }
    if (cfg.demo == "odd-cycle") {
        out << verdict_text(has_odd_length_cycle(swap_graph())) << "\n";
        return 0;
    }
    if (cfg.demo == "orbits") {
        auto orbit_list = set_orbits_list(pairs(atoms(), atoms()));
        out << "orbits: " << orbit_list.size() << "\n";
        for (const auto& o : orbit_list) out << o.to_string() << "\n";
        return 0;
    }
    if (cfg.demo == "hull") {
        Atom a = fresh_atom();
        Atom b = fresh_atom();
        out << hull(SupportList(), singleton(a)).to_string() << "\n";
        out << hull(SupportList{b}, singleton(a)).to_string() << "\n";
        out << hull(SupportList(), singleton(std::pair{a, b})).to_string() << "\n";
        return 0;
    }
    if (cfg.demo == "equivariant-coloring") {
        int k = cfg.k > 0 ? cfg.k : 2;
        out << verdict_text(has_equivariant_coloring(swap_graph(), k)) << "\n";
        return 0;
    }
    if (cfg.demo == "satan-graph") {
        int k = cfg.k > 0 ? cfg.k : 3;
        out << verdict_text(has_equivariant_coloring(overlapping_pairs_graph(), k))
            << "\n";
        return 0;
    }
    if (cfg.demo == "size-demo") {
        Atom a = fresh_atom();
        Atom b = fresh_atom();
        Atom c = fresh_atom();
        auto three = from_list(std::vector<Atom>{a, b, c});
        Variants<int> unconstrained = size(three, Context(), cfg.step_bound);
        out << display(unconstrained) << "\n";
        Formula distinct = conj(neq(a, b), neq(b, c), neq(a, c));
        Variants<int> constrained =
            when(distinct, size(three, Context(distinct), cfg.step_bound));
        out << display(constrained) << "\n";
        return 0;
    }
    std::cerr << "unknown demo: " << cfg.demo << "\n";
    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"definable-set demos over equality or ordered atoms"};

    RunConfig cfg;
    std::string theory = "equality";
    std::string backend = "internal";
    std::string solver_path;
    if (const char* env = std::getenv("NLAM_SOLVER")) solver_path = env;
    int step_bound = 0;

    app.add_option("--theory", theory, "atom theory")
        ->check(CLI::IsMember({"equality", "ordered"}));
    app.add_option("--backend", backend, "formula decision backend")
        ->check(CLI::IsMember({"internal", "smtlib"}));
    app.add_option("--solver-path", solver_path,
                   "SMT-LIB solver command for --backend smtlib "
                   "(default: $NLAM_SOLVER)");
    app.add_option("--demo", cfg.demo,
                   "one of: atom-pairs, transitive-closure, has-cycle, odd-cycle, "
                   "orbits, hull, equivariant-coloring, satan-graph, size-demo")
        ->required();
    app.add_option("--k", cfg.k, "number of colors for coloring demos")
        ->check(CLI::PositiveNumber);
    app.add_option("--step-bound", step_bound,
                   "bound for size and closure iterations (>= 1)")
        ->check(CLI::PositiveNumber);
    app.add_flag("--verbose", cfg.verbose, "report extra detail");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    cfg.theory = theory == "equality" ? AtomTheory::equality_atoms
                                      : AtomTheory::ordered_atoms;
    if (backend == "smtlib") {
        if (solver_path.empty()) {
            std::cerr << "--backend smtlib needs --solver-path or $NLAM_SOLVER\n";
            return 1;
        }
        cfg.backend = SolverBackend::smtlib(solver_path);
    }
    if (step_bound > 0) cfg.step_bound = step_bound;

    // Deterministic variable numbering per run.
    reset_fresh_names();
    ScopedSolver scope(cfg.theory, cfg.backend);

    try {
        return run(cfg);
    } catch (const StepBoundExceeded& e) {
        std::cerr << e.what() << "\n";
        return 3;
    } catch (const BackendError& e) {
        std::cerr << "solver failure: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
