#pragma once

#include <memory>
#include <mutex>
#include <shared_mutex>
#include <string>
#include <unordered_map>

#include "nlam/formula.hpp"

namespace nlam {

/// The two supported atom structures: the countable pure set (natural numbers
/// with equality) and the dense total order without endpoints (rationals
/// with <=).
enum class AtomTheory { equality_atoms, ordered_atoms };

std::string_view theory_name(AtomTheory t);

/// SMT-LIB logic used to encode each theory.
std::string_view smt_logic(AtomTheory t);

enum class Verdict { valid, contradictory, contingent };
enum class Determination { yes, no, undetermined };
enum class SmtResult { sat, unsat };

std::string_view to_string(Verdict v);

/// Raised when the external solver misbehaves: nonzero exit, `unknown`, or
/// unparsable output. Carries the solver's diagnostic text. Never silently
/// mapped to a Verdict.
class BackendError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised by size/transitive-closure style iterations when a configured step
/// bound is exceeded.
class StepBoundExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Rewrites phi to an equivalent quantifier-free formula over the given
/// theory. Free variables of the result are among those of phi.
///
/// Ordered atoms use virtual substitution with test points (lower bounds,
/// points just above them, and minus infinity); equality atoms use the
/// simplified variant that case-splits the bound variable against the other
/// variables of its atoms plus a fresh value. Universal quantifiers are
/// handled as negated existentials.
///
/// Throws std::invalid_argument if phi uses <= under equality atoms.
Formula eliminate_quantifiers(const Formula& phi, AtomTheory theory);

/// The SMT-LIB v2 script for a satisfiability query of a quantifier-free
/// formula: (set-logic ...), one (declare-const ...) per free variable,
/// (assert ...), (check-sat).
std::string smtlib_script(const Formula& phi, AtomTheory theory);

/// Runs one satisfiability query against an external SMT-LIB v2 solver
/// executable (one-shot subprocess; the script is passed as a file argument).
/// phi must be quantifier-free. Throws BackendError on solver failure.
SmtResult smt_check_sat(const Formula& phi, AtomTheory theory,
                        const std::string& solver_command);

struct SolverBackend {
    enum class Kind { internal, smtlib };
    Kind kind = Kind::internal;
    /// Command line (whitespace-separated) of a solver that accepts SMT-LIB
    /// scripts on stdin, e.g. "z3 -in" or the bundled tools/z3smt wrapper.
    std::string solver_command;

    static SolverBackend internal() { return {}; }
    static SolverBackend smtlib(std::string command) {
        return {Kind::smtlib, std::move(command)};
    }
};

namespace detail {
class SmtPipe;
}

/// Decides formulas over a fixed theory and backend. Verdicts are cached by
/// canonical formula; the cache is safe for concurrent use. With the smtlib
/// backend a single solver subprocess is kept alive and queries to it are
/// serialized.
class Solver {
public:
    explicit Solver(AtomTheory theory,
                    SolverBackend backend = SolverBackend::internal());
    ~Solver();

    Solver(const Solver&) = delete;
    Solver& operator=(const Solver&) = delete;

    AtomTheory theory() const { return theory_; }
    const SolverBackend& backend() const { return backend_; }

    /// valid iff the universal closure of phi holds in the theory's countable
    /// model; contradictory iff the closure of ¬phi does; contingent
    /// otherwise.
    Verdict decide(const Formula& phi) const;

    bool is_valid(const Formula& phi) const { return decide(phi) == Verdict::valid; }
    bool is_contradictory(const Formula& phi) const {
        return decide(phi) == Verdict::contradictory;
    }

    /// yes iff context ⟹ phi is valid; no iff context ⟹ ¬phi is valid.
    Determination implies_under(const Formula& context, const Formula& phi) const;

    /// Number of decisions answered without the cache (diagnostics).
    std::size_t decisions_computed() const;

private:
    Verdict decide_uncached(const Formula& phi) const;

    AtomTheory theory_;
    SolverBackend backend_;
    mutable std::shared_mutex cache_mutex_;
    mutable std::unordered_map<std::string, Verdict> cache_;
    mutable std::size_t computed_ = 0;
    mutable std::unique_ptr<detail::SmtPipe> pipe_;
    mutable std::mutex pipe_mutex_;
};

/// The process-wide solver consulted by set and conditional operations.
/// Defaults to equality atoms with the internal backend.
const Solver& ambient_solver();
std::shared_ptr<const Solver> ambient_solver_ptr();
void set_ambient_solver(std::shared_ptr<const Solver> solver);

/// RAII scope for switching the ambient solver (tests, CLI runs).
class ScopedSolver {
public:
    explicit ScopedSolver(std::shared_ptr<const Solver> solver);
    ScopedSolver(AtomTheory theory, SolverBackend backend = SolverBackend::internal());
    ~ScopedSolver();

    ScopedSolver(const ScopedSolver&) = delete;
    ScopedSolver& operator=(const ScopedSolver&) = delete;

private:
    std::shared_ptr<const Solver> previous_;
};

}  // namespace nlam
