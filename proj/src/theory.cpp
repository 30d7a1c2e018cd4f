#include "nlam/theory.hpp"

#include <algorithm>
#include <cassert>
#include <set>
#include <stdexcept>

#include "nlam/smtlib_detail.hpp"

namespace nlam {

std::string_view theory_name(AtomTheory t) {
    return t == AtomTheory::equality_atoms ? "equality" : "ordered";
}

std::string_view smt_logic(AtomTheory t) {
    return t == AtomTheory::equality_atoms ? "LIA" : "LRA";
}

std::string_view to_string(Verdict v) {
    switch (v) {
        case Verdict::valid: return "valid";
        case Verdict::contradictory: return "contradictory";
        case Verdict::contingent: return "contingent";
    }
    return "?";
}

namespace {

using Kind = Formula::Kind;
using Rel = Formula::Rel;

void check_signature(const Formula& f, AtomTheory theory) {
    if (theory == AtomTheory::ordered_atoms) return;
    switch (f.kind()) {
        case Kind::relation:
            if (f.rel() == Rel::leq)
                throw std::invalid_argument(
                    "signature error: <= is not available under equality atoms");
            return;
        case Kind::exists:
        case Kind::forall:
            check_signature(f.body(), theory);
            return;
        default:
            for (const auto& k : f.operands()) check_signature(k, theory);
            return;
    }
}

// Negation normal form of a quantifier-free formula.
Formula nnf(const Formula& f, bool positive) {
    switch (f.kind()) {
        case Kind::truth:
        case Kind::falsity:
        case Kind::relation:
            return positive ? f : neg(f);
        case Kind::negation:
            return nnf(f.operands()[0], !positive);
        case Kind::conjunction:
        case Kind::disjunction: {
            std::vector<Formula> kids;
            kids.reserve(f.operands().size());
            for (const auto& k : f.operands()) kids.push_back(nnf(k, positive));
            const bool as_conj = (f.kind() == Kind::conjunction) == positive;
            return as_conj ? conj(std::move(kids)) : disj(std::move(kids));
        }
        case Kind::exists:
        case Kind::forall:
            break;
    }
    throw std::logic_error("nnf: input must be quantifier-free");
}

// Virtual test points for one existential variable.
struct TestPoint {
    enum class Kind { plain, fresh, minus_inf, just_above } kind;
    AtomVariable at;  // plain / just_above
};

// Substitutes a test point for v. Virtual points assign every atom a definite
// truth value, so the substitution commutes with all connectives.
Formula virtual_subst(const Formula& f, const AtomVariable& v, const TestPoint& p) {
    switch (f.kind()) {
        case Kind::truth:
        case Kind::falsity:
            return f;
        case Kind::relation: {
            const bool l = f.lhs() == v;
            const bool r = f.rhs() == v;
            if (!l && !r) return f;
            if (l && r) return Formula::truth();  // v = v, v <= v
            if (p.kind == TestPoint::Kind::plain) {
                const AtomVariable& a = l ? p.at : f.lhs();
                const AtomVariable& b = r ? p.at : f.rhs();
                return f.rel() == Rel::eq ? Formula::eq(a, b) : Formula::leq(a, b);
            }
            if (f.rel() == Rel::eq) return Formula::falsity();
            // <= with exactly one side being v:
            const AtomVariable& t = l ? f.rhs() : f.lhs();
            switch (p.kind) {
                case TestPoint::Kind::minus_inf:
                    return l ? Formula::truth() : Formula::falsity();
                case TestPoint::Kind::just_above:
                    // (u+eps) <= t  iff  u < t;   t <= (u+eps)  iff  t <= u
                    return l ? Formula::lt(p.at, t) : Formula::leq(t, p.at);
                case TestPoint::Kind::fresh:
                case TestPoint::Kind::plain:
                    break;
            }
            throw std::logic_error("virtual_subst: bad point for <=");
        }
        case Kind::negation:
            return neg(virtual_subst(f.operands()[0], v, p));
        case Kind::conjunction:
        case Kind::disjunction: {
            std::vector<Formula> kids;
            kids.reserve(f.operands().size());
            for (const auto& k : f.operands()) kids.push_back(virtual_subst(k, v, p));
            return f.kind() == Kind::conjunction ? conj(std::move(kids))
                                                 : disj(std::move(kids));
        }
        case Kind::exists:
        case Kind::forall:
            break;
    }
    throw std::logic_error("virtual_subst: input must be quantifier-free");
}

// Variables other than v sharing an atom with v.
void collect_companions(const Formula& f, const AtomVariable& v,
                        std::set<AtomVariable>& out) {
    switch (f.kind()) {
        case Kind::relation:
            if (f.lhs() == v && f.rhs() != v) out.insert(f.rhs());
            if (f.rhs() == v && f.lhs() != v) out.insert(f.lhs());
            return;
        case Kind::exists:
        case Kind::forall:
            collect_companions(f.body(), v, out);
            return;
        default:
            for (const auto& k : f.operands()) collect_companions(k, v, out);
            return;
    }
}

Formula eliminate_core(const AtomVariable& v, const Formula& psi, AtomTheory theory) {
    std::set<AtomVariable> companions;
    collect_companions(psi, v, companions);

    std::vector<Formula> disjuncts;
    for (const auto& u : companions)
        disjuncts.push_back(virtual_subst(psi, v, {TestPoint::Kind::plain, u}));
    if (theory == AtomTheory::equality_atoms) {
        // The domain is infinite: either v equals one of its companions, or
        // it is a fresh value falsifying every equality atom on v.
        disjuncts.push_back(virtual_subst(psi, v, {TestPoint::Kind::fresh, {}}));
    } else {
        // Dense order without endpoints: v equals a companion, sits just
        // above one, or lies below all of them.
        disjuncts.push_back(virtual_subst(psi, v, {TestPoint::Kind::minus_inf, {}}));
        for (const auto& u : companions)
            disjuncts.push_back(virtual_subst(psi, v, {TestPoint::Kind::just_above, u}));
    }
    return disj(std::move(disjuncts));
}

// Eliminates one existential from a quantifier-free body.
Formula eliminate_exists(const AtomVariable& v, const Formula& qf, AtomTheory theory) {
    if (!qf.mentions(v)) return qf;
    Formula f = nnf(qf, true);
    if (f.kind() == Kind::disjunction) {
        std::vector<Formula> kids;
        kids.reserve(f.operands().size());
        for (const auto& k : f.operands()) kids.push_back(eliminate_exists(v, k, theory));
        return disj(std::move(kids));
    }
    if (f.kind() == Kind::conjunction) {
        std::vector<Formula> with_v, without_v;
        for (const auto& k : f.operands())
            (k.mentions(v) ? with_v : without_v).push_back(k);
        if (!without_v.empty()) {
            Formula inner = eliminate_exists(v, conj(std::move(with_v)), theory);
            without_v.push_back(std::move(inner));
            return conj(std::move(without_v));
        }
    }
    return eliminate_core(v, f, theory);
}

Formula eliminate_rec(const Formula& f, AtomTheory theory) {
    switch (f.kind()) {
        case Kind::truth:
        case Kind::falsity:
        case Kind::relation:
            return f;
        case Kind::negation:
            return neg(eliminate_rec(f.operands()[0], theory));
        case Kind::conjunction:
        case Kind::disjunction: {
            std::vector<Formula> kids;
            kids.reserve(f.operands().size());
            for (const auto& k : f.operands()) kids.push_back(eliminate_rec(k, theory));
            return f.kind() == Kind::conjunction ? conj(std::move(kids))
                                                 : disj(std::move(kids));
        }
        case Kind::exists:
            return eliminate_exists(f.bound(), eliminate_rec(f.body(), theory), theory);
        case Kind::forall:
            return neg(eliminate_exists(f.bound(),
                                        neg(eliminate_rec(f.body(), theory)), theory));
    }
    return f;
}

}  // namespace

Formula eliminate_quantifiers(const Formula& phi, AtomTheory theory) {
    check_signature(phi, theory);
    return simplify(eliminate_rec(phi, theory));
}

// --------------------------------------------------------------------------
// Solver

Solver::Solver(AtomTheory theory, SolverBackend backend)
    : theory_(theory), backend_(std::move(backend)) {}

Solver::~Solver() = default;

Verdict Solver::decide(const Formula& phi) const {
    const std::string key = phi.canonical_key();
    {
        std::shared_lock lock(cache_mutex_);
        auto it = cache_.find(key);
        if (it != cache_.end()) return it->second;
    }
    Verdict v = decide_uncached(phi);
    {
        std::unique_lock lock(cache_mutex_);
        cache_.emplace(key, v);
        ++computed_;
    }
    return v;
}

Verdict Solver::decide_uncached(const Formula& phi) const {
    if (backend_.kind == SolverBackend::Kind::internal) {
        const auto& fv = phi.free_variables();
        Formula closed = eliminate_quantifiers(forall_closure(fv, phi), theory_);
        if (!closed.is_true() && !closed.is_false())
            throw std::logic_error("decide: closure did not reduce to a truth value");
        if (closed.is_true()) return Verdict::valid;
        Formula negated = eliminate_quantifiers(forall_closure(fv, neg(phi)), theory_);
        if (!negated.is_true() && !negated.is_false())
            throw std::logic_error("decide: closure did not reduce to a truth value");
        if (negated.is_true()) return Verdict::contradictory;
        return Verdict::contingent;
    }

    // External solvers do not deal well with quantifiers over these theories;
    // eliminate them first, then ask two satisfiability queries.
    Formula qf = eliminate_quantifiers(phi, theory_);
    std::lock_guard lock(pipe_mutex_);
    if (!pipe_) pipe_ = std::make_unique<detail::SmtPipe>(backend_.solver_command);
    try {
        if (pipe_->check_sat(smtlib_script(neg(qf), theory_)) == SmtResult::unsat)
            return Verdict::valid;
        if (pipe_->check_sat(smtlib_script(qf, theory_)) == SmtResult::unsat)
            return Verdict::contradictory;
        return Verdict::contingent;
    } catch (const BackendError&) {
        // The stream may be out of step after a failure; respawn next call.
        pipe_.reset();
        throw;
    }
}

Determination Solver::implies_under(const Formula& context, const Formula& phi) const {
    if (phi.is_true()) return Determination::yes;
    if (decide(implies(context, phi)) == Verdict::valid) return Determination::yes;
    if (decide(implies(context, neg(phi))) == Verdict::valid) return Determination::no;
    return Determination::undetermined;
}

std::size_t Solver::decisions_computed() const {
    std::shared_lock lock(cache_mutex_);
    return computed_;
}

// --------------------------------------------------------------------------
// Ambient solver

namespace {

std::mutex g_ambient_mutex;

std::shared_ptr<const Solver>& ambient_slot() {
    static std::shared_ptr<const Solver> solver =
        std::make_shared<Solver>(AtomTheory::equality_atoms);
    return solver;
}

}  // namespace

const Solver& ambient_solver() { return *ambient_solver_ptr(); }

std::shared_ptr<const Solver> ambient_solver_ptr() {
    std::lock_guard lock(g_ambient_mutex);
    return ambient_slot();
}

void set_ambient_solver(std::shared_ptr<const Solver> solver) {
    if (!solver) throw std::invalid_argument("set_ambient_solver: null solver");
    std::lock_guard lock(g_ambient_mutex);
    ambient_slot() = std::move(solver);
}

ScopedSolver::ScopedSolver(std::shared_ptr<const Solver> solver)
    : previous_(ambient_solver_ptr()) {
    set_ambient_solver(std::move(solver));
}

ScopedSolver::ScopedSolver(AtomTheory theory, SolverBackend backend)
    : ScopedSolver(std::make_shared<Solver>(theory, std::move(backend))) {}

ScopedSolver::~ScopedSolver() { set_ambient_solver(previous_); }

}  // namespace nlam
