#include <atomic>
#include <set>
#include <thread>

#include "doctest.h"
#include "testutil.hpp"

using namespace nlam;
using nlamtest::FormulaGen;
using nlamtest::oracle_decide;

namespace {

const AtomVariable a("a"), b("b"), c("c");
const AtomVariable x("x");

}  // namespace

TEST_CASE("quantifier elimination: equality atoms") {
    auto th = AtomTheory::equality_atoms;
    CHECK(eliminate_quantifiers(
              exists(x, conj(Formula::neq(x, a), Formula::neq(x, b))), th)
              .is_true());
    CHECK(eliminate_quantifiers(for_all(x, Formula::eq(x, a)), th).is_false());

    Formula r = eliminate_quantifiers(exists(x, Formula::eq(x, a)), th);
    CHECK(r.is_true());
}

TEST_CASE("quantifier elimination: ordered atoms") {
    auto th = AtomTheory::ordered_atoms;
    CHECK(eliminate_quantifiers(
              exists(x, conj(Formula::lt(a, x), Formula::lt(x, b))), th) ==
          Formula::lt(a, b));
    CHECK(eliminate_quantifiers(exists(x, Formula::lt(x, a)), th).is_true());
    CHECK(eliminate_quantifiers(exists(x, Formula::lt(a, x)), th).is_true());
    CHECK(eliminate_quantifiers(for_all(x, Formula::leq(a, x)), th).is_false());
}

TEST_CASE("quantifier elimination output is quantifier-free over input variables") {
    for (AtomTheory th : {AtomTheory::equality_atoms, AtomTheory::ordered_atoms}) {
        FormulaGen gen{std::mt19937(37), th};
        auto vars = nlamtest::named_vars({"a", "b", "c", "d"});
        for (int i = 0; i < 100; ++i) {
            Formula f = gen(vars);
            Formula g = eliminate_quantifiers(f, th);
            CHECK(g.quantifier_free());
            for (const auto& v : g.free_variables())
                CHECK(std::find(vars.begin(), vars.end(), v) != vars.end());
        }
    }
}

TEST_CASE("quantifier elimination agrees with the finite-model oracle") {
    for (AtomTheory th : {AtomTheory::equality_atoms, AtomTheory::ordered_atoms}) {
        FormulaGen gen{std::mt19937(41), th};
        auto vars = nlamtest::named_vars({"a", "b", "c", "d"});
        for (int i = 0; i < 200; ++i) {
            Formula f = gen(vars);
            Formula g = eliminate_quantifiers(f, th);
            for (auto& asgn : nlamtest::all_assignments(f.free_variables())) {
                auto copy = asgn;
                CAPTURE(f.to_string());
                REQUIRE(nlamtest::eval_formula(f, asgn, th) ==
                        nlamtest::eval_formula(g, copy, th));
            }
        }
    }
}

TEST_CASE("signature errors") {
    CHECK_THROWS_AS(
        eliminate_quantifiers(Formula::leq(a, b), AtomTheory::equality_atoms),
        std::invalid_argument);
    Solver s(AtomTheory::equality_atoms);
    CHECK_THROWS_AS(s.decide(Formula::leq(a, b)), std::invalid_argument);
}

TEST_CASE("decide") {
    Solver s(AtomTheory::equality_atoms);
    CHECK(s.decide(Formula::eq(a, a)) == Verdict::valid);
    CHECK(s.decide(Formula::eq(a, b)) == Verdict::contingent);
    CHECK(s.decide(conj(Formula::eq(a, b), Formula::neq(a, b))) ==
          Verdict::contradictory);

    Solver o(AtomTheory::ordered_atoms);
    CHECK(o.decide(disj(Formula::leq(a, b), Formula::leq(b, a))) == Verdict::valid);
    CHECK(o.decide(exists(x, Formula::lt(a, x))) == Verdict::valid);
}

TEST_CASE("decide is stable under alpha-conversion and simplification") {
    for (AtomTheory th : {AtomTheory::equality_atoms, AtomTheory::ordered_atoms}) {
        Solver s(th);
        FormulaGen gen{std::mt19937(43), th};
        auto vars = nlamtest::named_vars({"a", "b", "c"});
        for (int i = 0; i < 60; ++i) {
            Formula f = gen(vars);
            CHECK(s.decide(f) == s.decide(simplify(f)));
            Formula renamed = substitute(f, {{a, AtomVariable("r")}});
            Formula back = substitute(renamed, {{AtomVariable("r"), a}});
            CHECK(s.decide(f) == s.decide(back));
        }
    }
}

TEST_CASE("unsatisfiability is monotone under conjunction") {
    for (AtomTheory th : {AtomTheory::equality_atoms, AtomTheory::ordered_atoms}) {
        Solver s(th);
        FormulaGen gen{std::mt19937(47), th};
        auto vars = nlamtest::named_vars({"a", "b", "c"});
        int hits = 0;
        for (int i = 0; i < 200 && hits < 25; ++i) {
            Formula f = gen(vars, 3);
            if (s.decide(f) != Verdict::contradictory) continue;
            ++hits;
            Formula g = gen(vars, 3);
            CHECK(s.decide(conj(f, g)) == Verdict::contradictory);
        }
        CHECK(hits > 0);
    }
}

TEST_CASE("implies_under") {
    Solver s(AtomTheory::equality_atoms);
    CHECK(s.implies_under(Formula::eq(a, b), Formula::eq(a, b)) == Determination::yes);
    CHECK(s.implies_under(Formula::truth(), Formula::eq(a, b)) ==
          Determination::undetermined);
    Solver o(AtomTheory::ordered_atoms);
    CHECK(o.implies_under(conj(Formula::leq(a, b), Formula::leq(b, a)),
                          Formula::eq(a, b)) == Determination::yes);
}

TEST_CASE("verdict cache") {
    Solver s(AtomTheory::equality_atoms);
    Formula f = disj(Formula::eq(a, b), Formula::eq(b, c));
    (void)s.decide(f);
    std::size_t computed = s.decisions_computed();
    (void)s.decide(f);
    (void)s.decide(f);
    CHECK(s.decisions_computed() == computed);
}

TEST_CASE("smtlib script shape") {
    Formula f = conj(Formula::eq(a, b), neg(Formula::leq(b, c)));
    CHECK(smtlib_script(f, AtomTheory::ordered_atoms) ==
          "(set-logic LRA)\n"
          "(declare-const a Real)\n"
          "(declare-const b Real)\n"
          "(declare-const c Real)\n"
          "(assert (and (= a b) (not (<= b c))))\n"
          "(check-sat)\n");
    CHECK(smtlib_script(Formula::eq(a, b), AtomTheory::equality_atoms) ==
          "(set-logic LIA)\n"
          "(declare-const a Int)\n"
          "(declare-const b Int)\n"
          "(assert (= a b))\n"
          "(check-sat)\n");
    CHECK_THROWS_AS(smtlib_script(exists(x, Formula::eq(x, a)),
                                  AtomTheory::equality_atoms),
                    std::invalid_argument);
}

TEST_CASE("unknown and garbage solver answers are backend errors") {
    // A "solver" that always answers unknown: unknown has no verdict meaning.
    Solver s(AtomTheory::equality_atoms, SolverBackend::smtlib("echo unknown"));
    CHECK_THROWS_AS(s.decide(Formula::eq(a, b)), BackendError);
    CHECK_THROWS_AS(
        smt_check_sat(Formula::eq(a, b), AtomTheory::equality_atoms, "echo unknown"),
        BackendError);
}

TEST_CASE("decide and the fresh-name supply are safe under concurrency") {
    Solver s(AtomTheory::ordered_atoms);
    std::vector<std::thread> workers;
    std::atomic<int> disagreements{0};
    for (int t = 0; t < 4; ++t) {
        workers.emplace_back([&s, &disagreements] {
            FormulaGen gen{std::mt19937(59), AtomTheory::ordered_atoms};
            auto vars = nlamtest::named_vars({"a", "b"});
            for (int i = 0; i < 40; ++i) {
                Formula f = gen(vars, 3);
                Verdict v = s.decide(f);
                (void)fresh_atom_variable();
                if (v != s.decide(f)) ++disagreements;
            }
        });
    }
    for (auto& w : workers) w.join();
    CHECK(disagreements == 0);

    std::set<std::string> names;
    for (int i = 0; i < 100; ++i) names.insert(fresh_atom_variable().name);
    CHECK(names.size() == 100);
}

TEST_CASE("external solver" * doctest::skip(!nlamtest::smt_solver_available())) {
    const std::string cmd = nlamtest::smt_solver_command();

    SUBCASE("one-shot check-sat") {
        CHECK(smt_check_sat(neg(Formula::eq(a, a)), AtomTheory::equality_atoms, cmd) ==
              SmtResult::unsat);
        CHECK(smt_check_sat(conj(Formula::leq(a, b), Formula::leq(b, c),
                                 neg(Formula::leq(a, c))),
                            AtomTheory::ordered_atoms, cmd) == SmtResult::unsat);
        CHECK(smt_check_sat(neg(Formula::eq(a, b)), AtomTheory::equality_atoms, cmd) ==
              SmtResult::sat);
    }

    SUBCASE("backend failure is loud") {
        CHECK_THROWS_AS(
            smt_check_sat(Formula::eq(a, b), AtomTheory::equality_atoms,
                          "/nonexistent/solver-binary"),
            BackendError);
    }

    SUBCASE("verdicts agree with the internal backend") {
        for (AtomTheory th : {AtomTheory::equality_atoms, AtomTheory::ordered_atoms}) {
            Solver internal(th);
            Solver external(th, SolverBackend::smtlib(cmd));
            FormulaGen gen{std::mt19937(53), th};
            auto vars = nlamtest::named_vars({"a", "b", "c"});
            for (int i = 0; i < 40; ++i) {
                Formula f = gen(vars, 3);
                CAPTURE(f.to_string());
                CHECK(internal.decide(f) == external.decide(f));
            }
        }
    }
}
