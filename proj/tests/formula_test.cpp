#include "doctest.h"
#include "testutil.hpp"

using namespace nlam;
using nlamtest::FormulaGen;
using nlamtest::oracle_decide;

namespace {

const AtomVariable a("a"), b("b"), c("c"), d("d");

std::vector<AtomVariable> fv(const Formula& f) { return f.free_variables(); }

}  // namespace

TEST_CASE("free variables") {
    CHECK(fv(Formula::eq(a, b)) == std::vector<AtomVariable>{a, b});
    CHECK(fv(exists(AtomVariable("x"), Formula::eq(AtomVariable("x"), a))) ==
          std::vector<AtomVariable>{a});
    CHECK(fv(Formula::truth()).empty());
}

TEST_CASE("substitution") {
    CHECK(substitute(Formula::eq(a, b), {{a, c}}) == Formula::eq(c, b));

    // Binding the mapped-in name must not capture it.
    AtomVariable x("x");
    Formula f = exists(x, Formula::eq(x, a));
    Formula g = substitute(f, {{a, x}});
    CHECK(g.kind() == Formula::Kind::exists);
    CHECK(fv(g) == std::vector<AtomVariable>{x});
    CHECK(g == exists(AtomVariable("y"), Formula::eq(AtomVariable("y"), x)));

    // Simultaneous substitution collapses both conjuncts to a <= a.
    Formula h = substitute(conj(Formula::leq(a, b), Formula::leq(b, a)), {{b, a}});
    CHECK(h == Formula::leq(a, a));
    CHECK(fv(h) == std::vector<AtomVariable>{a});
    CHECK(simplify(h).is_true());
}

TEST_CASE("substitute preserves the image of free variables") {
    FormulaGen gen{std::mt19937(7), AtomTheory::ordered_atoms};
    auto vars = nlamtest::named_vars({"a", "b", "c"});
    for (int i = 0; i < 200; ++i) {
        Formula f = gen(vars);
        Formula g = substitute(f, {{a, c}, {b, d}});
        std::vector<AtomVariable> expect;
        for (const auto& v : f.free_variables()) {
            AtomVariable t = v == a ? c : (v == b ? d : v);
            if (std::find(expect.begin(), expect.end(), t) == expect.end())
                expect.push_back(t);
        }
        std::sort(expect.begin(), expect.end());
        CHECK(g.free_variables() == expect);
        CHECK(substitute(f, {}) == f);
    }
}

TEST_CASE("simplify") {
    Formula phi = Formula::eq(a, b);
    CHECK(simplify(conj(phi, Formula::truth())) == phi);
    CHECK(simplify(Formula::eq(a, a)).is_true());
    CHECK(simplify(Formula::leq(a, a)).is_true());
    CHECK(simplify(neg(neg(phi))) == phi);
    CHECK(simplify(disj(phi, neg(phi))).is_true());
    CHECK(simplify(conj(phi, neg(phi))).is_false());
    CHECK(simplify(disj(phi, Formula::falsity())) == phi);
}

TEST_CASE("simplify preserves the verdict in both theories") {
    for (AtomTheory th : {AtomTheory::equality_atoms, AtomTheory::ordered_atoms}) {
        FormulaGen gen{std::mt19937(11), th};
        auto vars = nlamtest::named_vars({"a", "b", "c"});
        for (int i = 0; i < 150; ++i) {
            Formula f = gen(vars);
            CHECK(oracle_decide(simplify(f), th) == oracle_decide(f, th));
        }
    }
}

TEST_CASE("connective canonicalization") {
    Formula f = conj(Formula::eq(a, b), conj(Formula::eq(c, d), Formula::eq(a, b)));
    CHECK(f.operands().size() == 2);  // flattened and deduplicated
    CHECK(f == conj(Formula::eq(c, d), Formula::eq(a, b)));

    // Idempotent: rebuilding a canonical formula changes nothing.
    Formula g = disj(f, neg(f));
    std::vector<Formula> kids(g.operands().begin(), g.operands().end());
    CHECK(disj(std::move(kids)) == g);
}

TEST_CASE("alpha-equivalent formulas compare equal") {
    AtomVariable x("x"), y("y");
    CHECK(exists(x, Formula::neq(x, a)) == exists(y, Formula::neq(y, a)));
    CHECK(for_all(x, exists(y, conj(Formula::eq(x, y), Formula::eq(x, a)))) ==
          for_all(y, exists(x, conj(Formula::eq(y, x), Formula::eq(y, a)))));
    CHECK(exists(x, Formula::eq(x, a)) != exists(x, Formula::eq(x, b)));
}

TEST_CASE("quantifier construction") {
    AtomVariable x("x");
    CHECK(exists(x, Formula::truth()).is_true());
    CHECK(for_all(x, Formula::falsity()).is_false());
    CHECK(exists(x, Formula::eq(a, b)) == Formula::eq(a, b));  // x unused
}

TEST_CASE("pretty-printing and parsing round-trip") {
    AtomVariable x("x");
    std::vector<Formula> samples = {
        Formula::truth(),
        Formula::falsity(),
        Formula::eq(a, b),
        Formula::lt(a, b),
        neg(conj(Formula::eq(a, b), Formula::leq(b, c))),
        disj(conj(Formula::eq(a, b), Formula::neq(b, c)), Formula::leq(a, c)),
        exists(x, conj(Formula::neq(x, a), Formula::neq(x, b))),
        for_all(x, exists(AtomVariable("y"), Formula::leq(x, AtomVariable("y")))),
    };
    for (const auto& f : samples) {
        CAPTURE(f.to_string());
        CHECK(parse_formula(f.to_string()) == f);
    }

    // ASCII spellings parse to the same formulas.
    CHECK(parse_formula("a = b & ~(b <= c)") ==
          conj(Formula::eq(a, b), neg(Formula::leq(b, c))));
    CHECK(parse_formula("exists x. x != a | false") ==
          exists(x, Formula::neq(x, a)));
    CHECK(parse_formula("a < b") == Formula::lt(a, b));
    CHECK_THROWS_AS(parse_formula("a = "), std::invalid_argument);
    CHECK_THROWS_AS(parse_formula("(a = b"), std::invalid_argument);
}

TEST_CASE("random parse round-trips") {
    for (AtomTheory th : {AtomTheory::equality_atoms, AtomTheory::ordered_atoms}) {
        FormulaGen gen{std::mt19937(23), th};
        auto vars = nlamtest::named_vars({"a", "b", "c", "d"});
        for (int i = 0; i < 100; ++i) {
            Formula f = gen(vars);
            CAPTURE(f.to_string());
            CHECK(parse_formula(f.to_string()) == f);
        }
    }
}

TEST_CASE("fresh names are distinct and reserved names rejected") {
    AtomVariable v1 = fresh_atom_variable();
    AtomVariable v2 = fresh_atom_variable();
    CHECK(v1 != v2);
    CHECK_THROWS_AS(substitute(Formula::eq(a, b), {{a, AtomVariable("$0")}}),
                    std::invalid_argument);
}
