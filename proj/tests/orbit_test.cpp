#include "doctest.h"
#include "testutil.hpp"

using namespace nlam;

namespace {

const AtomVariable va("a"), vb("b"), vc("c");
const Atom A(va), B(vb), C(vc);

bool valid(const Formula& f) { return ambient_solver().is_valid(f); }

// Independent counting oracle: the number of ways k elements can relate is
// the Bell number for equality atoms (set partitions) and the Fubini number
// for ordered atoms (weak orders). Computed from first principles here.
long long binom(int n, int k) {
    if (k < 0 || k > n) return 0;
    long long r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - i + 1) / i;
    return r;
}

long long bell(int n) {
    if (n == 0) return 1;
    long long total = 0;
    for (int k = 0; k < n; ++k) total += binom(n - 1, k) * bell(k);
    return total;
}

long long fubini(int n) {
    if (n == 0) return 1;
    long long total = 0;
    for (int k = 1; k <= n; ++k) total += binom(n, k) * fubini(n - k);
    return total;
}

}  // namespace

TEST_CASE("orbit of a single atom") {
    CHECK(valid(eq_set(orbit(SupportList(), A), atoms())));
    CHECK(valid(eq_set(orbit(SupportList{A}, A), singleton(A))));
}

TEST_CASE("orbit of a pair tracks the atomic diagram") {
    auto o = orbit(SupportList(), std::pair{A, B});
    REQUIRE(o.entries().size() == 1);
    CHECK(o.entries()[0].binders.size() == 2);

    // Exactly the pairs whose components relate as a and b do.
    Formula same = Formula::eq(va, vb);
    CHECK(valid(implies(same, eq_set(o, map([](const Atom& x) {
        return std::pair{x, x}; }, atoms())))));
    auto distinct_pairs = filter(
        [](const std::pair<Atom, Atom>& p) { return neq(p.first, p.second); },
        pairs(atoms(), atoms()));
    CHECK(valid(implies(neg(same), eq_set(o, distinct_pairs))));

    CHECK(valid(member(std::pair{A, B}, o)));
}

TEST_CASE("element always lies in its own orbit") {
    CHECK(valid(member(A, orbit(SupportList(), A))));
    CHECK(valid(member(std::pair{A, B}, orbit(SupportList{C}, std::pair{A, B}))));
    ScopedSolver ordered(AtomTheory::ordered_atoms);
    CHECK(valid(member(std::pair{A, B}, orbit(SupportList(), std::pair{A, B}))));
}

TEST_CASE("hull") {
    CHECK(valid(eq_set(hull(SupportList(), singleton(A)), atoms())));

    // Fixing b, the hull of {a} under a ≠ b is everything except b.
    auto h = hull(SupportList{B}, singleton(A));
    auto not_b = filter([](const Atom& x) { return neq(x, B); }, atoms());
    CHECK(valid(implies(Formula::neq(va, vb), eq_set(h, not_b))));

    SUBCASE("ordered pairs") {
        ScopedSolver ordered(AtomTheory::ordered_atoms);
        auto hp = hull(SupportList(), singleton(std::pair{A, B}));
        auto increasing = filter(
            [](const std::pair<Atom, Atom>& p) {
                return Formula::lt(p.first.variable(), p.second.variable());
            },
            pairs(atoms(), atoms()));
        CHECK(valid(implies(Formula::lt(va, vb), eq_set(hp, increasing))));
    }
}

TEST_CASE("hull is a closure and commutes with renamings") {
    auto distinct_pairs = filter(
        [](const std::pair<Atom, Atom>& p) { return neq(p.first, p.second); },
        pairs(atoms(), atoms()));
    auto once = hull(SupportList(), distinct_pairs);
    CHECK(valid(eq_set(hull(SupportList(), once), once)));

    auto s = set_union(singleton(std::pair{A, B}), singleton(std::pair{B, C}));
    auto rename = [](const AtomVariable& v) { return AtomVariable(v.name + "_r"); };
    CHECK(valid(eq_set(group_action(rename, hull(SupportList(), s)),
                       hull(SupportList(), group_action(rename, s)))));
}

TEST_CASE("supports") {
    CHECK(valid(supports(SupportList{A}, A)));
    CHECK(ambient_solver().is_contradictory(supports(SupportList(), A)));
    CHECK(valid(supports(SupportList{A, B}, std::pair{A, B})));
}

TEST_CASE("least support") {
    auto ls = least_support(std::pair{A, B});
    CHECK(ls.variables() == std::vector<AtomVariable>{va, vb});

    CHECK(least_support(atoms()).variables().empty());

    // insert(a, atoms()) equals atoms(), so nothing needs fixing.
    CHECK(least_support(insert(A, atoms())).variables().empty());
}

TEST_CASE("set_orbit") {
    auto all_pairs = pairs(atoms(), atoms());
    auto diag = set_orbit(all_pairs, std::pair{A, A});
    CHECK(valid(eq_set(diag, map([](const Atom& x) { return std::pair{x, x}; },
                                 atoms()))));
}

TEST_CASE("set orbit decomposition") {
    CHECK(set_orbits_list(atoms()).size() == 1);

    SUBCASE("pairs over equality atoms: diagonal and off-diagonal") {
        auto orbits = set_orbits_list(pairs(atoms(), atoms()));
        CHECK(orbits.size() == 2);
        CHECK(static_cast<long long>(orbits.size()) == bell(2));
    }
    SUBCASE("pairs over ordered atoms: <, =, >") {
        ScopedSolver ordered(AtomTheory::ordered_atoms);
        auto orbits = set_orbits_list(pairs(atoms(), atoms()));
        CHECK(orbits.size() == 3);
        CHECK(static_cast<long long>(orbits.size()) == fubini(2));
    }
    SUBCASE("triples match the type-enumeration counts") {
        auto triples = replicate_set(3, atoms());
        CHECK(static_cast<long long>(set_orbits_list(triples).size()) == bell(3));
        ScopedSolver ordered(AtomTheory::ordered_atoms);
        auto triples_o = replicate_set(3, atoms());
        CHECK(static_cast<long long>(set_orbits_list(triples_o).size()) == fubini(3));
        CHECK(bell(3) == 5);
        CHECK(fubini(3) == 13);
    }
}

TEST_CASE("orbits partition the set") {
    for (AtomTheory th : {AtomTheory::equality_atoms, AtomTheory::ordered_atoms}) {
        ScopedSolver scope(th);
        auto s = pairs(atoms(), atoms());
        auto orbits = set_orbits_list(s);
        for (std::size_t i = 0; i < orbits.size(); ++i)
            for (std::size_t j = i + 1; j < orbits.size(); ++j)
                CHECK(ambient_solver().is_valid(
                    is_empty(intersection(orbits[i], orbits[j]))));
        CHECK(ambient_solver().is_valid(eq_set(sum(set_orbits(s)), s)));
    }
}
