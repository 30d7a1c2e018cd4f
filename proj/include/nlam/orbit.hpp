#pragma once

#include <set>

#include "nlam/set.hpp"

namespace nlam {

/// A finite list of atoms to be fixed pointwise by the automorphisms under
/// consideration. Duplicates are harmless; order is irrelevant.
class SupportList {
public:
    SupportList() = default;
    explicit SupportList(std::vector<AtomVariable> vars) : vars_(std::move(vars)) {}
    explicit SupportList(const std::vector<Atom>& atoms) {
        vars_.reserve(atoms.size());
        for (const auto& a : atoms) vars_.push_back(a.variable());
    }
    SupportList(std::initializer_list<Atom> atoms)
        : SupportList(std::vector<Atom>(atoms)) {}

    const std::vector<AtomVariable>& variables() const { return vars_; }

private:
    std::vector<AtomVariable> vars_;
};

namespace detail {

inline std::vector<std::function<Formula(const AtomVariable&, const AtomVariable&)>>
theory_relations(AtomTheory theory) {
    std::vector<std::function<Formula(const AtomVariable&, const AtomVariable&)>> rels;
    rels.push_back([](const AtomVariable& a, const AtomVariable& b) {
        return Formula::eq(a, b);
    });
    if (theory == AtomTheory::ordered_atoms)
        rels.push_back([](const AtomVariable& a, const AtomVariable& b) {
            return Formula::leq(a, b);
        });
    return rels;
}

}  // namespace detail

/// The orbit of x under all automorphisms fixing supp pointwise: fresh
/// variables replace the support of x, constrained to realize the same
/// atomic relations among themselves and towards supp as the originals.
template <NominalValue T>
DefinableSet<T> orbit(const SupportList& supp, const T& x) {
    const std::vector<AtomVariable> base = support(x);
    std::vector<AtomVariable> binders;
    binders.reserve(base.size());
    std::map<AtomVariable, AtomVariable> rename;
    for (const auto& b : base) {
        AtomVariable v = fresh_atom_variable();
        binders.push_back(v);
        rename.emplace(b, v);
    }

    std::vector<Formula> constraints;
    for (const auto& rel : detail::theory_relations(ambient_solver().theory())) {
        for (std::size_t i = 0; i < base.size(); ++i) {
            for (std::size_t j = 0; j < base.size(); ++j) {
                if (i == j) continue;
                constraints.push_back(
                    iff(rel(binders[i], binders[j]), rel(base[i], base[j])));
            }
            for (const auto& a : supp.variables())
                constraints.push_back(iff(rel(binders[i], a), rel(base[i], a)));
        }
    }

    T element = Nominal<T>::map_vars(
        [&rename](const AtomVariable& v) {
            auto it = rename.find(v);
            return it == rename.end() ? v : it->second;
        },
        x);
    return DefinableSet<T>::from_entries(
        {{std::move(element), simplify(conj(std::move(constraints))), binders}});
}

/// Closure of a set under all automorphisms fixing supp pointwise.
template <NominalValue T>
DefinableSet<T> hull(const SupportList& supp, const DefinableSet<T>& s) {
    return sum(map([&supp](const T& x) { return orbit(supp, x); }, s));
}

template <NominalValue T>
Formula is_singleton(const DefinableSet<T>& s) {
    return exists(
        [&s](const T& x, const Context& c) {
            return for_all([&x](const T& y) { return Nominal<T>::eq(x, y); }, s, c);
        },
        s);
}

/// Whether the atoms of supp support x: the orbit of x over supp collapses
/// to x alone.
template <NominalValue T>
Formula supports(const SupportList& supp, const T& x) {
    return is_singleton(orbit(supp, x));
}

/// A minimal support, found greedily from support(x) by dropping candidates
/// in reverse order. For equality atoms this is the least support (supports
/// are closed under intersection there); for ordered atoms the result is
/// minimal for the greedy order but uniqueness is not guaranteed.
template <NominalValue T>
SupportList least_support(const T& x) {
    std::vector<AtomVariable> current = support(x);
    for (std::size_t i = current.size(); i-- > 0;) {
        std::vector<AtomVariable> trial = current;
        trial.erase(trial.begin() + static_cast<std::ptrdiff_t>(i));
        if (ambient_solver().is_valid(supports(SupportList(trial), x)))
            current = std::move(trial);
    }
    return SupportList(current);
}

template <NominalValue T>
DefinableSet<T> set_orbit(const DefinableSet<T>& s, const T& x) {
    return intersection(orbit(SupportList(), x), s);
}

namespace detail {

/// All assignments of k indices to "levels" that are meaningful for the
/// theory: set partitions for equality atoms (level identity is all that
/// matters), weak orders for ordered atoms. Returned as dense level vectors.
inline std::vector<std::vector<int>> atomic_diagrams(std::size_t k, AtomTheory theory) {
    std::vector<std::vector<int>> out;
    if (k == 0) {
        out.push_back({});
        return out;
    }
    std::vector<int> levels(k, 0);
    std::set<std::vector<int>> seen;
    while (true) {
        // Canonicalize: equality atoms ignore level order (first-occurrence
        // relabeling); ordered atoms keep relative order (dense ranks).
        std::vector<int> canon(k);
        if (theory == AtomTheory::equality_atoms) {
            std::map<int, int> label;
            for (std::size_t i = 0; i < k; ++i) {
                auto [it, fresh] = label.emplace(levels[i], static_cast<int>(label.size()));
                canon[i] = it->second;
            }
        } else {
            std::vector<int> sorted(levels);
            std::sort(sorted.begin(), sorted.end());
            sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
            for (std::size_t i = 0; i < k; ++i)
                canon[i] = static_cast<int>(
                    std::lower_bound(sorted.begin(), sorted.end(), levels[i]) -
                    sorted.begin());
        }
        if (seen.insert(canon).second) out.push_back(canon);

        std::size_t pos = 0;
        while (pos < k && levels[pos] == static_cast<int>(k) - 1) levels[pos++] = 0;
        if (pos == k) break;
        ++levels[pos];
    }
    std::sort(out.begin(), out.end());
    return out;
}

inline Formula diagram_formula(const std::vector<AtomVariable>& vars,
                               const std::vector<int>& levels, AtomTheory theory) {
    std::vector<Formula> parts;
    for (std::size_t i = 0; i < vars.size(); ++i) {
        for (std::size_t j = i + 1; j < vars.size(); ++j) {
            if (levels[i] == levels[j]) {
                parts.push_back(Formula::eq(vars[i], vars[j]));
            } else if (theory == AtomTheory::equality_atoms) {
                parts.push_back(Formula::neq(vars[i], vars[j]));
            } else if (levels[i] < levels[j]) {
                parts.push_back(Formula::lt(vars[i], vars[j]));
            } else {
                parts.push_back(Formula::lt(vars[j], vars[i]));
            }
        }
    }
    return conj(std::move(parts));
}

}  // namespace detail

/// The orbits of a set, one per consistent atomic diagram of each entry's
/// binders, deduplicated semantically.
template <NominalValue T>
std::vector<DefinableSet<T>> set_orbits_list(const DefinableSet<T>& s) {
    const Solver& solver = ambient_solver();
    std::vector<DefinableSet<T>> orbits;
    for (const auto& entry : s.entries()) {
        for (const auto& levels :
             detail::atomic_diagrams(entry.binders.size(), solver.theory())) {
            Formula diagram =
                detail::diagram_formula(entry.binders, levels, solver.theory());
            Formula guard = conj(diagram, entry.guard);
            if (solver.is_contradictory(exists_closure(entry.binders, guard)))
                continue;
            DefinableSet<T> candidate = DefinableSet<T>::from_entries(
                {{entry.element, std::move(guard), entry.binders}});
            bool known = false;
            for (const auto& o : orbits)
                if (solver.is_valid(eq_set(o, candidate))) {
                    known = true;
                    break;
                }
            if (!known) orbits.push_back(std::move(candidate));
        }
    }
    return orbits;
}

template <NominalValue T>
DefinableSet<DefinableSet<T>> set_orbits(const DefinableSet<T>& s) {
    return from_list(set_orbits_list(s));
}

}  // namespace nlam
