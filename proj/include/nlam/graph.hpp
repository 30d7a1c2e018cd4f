#pragma once

#include "nlam/orbit.hpp"

namespace nlam {

/// A directed graph over definable vertex and edge sets.
template <NominalValue T>
struct Graph {
    DefinableSet<T> vertices;
    DefinableSet<std::pair<T, T>> edges;
};

template <NominalValue T>
struct Contextual<Graph<T>> {
    static Graph<T> when(const Formula& ctx, const Graph<T>& g) {
        return {Contextual<DefinableSet<T>>::when(ctx, g.vertices),
                Contextual<DefinableSet<std::pair<T, T>>>::when(ctx, g.edges)};
    }
};

/// Relational composition: pairs with a matching middle component.
template <NominalValue A, NominalValue B, NominalValue C>
DefinableSet<std::pair<A, C>> compose(const DefinableSet<std::pair<A, B>>& r,
                                      const DefinableSet<std::pair<B, C>>& s) {
    return pairs_with_filter(
        [](const std::pair<A, B>& x, const std::pair<B, C>& y) {
            return maybe_if(eq(x.second, y.first),
                            std::pair<A, C>{x.first, y.second});
        },
        r, s);
}

/// Least fixpoint of r -> r ∪ (r ∘ r), with semantic equality as the
/// stabilization test. Terminates for definable relations (the chain is
/// bounded by the orbit count at each arity); an optional step bound guards
/// against runaway inputs. The iteration count is reported through
/// `iterations` when given.
template <NominalValue T>
DefinableSet<std::pair<T, T>> transitive_closure(
    const DefinableSet<std::pair<T, T>>& r, int* iterations = nullptr,
    std::optional<int> step_bound = std::nullopt) {
    DefinableSet<std::pair<T, T>> current = r;
    for (int n = 1;; ++n) {
        if (step_bound && n > *step_bound)
            throw StepBoundExceeded("transitive_closure: step bound " +
                                    std::to_string(*step_bound) + " exceeded");
        DefinableSet<std::pair<T, T>> next =
            set_union(current, compose(current, current));
        if (iterations) *iterations = n;
        if (ambient_solver().is_valid(eq_set(current, next))) return current;
        current = std::move(next);
    }
}

template <NominalValue T>
Formula has_cycle(const Graph<T>& g) {
    return exists([](const std::pair<T, T>& e) { return Nominal<T>::eq(e.first, e.second); },
                  transitive_closure(g.edges));
}

/// Some edge, reversed, connects two vertices that are joined by an
/// even-length path.
template <NominalValue T>
Formula has_odd_length_cycle(const Graph<T>& g) {
    DefinableSet<std::pair<T, T>> reversed = map(
        [](const std::pair<T, T>& e) { return std::pair<T, T>{e.second, e.first}; },
        g.edges);
    DefinableSet<std::pair<T, T>> even_paths =
        transitive_closure(compose(g.edges, g.edges));
    return simplify(neg(is_empty(intersection(reversed, even_paths))));
}

/// Whether c assigns different values to the endpoints of every edge. Colors
/// may be of any nominal type (variant integers, formulas, atoms, ...).
template <NominalValue T, typename C>
Formula is_coloring_of(C&& c, const Graph<T>& g) {
    using Color = std::decay_t<decltype(c(std::declval<const T&>()))>;
    return for_all(
        [&c](const std::pair<T, T>& e) {
            return neg(Nominal<Color>::eq(c(e.first), c(e.second)));
        },
        g.edges);
}

/// All canonical assignments of n items onto exactly k colors.
inline DefinableSet<std::vector<int>> partitions(int n, int k) {
    if (k == 1) {
        return singleton(std::vector<int>(static_cast<std::size_t>(n), 0));
    }
    if (k < 1 || n < k) return {};
    if (n == k) {
        std::vector<int> all(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) all[static_cast<std::size_t>(i)] = i;
        return singleton(all);
    }
    std::vector<int> colors(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) colors[static_cast<std::size_t>(i)] = i;
    auto prepend = [](int c, const std::vector<int>& rest) {
        std::vector<int> out{c};
        out.insert(out.end(), rest.begin(), rest.end());
        return out;
    };
    return set_union(
        map([k](const std::vector<int>& rest) {
                std::vector<int> out{k - 1};
                out.insert(out.end(), rest.begin(), rest.end());
                return out;
            },
            partitions(n - 1, k - 1)),
        pairs_with(prepend, from_list(colors), partitions(n - 1, k)));
}

/// First-orbit-match color; elements outside every orbit get color 0.
template <NominalValue T>
Variants<int> coloring(const std::vector<DefinableSet<T>>& orbits,
                       const std::vector<int>& colors, const T& x,
                       const Context& ctx = Context()) {
    if (orbits.size() != colors.size())
        throw std::invalid_argument("coloring: orbit and color lists differ in length");
    std::function<Variants<int>(std::size_t)> chain = [&](std::size_t i) {
        if (i == orbits.size()) return variant(0);
        return ite(member(x, orbits[i], ctx), variant(colors[i]), chain(i + 1), ctx);
    };
    return chain(0);
}

/// All length-n lists over the elements of s.
template <NominalValue T>
DefinableSet<std::vector<T>> replicate_set(int n, const DefinableSet<T>& s) {
    if (n <= 0) return singleton(std::vector<T>{});
    return pairs_with(
        [](const T& x, const std::vector<T>& rest) {
            std::vector<T> out{x};
            out.insert(out.end(), rest.begin(), rest.end());
            return out;
        },
        s, replicate_set(n - 1, s));
}

/// Searches for a coloring constant on each vertex orbit: every pairing of an
/// orbit list with a k-partition induces a candidate coloring, and the graph
/// is equivariantly k-colorable iff some candidate is proper.
template <NominalValue T>
Formula has_equivariant_coloring(const Graph<T>& g, int k) {
    std::vector<DefinableSet<T>> orbit_list = set_orbits_list(g.vertices);
    const int n = static_cast<int>(orbit_list.size());
    DefinableSet<DefinableSet<T>> orbits = from_list(orbit_list);
    DefinableSet<Formula> candidates = pairs_with(
        [&g](const std::vector<DefinableSet<T>>& os, const std::vector<int>& ps) {
            return is_coloring_of(
                [&os, &ps](const T& v) { return coloring(os, ps, v); }, g);
        },
        replicate_set(n, orbits), partitions(n, k));
    return member(Formula::truth(), candidates);
}

}  // namespace nlam
