#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nlam/nominal.hpp"

namespace nlam {

/// One guarded, binder-carrying alternative of a definable set:
/// element : guard for binders. The binders bind in both the element and the
/// guard and range over all atoms.
template <NominalValue T>
struct SetEntry {
    T element;
    Formula guard;
    std::vector<AtomVariable> binders;
};

namespace detail {

template <NominalValue T>
std::vector<AtomVariable> entry_free_vars(const T& element, const Formula& guard,
                                          const std::vector<AtomVariable>& binders) {
    std::vector<AtomVariable> out;
    auto push = [&](const AtomVariable& v) {
        if (std::find(binders.begin(), binders.end(), v) != binders.end()) return;
        if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
    };
    Nominal<T>::fold_vars(push, element);
    for (const auto& v : guard.free_variables()) push(v);
    return out;
}

template <NominalValue T>
SetEntry<T> rename_binders(const SetEntry<T>& e,
                           const std::map<AtomVariable, AtomVariable>& m) {
    auto rename = [&m](const AtomVariable& v) {
        auto it = m.find(v);
        return it == m.end() ? v : it->second;
    };
    std::vector<AtomVariable> binders;
    binders.reserve(e.binders.size());
    for (const auto& b : e.binders) binders.push_back(rename(b));
    return {Nominal<T>::map_vars(rename, e.element), substitute(e.guard, m),
            std::move(binders)};
}

/// Alpha-converts the binders to globally fresh names; used before any
/// operation that brings new variables into an entry's scope.
template <NominalValue T>
SetEntry<T> freshen_entry(const SetEntry<T>& e) {
    if (e.binders.empty()) return e;
    std::map<AtomVariable, AtomVariable> m;
    for (const auto& b : e.binders) m.emplace(b, fresh_atom_variable());
    return rename_binders(e, m);
}

inline std::string canonical_binder_name(std::size_t i) {
    static const char* names[] = {"x", "y", "z", "u", "v", "w"};
    return i < 6 ? names[i] : "x" + std::to_string(i);
}

/// Renames binders positionally (order of first occurrence in the element,
/// then the guard) to the x, y, z, ... sequence, skipping names that occur
/// free. Gives alpha-equivalent entries built the same way a common syntactic
/// form, so sorting and deduplication can collapse them cheaply.
template <NominalValue T>
SetEntry<T> canonicalize_binders(const SetEntry<T>& e) {
    if (e.binders.empty()) return e;
    std::vector<AtomVariable> order;
    auto note = [&](const AtomVariable& v) {
        if (std::find(e.binders.begin(), e.binders.end(), v) == e.binders.end()) return;
        if (std::find(order.begin(), order.end(), v) == order.end()) order.push_back(v);
    };
    Nominal<T>::fold_vars(note, e.element);
    for (const auto& v : e.guard.free_variables()) note(v);

    std::vector<AtomVariable> avoid = entry_free_vars(e.element, e.guard, e.binders);
    std::map<AtomVariable, AtomVariable> m;
    std::vector<AtomVariable> targets;
    std::size_t next = 0;
    bool identity = true;
    for (const auto& b : order) {
        AtomVariable target;
        do {
            target = AtomVariable(canonical_binder_name(next++));
        } while (std::find(avoid.begin(), avoid.end(), target) != avoid.end());
        m.emplace(b, target);
        targets.push_back(target);
        identity = identity && b == target;
    }
    if (identity && targets.size() == e.binders.size() &&
        std::equal(targets.begin(), targets.end(), e.binders.begin()))
        return e;
    SetEntry<T> out = rename_binders(e, m);
    out.binders = std::move(targets);  // listed in occurrence order
    return out;
}

template <NominalValue T>
int compare_entries(const SetEntry<T>& a, const SetEntry<T>& b) {
    if (int c = Nominal<T>::compare(a.element, b.element)) return c;
    if (int c = a.guard.compare(b.guard)) return c;
    if (a.binders.size() != b.binders.size())
        return a.binders.size() < b.binders.size() ? -1 : 1;
    for (std::size_t i = 0; i < a.binders.size(); ++i) {
        int c = a.binders[i].name.compare(b.binders[i].name);
        if (c) return c < 0 ? -1 : 1;
    }
    return 0;
}

}  // namespace detail

/// A finite list of guarded entries denoting a possibly infinite set: the
/// union of the entries' denotations. The representation is not canonical
/// across semantically equal sets; eq decides semantic equality by mutual
/// inclusion.
template <NominalValue T>
class DefinableSet {
public:
    DefinableSet() = default;

    /// Normalizes: variant elements dissolve into one entry per branch,
    /// guards are simplified, unused binders dropped, entries with
    /// unsatisfiable guards pruned (a solver call decides the ones a cheap
    /// syntactic check cannot), binders renamed canonically, entries sorted
    /// and deduplicated.
    static DefinableSet from_entries(std::vector<SetEntry<T>> raw) {
        std::vector<SetEntry<T>> out;
        for (auto& entry : raw) {
            for (auto& [value, branch_guard] : variant_split(entry.element)) {
                Formula guard = simplify(conj(entry.guard, branch_guard));
                if (guard.is_false()) continue;
                SetEntry<T> e{value, std::move(guard), entry.binders};
                // Drop binders that bind nothing.
                std::vector<AtomVariable> used;
                for (const auto& b : e.binders) {
                    bool occurs = e.guard.mentions(b);
                    if (!occurs)
                        Nominal<T>::fold_vars(
                            [&](const AtomVariable& v) { occurs = occurs || v == b; },
                            e.element);
                    if (occurs &&
                        std::find(used.begin(), used.end(), b) == used.end())
                        used.push_back(b);
                }
                e.binders = std::move(used);
                if (!e.guard.is_true() &&
                    ambient_solver().is_contradictory(
                        exists_closure(e.binders, e.guard)))
                    continue;
                out.push_back(detail::canonicalize_binders(e));
            }
        }
        std::sort(out.begin(), out.end(), [](const SetEntry<T>& a, const SetEntry<T>& b) {
            return detail::compare_entries(a, b) < 0;
        });
        out.erase(std::unique(out.begin(), out.end(),
                              [](const SetEntry<T>& a, const SetEntry<T>& b) {
                                  return detail::compare_entries(a, b) == 0;
                              }),
                  out.end());
        DefinableSet s;
        s.entries_ = std::move(out);
        return s;
    }

    const std::vector<SetEntry<T>>& entries() const { return entries_; }

    /// Syntactic check only; semantic emptiness is is_empty().
    bool has_no_entries() const { return entries_.empty(); }

    std::string to_string() const {
        std::string out = "{";
        for (std::size_t i = 0; i < entries_.size(); ++i) {
            if (i) out += ", ";
            const auto& e = entries_[i];
            out += Nominal<T>::print(e.element) + " : " + e.guard.to_string();
            if (!e.binders.empty()) {
                out += " for ";
                for (std::size_t j = 0; j < e.binders.size(); ++j) {
                    if (j) out += ", ";
                    out += e.binders[j].name;
                }
            }
        }
        return out + "}";
    }

private:
    std::vector<SetEntry<T>> entries_;
};

// --------------------------------------------------------------------------
// Constructors.

template <NominalValue T>
DefinableSet<T> empty_set() {
    return {};
}

/// The set of all atoms: one entry with a single binder and guard ⊤.
inline DefinableSet<Atom> atoms() {
    AtomVariable b = fresh_atom_variable();
    return DefinableSet<Atom>::from_entries({{Atom(b), Formula::truth(), {b}}});
}

template <NominalValue T>
DefinableSet<T> insert(const T& x, const DefinableSet<T>& s) {
    std::vector<SetEntry<T>> entries{{x, Formula::truth(), {}}};
    entries.insert(entries.end(), s.entries().begin(), s.entries().end());
    return DefinableSet<T>::from_entries(std::move(entries));
}

template <NominalValue T>
DefinableSet<T> singleton(const T& x) {
    return insert(x, DefinableSet<T>());
}

template <NominalValue T>
DefinableSet<T> from_list(const std::vector<T>& xs) {
    std::vector<SetEntry<T>> entries;
    entries.reserve(xs.size());
    for (const auto& x : xs) entries.push_back({x, Formula::truth(), {}});
    return DefinableSet<T>::from_entries(std::move(entries));
}

namespace detail {

template <typename F, typename T>
decltype(auto) invoke_under(F&& f, const T& x, const Context& ctx) {
    if constexpr (std::invocable<F&, const T&, const Context&>) {
        return f(x, ctx);
    } else {
        return f(x);
    }
}

}  // namespace detail

// --------------------------------------------------------------------------
// The core algebra.

/// Applies f to every element, under the entry's extended context. Binders
/// are renamed fresh first, so values f introduces can never be captured.
/// f may take (element) or (element, context).
template <NominalValue T, typename F>
auto map(F&& f, const DefinableSet<T>& s, const Context& ctx = Context()) {
    using U = std::decay_t<decltype(detail::invoke_under(f, std::declval<const T&>(),
                                                         ctx))>;
    std::vector<SetEntry<U>> out;
    out.reserve(s.entries().size());
    for (const auto& entry : s.entries()) {
        SetEntry<T> e = detail::freshen_entry(entry);
        U value = detail::invoke_under(f, e.element, ctx.extended(e.guard));
        out.push_back({std::move(value), std::move(e.guard), std::move(e.binders)});
    }
    return DefinableSet<U>::from_entries(std::move(out));
}

/// Union of a family: inner entries are alpha-converted apart from the outer
/// binders, guards conjoined and binder sets united.
template <NominalValue T>
DefinableSet<T> sum(const DefinableSet<DefinableSet<T>>& family) {
    std::vector<SetEntry<T>> out;
    for (const auto& outer : family.entries()) {
        for (const auto& inner : outer.element.entries()) {
            SetEntry<T> e = detail::freshen_entry(inner);
            std::vector<AtomVariable> binders = e.binders;
            binders.insert(binders.end(), outer.binders.begin(), outer.binders.end());
            out.push_back({std::move(e.element), conj(e.guard, outer.guard),
                           std::move(binders)});
        }
    }
    return DefinableSet<T>::from_entries(std::move(out));
}

/// The emptiness formula: every entry's guard fails for all binder values.
/// Quantifier-free (quantifiers are eliminated over the ambient theory).
template <NominalValue T>
Formula is_empty(const DefinableSet<T>& s) {
    std::vector<Formula> parts;
    parts.reserve(s.entries().size());
    for (const auto& e : s.entries())
        parts.push_back(forall_closure(e.binders, neg(e.guard)));
    return simplify(eliminate_quantifiers(conj(std::move(parts)),
                                          ambient_solver().theory()));
}

/// Keeps the elements satisfying p by conjoining p(element) into each guard.
template <NominalValue T, typename P>
DefinableSet<T> filter(P&& p, const DefinableSet<T>& s, const Context& ctx = Context()) {
    std::vector<SetEntry<T>> out;
    out.reserve(s.entries().size());
    for (const auto& entry : s.entries()) {
        SetEntry<T> e = detail::freshen_entry(entry);
        Formula keep = detail::invoke_under(p, e.element, ctx.extended(e.guard));
        out.push_back({std::move(e.element), conj(e.guard, keep), std::move(e.binders)});
    }
    return DefinableSet<T>::from_entries(std::move(out));
}

template <NominalValue T, typename P>
Formula exists(P&& p, const DefinableSet<T>& s, const Context& ctx = Context()) {
    return simplify(neg(is_empty(filter(p, s, ctx))));
}

template <NominalValue T, typename P>
Formula for_all(P&& p, const DefinableSet<T>& s, const Context& ctx = Context()) {
    auto complement = [&p](const T& x, const Context& c) {
        return neg(detail::invoke_under(p, x, c));
    };
    return is_empty(filter(complement, s, ctx));
}

template <NominalValue T>
Formula member(const T& x, const DefinableSet<T>& s, const Context& ctx = Context()) {
    return exists([&x](const T& e) { return Nominal<T>::eq(e, x); }, s, ctx);
}

template <NominalValue T>
Formula is_subset_of(const DefinableSet<T>& s, const DefinableSet<T>& t,
                     const Context& ctx = Context()) {
    return for_all([&t](const T& x, const Context& c) { return member(x, t, c); }, s,
                   ctx);
}

template <NominalValue T>
Formula eq_set(const DefinableSet<T>& s, const DefinableSet<T>& t,
               const Context& ctx = Context()) {
    return simplify(conj(is_subset_of(s, t, ctx), is_subset_of(t, s, ctx)));
}

template <NominalValue T>
DefinableSet<T> set_union(const DefinableSet<T>& s, const DefinableSet<T>& t) {
    std::vector<SetEntry<T>> entries = s.entries();
    entries.insert(entries.end(), t.entries().begin(), t.entries().end());
    return DefinableSet<T>::from_entries(std::move(entries));
}

template <NominalValue T>
DefinableSet<T> intersection(const DefinableSet<T>& s, const DefinableSet<T>& t,
                             const Context& ctx = Context()) {
    return filter([&t](const T& x, const Context& c) { return member(x, t, c); }, s,
                  ctx);
}

// --------------------------------------------------------------------------
// Pairing.

template <NominalValue A, NominalValue B>
DefinableSet<std::pair<A, B>> pairs(const DefinableSet<A>& s, const DefinableSet<B>& t) {
    std::vector<SetEntry<std::pair<A, B>>> out;
    for (const auto& se : s.entries()) {
        for (const auto& te : t.entries()) {
            SetEntry<A> a = detail::freshen_entry(se);
            SetEntry<B> b = detail::freshen_entry(te);
            std::vector<AtomVariable> binders = a.binders;
            binders.insert(binders.end(), b.binders.begin(), b.binders.end());
            out.push_back({{std::move(a.element), std::move(b.element)},
                           conj(a.guard, b.guard),
                           std::move(binders)});
        }
    }
    return DefinableSet<std::pair<A, B>>::from_entries(std::move(out));
}

template <typename F, NominalValue A, NominalValue B>
auto pairs_with(F&& f, const DefinableSet<A>& s, const DefinableSet<B>& t,
                const Context& ctx = Context()) {
    return map(
        [&f](const std::pair<A, B>& p, const Context& c) {
            if constexpr (std::invocable<F&, const A&, const B&, const Context&>) {
                return f(p.first, p.second, c);
            } else {
                return f(p.first, p.second);
            }
        },
        pairs(s, t), ctx);
}

/// A zero-or-one-element guarded container.
template <NominalValue T>
struct Guarded {
    T value;
    Formula guard;
};

template <NominalValue T>
Guarded<T> maybe_if(const Formula& c, T value) {
    return {std::move(value), c};
}

/// Pairs s with t, keeps the values whose maybe_if guard can hold, conjoining
/// that guard.
template <typename F, NominalValue A, NominalValue B>
auto pairs_with_filter(F&& f, const DefinableSet<A>& s, const DefinableSet<B>& t,
                       const Context& ctx = Context()) {
    using G = std::decay_t<decltype(f(std::declval<const A&>(), std::declval<const B&>()))>;
    using U = std::decay_t<decltype(std::declval<G>().value)>;
    const DefinableSet<std::pair<A, B>> prod = pairs(s, t);
    std::vector<SetEntry<U>> out;
    for (const auto& entry : prod.entries()) {
        G guarded = f(entry.element.first, entry.element.second);
        out.push_back({std::move(guarded.value), conj(entry.guard, guarded.guard),
                       entry.binders});
    }
    return DefinableSet<U>::from_entries(std::move(out));
}

// --------------------------------------------------------------------------
// Size.

namespace detail {

template <NominalValue T>
DefinableSet<std::vector<T>> tuples_of(const DefinableSet<T>& s, int n) {
    if (n <= 1) return map([](const T& x) { return std::vector<T>{x}; }, s);
    return pairs_with(
        [](const T& x, const std::vector<T>& rest) {
            std::vector<T> out{x};
            out.insert(out.end(), rest.begin(), rest.end());
            return out;
        },
        s, tuples_of(s, n - 1));
}

template <NominalValue T>
Formula pairwise_distinct(const std::vector<T>& xs) {
    std::vector<Formula> parts;
    for (std::size_t i = 0; i < xs.size(); ++i)
        for (std::size_t j = i + 1; j < xs.size(); ++j)
            parts.push_back(neg(Nominal<T>::eq(xs[i], xs[j])));
    return conj(std::move(parts));
}

}  // namespace detail

/// The number of elements as a variant over the ways the parameters can
/// relate: for n = 0, 1, 2, ... the formula "s has at least n distinct
/// elements" is computed, and each achievable n is guarded by having exactly
/// n. Diverges on sets that are infinite under the context unless a step
/// bound is given (then StepBoundExceeded is thrown).
template <NominalValue T>
Variants<int> size(const DefinableSet<T>& s, const Context& ctx = Context(),
                   std::optional<int> step_bound = std::nullopt) {
    const Solver& solver = ambient_solver();
    std::vector<Formula> at_least{Formula::truth()};
    for (int n = 1;; ++n) {
        if (step_bound && n > *step_bound)
            throw StepBoundExceeded("size: step bound " +
                                    std::to_string(*step_bound) + " exceeded");
        Formula geq = exists([](const std::vector<T>& t) {
            return detail::pairwise_distinct(t); },
            detail::tuples_of(s, n), ctx);
        at_least.push_back(geq);
        if (solver.implies_under(ctx.formula(), neg(geq)) == Determination::yes) break;
    }
    std::vector<typename Variants<int>::Branch> branches;
    for (std::size_t k = 0; k + 1 < at_least.size(); ++k)
        branches.push_back(
            {static_cast<int>(k), conj(at_least[k], neg(at_least[k + 1]))});
    Variants<int> out = Variants<int>::from_branches(std::move(branches));
    return when(ctx.formula(), prune_variants(out));
}

// --------------------------------------------------------------------------
// Trait instances.

template <NominalValue T>
struct Nominal<DefinableSet<T>> {
    using S = DefinableSet<T>;
    static Formula eq(const S& a, const S& b) { return eq_set(a, b); }
    static int compare(const S& a, const S& b) {
        const auto& x = a.entries();
        const auto& y = b.entries();
        for (std::size_t i = 0; i < std::min(x.size(), y.size()); ++i)
            if (int c = detail::compare_entries(x[i], y[i])) return c;
        return x.size() < y.size() ? -1 : (x.size() == y.size() ? 0 : 1);
    }
    static S map_vars(const VarRename& r, const S& s) {
        std::vector<SetEntry<T>> out;
        out.reserve(s.entries().size());
        for (const auto& entry : s.entries()) {
            // Rename free variables only; alpha-convert first so a renaming
            // target can never collide with a binder.
            SetEntry<T> e = detail::freshen_entry(entry);
            auto bound = [&e](const AtomVariable& v) {
                return std::find(e.binders.begin(), e.binders.end(), v) !=
                       e.binders.end();
            };
            auto guarded_rename = [&r, &bound](const AtomVariable& v) {
                return bound(v) ? v : r(v);
            };
            out.push_back({Nominal<T>::map_vars(guarded_rename, e.element),
                           detail::map_formula_vars(guarded_rename, e.guard),
                           std::move(e.binders)});
        }
        return S::from_entries(std::move(out));
    }
    static void fold_vars(const VarVisitor& v, const S& s) {
        for (const auto& e : s.entries())
            for (const auto& x : detail::entry_free_vars(e.element, e.guard, e.binders))
                v(x);
    }
    static std::string print(const S& s) { return s.to_string(); }
};

template <NominalValue T>
struct Conditional<DefinableSet<T>> {
    using S = DefinableSet<T>;
    static S cond(const Formula& c, const S& x, const S& y) {
        std::vector<SetEntry<T>> out;
        auto add = [&out](const SetEntry<T>& entry, const Formula& extra) {
            SetEntry<T> e = entry;
            for (const auto& v : extra.free_variables()) {
                if (std::find(e.binders.begin(), e.binders.end(), v) != e.binders.end()) {
                    e = detail::freshen_entry(e);
                    break;
                }
            }
            out.push_back({std::move(e.element), conj(e.guard, extra),
                           std::move(e.binders)});
        };
        for (const auto& e : x.entries()) add(e, c);
        for (const auto& e : y.entries()) add(e, neg(c));
        return S::from_entries(std::move(out));
    }
};

template <NominalValue T>
struct Contextual<DefinableSet<T>> {
    using S = DefinableSet<T>;
    static S when(const Formula& ctx, const S& s) {
        std::vector<SetEntry<T>> out;
        for (const auto& entry : s.entries()) {
            SetEntry<T> e = entry;
            for (const auto& v : ctx.free_variables()) {
                if (std::find(e.binders.begin(), e.binders.end(), v) != e.binders.end()) {
                    e = detail::freshen_entry(e);
                    break;
                }
            }
            if (ambient_solver().implies_under(
                    ctx, exists_closure(e.binders, e.guard)) == Determination::no)
                continue;
            if constexpr (ContextualValue<T>)
                e.element = Contextual<T>::when(ctx, e.element);
            out.push_back(std::move(e));
        }
        return S::from_entries(std::move(out));
    }
};

}  // namespace nlam
