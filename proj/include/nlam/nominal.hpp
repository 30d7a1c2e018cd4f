#pragma once

#include <algorithm>
#include <concepts>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "nlam/formula.hpp"
#include "nlam/theory.hpp"

namespace nlam {

/// The ambient constraint ψ under which a term is evaluated. Threaded
/// explicitly through evaluation; ⊤ at top level.
class Context {
public:
    Context() = default;
    explicit Context(Formula f) : formula_(std::move(f)) {}

    const Formula& formula() const { return formula_; }
    Context extended(const Formula& extra) const {
        return Context(conj(formula_, extra));
    }

private:
    Formula formula_ = Formula::truth();
};

using VarRename = std::function<AtomVariable(const AtomVariable&)>;
using VarVisitor = std::function<void(const AtomVariable&)>;

/// Capability bundle every set-element type provides: symbolic equality,
/// variable fold/map, a total structural order, and printing. Specialize for
/// new element types.
template <typename T>
struct Nominal;

template <typename T>
concept NominalValue = requires(const T& a, const T& b, const VarRename& r,
                                const VarVisitor& v) {
    { Nominal<T>::eq(a, b) } -> std::same_as<Formula>;
    { Nominal<T>::compare(a, b) } -> std::same_as<int>;
    { Nominal<T>::map_vars(r, a) } -> std::same_as<T>;
    Nominal<T>::fold_vars(v, a);
    { Nominal<T>::print(a) } -> std::same_as<std::string>;
};

namespace detail {

inline Formula map_formula_vars(const VarRename& r, const Formula& f) {
    std::map<AtomVariable, AtomVariable> m;
    for (const auto& v : f.free_variables()) {
        AtomVariable t = r(v);
        if (t != v) m.emplace(v, t);
    }
    return m.empty() ? f : substitute(f, m);
}

}  // namespace detail

template <>
struct Nominal<AtomVariable> {
    static Formula eq(const AtomVariable& a, const AtomVariable& b) {
        return Formula::eq(a, b);
    }
    static int compare(const AtomVariable& a, const AtomVariable& b) {
        return a.name.compare(b.name) < 0 ? -1 : (a.name == b.name ? 0 : 1);
    }
    static AtomVariable map_vars(const VarRename& r, const AtomVariable& a) {
        return r(a);
    }
    static void fold_vars(const VarVisitor& v, const AtomVariable& a) { v(a); }
    static std::string print(const AtomVariable& a) { return a.name; }
};

template <>
struct Nominal<int> {
    static Formula eq(int a, int b) { return Formula::boolean(a == b); }
    static int compare(int a, int b) { return a < b ? -1 : (a == b ? 0 : 1); }
    static int map_vars(const VarRename&, int a) { return a; }
    static void fold_vars(const VarVisitor&, int) {}
    static std::string print(int a) { return std::to_string(a); }
};

template <>
struct Nominal<std::string> {
    static Formula eq(const std::string& a, const std::string& b) {
        return Formula::boolean(a == b);
    }
    static int compare(const std::string& a, const std::string& b) {
        int c = a.compare(b);
        return c < 0 ? -1 : (c == 0 ? 0 : 1);
    }
    static std::string map_vars(const VarRename&, const std::string& a) { return a; }
    static void fold_vars(const VarVisitor&, const std::string&) {}
    static std::string print(const std::string& a) { return a; }
};

template <>
struct Nominal<Formula> {
    static Formula eq(const Formula& a, const Formula& b) { return iff(a, b); }
    static int compare(const Formula& a, const Formula& b) { return a.compare(b); }
    static Formula map_vars(const VarRename& r, const Formula& f) {
        return detail::map_formula_vars(r, f);
    }
    static void fold_vars(const VarVisitor& v, const Formula& f) {
        for (const auto& x : f.free_variables()) v(x);
    }
    static std::string print(const Formula& f) { return f.to_string(); }
};

// --------------------------------------------------------------------------
// Variants: a single value of ambiguous identity, v1 : g1 | ... | vn : gn.

template <NominalValue T>
class Variants {
public:
    struct Branch {
        T value;
        Formula guard;
    };

    explicit Variants(T value) : branches_{{std::move(value), Formula::truth()}} {}

    /// Normalizes: branches sorted by value, equal values merged by disjoining
    /// guards, branches with plainly false guards dropped (the variant keeps
    /// at least one branch).
    static Variants from_branches(std::vector<Branch> bs) {
        if (bs.empty()) throw std::invalid_argument("Variants: no branches");
        std::stable_sort(bs.begin(), bs.end(), [](const Branch& a, const Branch& b) {
            return Nominal<T>::compare(a.value, b.value) < 0;
        });
        std::vector<Branch> merged;
        for (auto& b : bs) {
            if (!merged.empty() &&
                Nominal<T>::compare(merged.back().value, b.value) == 0) {
                merged.back().guard = simplify(disj(merged.back().guard, b.guard));
            } else {
                b.guard = simplify(b.guard);
                merged.push_back(std::move(b));
            }
        }
        std::vector<Branch> kept;
        for (auto& b : merged)
            if (!b.guard.is_false()) kept.push_back(std::move(b));
        if (kept.empty()) kept.push_back(std::move(merged.front()));
        Variants out;
        out.branches_ = std::move(kept);
        return out;
    }

    const std::vector<Branch>& branches() const { return branches_; }

    bool is_definite() const {
        return branches_.size() == 1 && branches_.front().guard.is_true();
    }

    /// The unique value; requires a single branch.
    const T& value() const {
        if (branches_.size() != 1)
            throw std::logic_error("Variants::value: ambiguous variant");
        return branches_.front().value;
    }

private:
    Variants() = default;
    std::vector<Branch> branches_;
};

template <NominalValue T>
Variants<T> variant(T v) {
    return Variants<T>(std::move(v));
}

// --------------------------------------------------------------------------
// Atoms: the variant type over atom variable names.

class Atom {
public:
    explicit Atom(const AtomVariable& v) : rep_(Variants<AtomVariable>(v)) {}
    explicit Atom(Variants<AtomVariable> rep) : rep_(std::move(rep)) {}

    const Variants<AtomVariable>& rep() const { return rep_; }

    bool is_definite() const { return rep_.is_definite(); }
    const AtomVariable& variable() const { return rep_.value(); }

private:
    Variants<AtomVariable> rep_;
};

/// A one-branch atom over a never-before-used variable.
Atom fresh_atom();

// --------------------------------------------------------------------------
// Nominal instances for composite values.

template <NominalValue T>
struct Nominal<Variants<T>> {
    static Formula eq(const Variants<T>& x, const Variants<T>& y) {
        std::vector<Formula> cases;
        for (const auto& bx : x.branches())
            for (const auto& by : y.branches())
                cases.push_back(
                    conj(Nominal<T>::eq(bx.value, by.value), bx.guard, by.guard));
        return disj(std::move(cases));
    }
    static int compare(const Variants<T>& x, const Variants<T>& y) {
        const auto& bx = x.branches();
        const auto& by = y.branches();
        for (std::size_t i = 0; i < std::min(bx.size(), by.size()); ++i) {
            if (int c = Nominal<T>::compare(bx[i].value, by[i].value)) return c;
            if (int c = bx[i].guard.compare(by[i].guard)) return c;
        }
        return bx.size() < by.size() ? -1 : (bx.size() == by.size() ? 0 : 1);
    }
    static Variants<T> map_vars(const VarRename& r, const Variants<T>& x) {
        std::vector<typename Variants<T>::Branch> bs;
        bs.reserve(x.branches().size());
        for (const auto& b : x.branches())
            bs.push_back({Nominal<T>::map_vars(r, b.value),
                          detail::map_formula_vars(r, b.guard)});
        return Variants<T>::from_branches(std::move(bs));
    }
    static void fold_vars(const VarVisitor& v, const Variants<T>& x) {
        for (const auto& b : x.branches()) {
            Nominal<T>::fold_vars(v, b.value);
            Nominal<Formula>::fold_vars(v, b.guard);
        }
    }
    static std::string print(const Variants<T>& x) {
        if (x.is_definite()) return Nominal<T>::print(x.value());
        std::string out;
        for (std::size_t i = 0; i < x.branches().size(); ++i) {
            if (i) out += " | ";
            out += Nominal<T>::print(x.branches()[i].value) + " : " +
                   x.branches()[i].guard.to_string();
        }
        return out;
    }
};

template <>
struct Nominal<Atom> {
    using Rep = Variants<AtomVariable>;
    static Formula eq(const Atom& a, const Atom& b) {
        return Nominal<Rep>::eq(a.rep(), b.rep());
    }
    static int compare(const Atom& a, const Atom& b) {
        return Nominal<Rep>::compare(a.rep(), b.rep());
    }
    static Atom map_vars(const VarRename& r, const Atom& a) {
        return Atom(Nominal<Rep>::map_vars(r, a.rep()));
    }
    static void fold_vars(const VarVisitor& v, const Atom& a) {
        Nominal<Rep>::fold_vars(v, a.rep());
    }
    static std::string print(const Atom& a) { return Nominal<Rep>::print(a.rep()); }
};

template <NominalValue A, NominalValue B>
struct Nominal<std::pair<A, B>> {
    using P = std::pair<A, B>;
    static Formula eq(const P& x, const P& y) {
        return conj(Nominal<A>::eq(x.first, y.first), Nominal<B>::eq(x.second, y.second));
    }
    static int compare(const P& x, const P& y) {
        if (int c = Nominal<A>::compare(x.first, y.first)) return c;
        return Nominal<B>::compare(x.second, y.second);
    }
    static P map_vars(const VarRename& r, const P& x) {
        return {Nominal<A>::map_vars(r, x.first), Nominal<B>::map_vars(r, x.second)};
    }
    static void fold_vars(const VarVisitor& v, const P& x) {
        Nominal<A>::fold_vars(v, x.first);
        Nominal<B>::fold_vars(v, x.second);
    }
    static std::string print(const P& x) {
        return "(" + Nominal<A>::print(x.first) + ", " + Nominal<B>::print(x.second) + ")";
    }
};

template <NominalValue T>
struct Nominal<std::vector<T>> {
    using V = std::vector<T>;
    static Formula eq(const V& x, const V& y) {
        if (x.size() != y.size()) return Formula::falsity();
        std::vector<Formula> parts;
        parts.reserve(x.size());
        for (std::size_t i = 0; i < x.size(); ++i)
            parts.push_back(Nominal<T>::eq(x[i], y[i]));
        return conj(std::move(parts));
    }
    static int compare(const V& x, const V& y) {
        for (std::size_t i = 0; i < std::min(x.size(), y.size()); ++i)
            if (int c = Nominal<T>::compare(x[i], y[i])) return c;
        return x.size() < y.size() ? -1 : (x.size() == y.size() ? 0 : 1);
    }
    static V map_vars(const VarRename& r, const V& x) {
        V out;
        out.reserve(x.size());
        for (const auto& e : x) out.push_back(Nominal<T>::map_vars(r, e));
        return out;
    }
    static void fold_vars(const VarVisitor& v, const V& x) {
        for (const auto& e : x) Nominal<T>::fold_vars(v, e);
    }
    static std::string print(const V& x) {
        std::string out = "[";
        for (std::size_t i = 0; i < x.size(); ++i) {
            if (i) out += ", ";
            out += Nominal<T>::print(x[i]);
        }
        return out + "]";
    }
};

// --------------------------------------------------------------------------
// Generic operations over nominal values.

/// Symbolic equality, simplified.
template <NominalValue T>
Formula eq(const T& a, const T& b) {
    return simplify(Nominal<T>::eq(a, b));
}

template <NominalValue T>
Formula neq(const T& a, const T& b) {
    return simplify(neg(Nominal<T>::eq(a, b)));
}

/// Free atom variables of a value in first-occurrence order, no duplicates.
/// The list is a support of the value.
template <NominalValue T>
std::vector<AtomVariable> support(const T& x) {
    std::vector<AtomVariable> out;
    Nominal<T>::fold_vars(
        [&out](const AtomVariable& v) {
            if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
        },
        x);
    return out;
}

/// Renames the free atom variables of a value; f must be injective on the
/// support for the result to be in the same orbit.
template <NominalValue T>
T group_action(const VarRename& f, const T& x) {
    return Nominal<T>::map_vars(f, x);
}

template <NominalValue T>
std::string display(const T& x) {
    return Nominal<T>::print(x);
}

/// Splits a value into guarded alternatives when it is a variant; the default
/// is the single unguarded alternative. Set construction dissolves variants
/// through this hook.
template <NominalValue T>
std::vector<std::pair<T, Formula>> variant_split(const T& x) {
    return {{x, Formula::truth()}};
}

template <NominalValue T>
std::vector<std::pair<Variants<T>, Formula>> variant_split(const Variants<T>& v) {
    std::vector<std::pair<Variants<T>, Formula>> out;
    out.reserve(v.branches().size());
    for (const auto& b : v.branches()) out.push_back({Variants<T>(b.value), b.guard});
    return out;
}

inline std::vector<std::pair<Atom, Formula>> variant_split(const Atom& a) {
    std::vector<std::pair<Atom, Formula>> out;
    out.reserve(a.rep().branches().size());
    for (const auto& b : a.rep().branches()) out.push_back({Atom(b.value), b.guard});
    return out;
}

// --------------------------------------------------------------------------
// Conditional: type-specific merge of the two arms of an unresolved ite.

template <typename T>
struct Conditional;

template <typename T>
concept ConditionalValue = requires(const Formula& c, const T& x) {
    { Conditional<T>::cond(c, x, x) } -> std::same_as<T>;
};

/// Drops decidedly contradictory branches (keeping at least one); variant
/// guards are exhaustive, so a sole survivor's guard collapses to ⊤.
template <NominalValue T>
Variants<T> prune_variants(const Variants<T>& v) {
    if (v.branches().size() <= 1) return v;
    std::vector<typename Variants<T>::Branch> kept;
    for (const auto& b : v.branches())
        if (!ambient_solver().is_contradictory(b.guard)) kept.push_back(b);
    if (kept.empty()) return v;
    if (kept.size() == 1) kept.front().guard = Formula::truth();
    return Variants<T>::from_branches(std::move(kept));
}

/// Two-branch variant (x : c | y : ¬c), merged and pruned.
template <NominalValue T>
Variants<T> ite_v(const Formula& c, const T& x, const T& y) {
    auto v = Variants<T>::from_branches({{x, c}, {y, neg(c)}});
    return prune_variants(v);
}

template <>
struct Conditional<Formula> {
    static Formula cond(const Formula& c, const Formula& x, const Formula& y) {
        return disj(conj(x, c), conj(y, neg(c)));
    }
};

template <NominalValue T>
struct Conditional<Variants<T>> {
    static Variants<T> cond(const Formula& c, const Variants<T>& x,
                            const Variants<T>& y) {
        std::vector<typename Variants<T>::Branch> bs;
        for (const auto& b : x.branches()) bs.push_back({b.value, conj(b.guard, c)});
        for (const auto& b : y.branches()) bs.push_back({b.value, conj(b.guard, neg(c))});
        return prune_variants(Variants<T>::from_branches(std::move(bs)));
    }
};

template <>
struct Conditional<Atom> {
    static Atom cond(const Formula& c, const Atom& x, const Atom& y) {
        return Atom(Conditional<Variants<AtomVariable>>::cond(c, x.rep(), y.rep()));
    }
};

template <ConditionalValue A, ConditionalValue B>
struct Conditional<std::pair<A, B>> {
    static std::pair<A, B> cond(const Formula& c, const std::pair<A, B>& x,
                                const std::pair<A, B>& y) {
        return {Conditional<A>::cond(c, x.first, y.first),
                Conditional<B>::cond(c, x.second, y.second)};
    }
};

template <ConditionalValue T>
struct Conditional<std::vector<T>> {
    static std::vector<T> cond(const Formula& c, const std::vector<T>& x,
                               const std::vector<T>& y) {
        if (x.size() != y.size())
            throw std::invalid_argument("cond: lists of different lengths");
        std::vector<T> out;
        out.reserve(x.size());
        for (std::size_t i = 0; i < x.size(); ++i)
            out.push_back(Conditional<T>::cond(c, x[i], y[i]));
        return out;
    }
};

template <ConditionalValue T>
T ite(const Formula& c, const T& x, const T& y, const Context& ctx = Context());

/// The argument-delayed merge of two functions under an unresolved condition:
/// the choice is made when the function is applied.
template <typename R, typename... A>
    requires ConditionalValue<R>
struct Conditional<std::function<R(A...)>> {
    using F = std::function<R(A...)>;
    static F cond(const Formula& c, const F& f, const F& g) {
        return [c, f, g](A... args) { return ite(c, f(args...), g(args...)); };
    }
};

/// The conditional: resolves the condition under the ambient context when
/// possible, otherwise merges the arms with the type-specific cond.
template <ConditionalValue T>
T ite(const Formula& c, const T& x, const T& y, const Context& ctx) {
    switch (ambient_solver().implies_under(ctx.formula(), c)) {
        case Determination::yes: return x;
        case Determination::no: return y;
        case Determination::undetermined: break;
    }
    return Conditional<T>::cond(simplify(c), x, y);
}

// --------------------------------------------------------------------------
// Contextual: restricting a value to a context.

template <typename T>
struct Contextual;

template <typename T>
concept ContextualValue = requires(const Formula& ctx, const T& x) {
    { Contextual<T>::when(ctx, x) } -> std::same_as<T>;
};

/// Introduces a formula into the context of a value: guards decided by the
/// context collapse, branches that contradict it are pruned.
template <ContextualValue T>
T when(const Formula& ctx, const T& x) {
    if (ctx.is_true()) return x;
    return Contextual<T>::when(ctx, x);
}

template <>
struct Contextual<Formula> {
    static Formula when(const Formula& ctx, const Formula& f) {
        switch (ambient_solver().implies_under(ctx, f)) {
            case Determination::yes: return Formula::truth();
            case Determination::no: return Formula::falsity();
            case Determination::undetermined: return simplify(f);
        }
        return f;
    }
};

template <>
struct Contextual<int> {
    static int when(const Formula&, int x) { return x; }
};

template <>
struct Contextual<std::string> {
    static std::string when(const Formula&, const std::string& x) { return x; }
};

template <NominalValue T>
struct Contextual<Variants<T>> {
    static Variants<T> when(const Formula& ctx, const Variants<T>& v) {
        std::vector<typename Variants<T>::Branch> kept;
        for (const auto& b : v.branches()) {
            if (ambient_solver().implies_under(ctx, b.guard) == Determination::no)
                continue;
            T value = b.value;
            if constexpr (ContextualValue<T>) value = Contextual<T>::when(ctx, value);
            kept.push_back({std::move(value), b.guard});
        }
        if (kept.empty()) return v;
        // Variant guards are exhaustive, so a sole survivor is unconditional.
        if (kept.size() == 1) kept.front().guard = Formula::truth();
        return Variants<T>::from_branches(std::move(kept));
    }
};

template <>
struct Contextual<Atom> {
    static Atom when(const Formula& ctx, const Atom& a) {
        return Atom(Contextual<Variants<AtomVariable>>::when(ctx, a.rep()));
    }
};

template <>
struct Contextual<AtomVariable> {
    static AtomVariable when(const Formula&, const AtomVariable& v) { return v; }
};

template <ContextualValue A, ContextualValue B>
struct Contextual<std::pair<A, B>> {
    static std::pair<A, B> when(const Formula& ctx, const std::pair<A, B>& x) {
        return {Contextual<A>::when(ctx, x.first), Contextual<B>::when(ctx, x.second)};
    }
};

template <ContextualValue T>
struct Contextual<std::vector<T>> {
    static std::vector<T> when(const Formula& ctx, const std::vector<T>& x) {
        std::vector<T> out;
        out.reserve(x.size());
        for (const auto& e : x) out.push_back(Contextual<T>::when(ctx, e));
        return out;
    }
};

}  // namespace nlam
