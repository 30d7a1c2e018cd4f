#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace nlam {

/// A variable ranging over atoms. Names are globally unique when drawn from
/// the fresh-name supply; names starting with '$' are reserved for canonical
/// bound variables and never appear free in user-facing formulas.
struct AtomVariable {
    std::string name;

    AtomVariable() = default;
    explicit AtomVariable(std::string n) : name(std::move(n)) {}

    auto operator<=>(const AtomVariable&) const = default;
};

/// Draws a never-before-used variable from the process-wide supply.
/// Thread-safe (atomic counter).
AtomVariable fresh_atom_variable();

/// Resets the fresh-name supply. Used by the CLI for deterministic,
/// reproducible runs; do not call while other threads draw names.
void reset_fresh_names();

bool is_reserved_name(std::string_view name);

/// First-order formulas over atom variables with the relations of the atom
/// signature (= and <=), boolean connectives and quantifiers.
///
/// Formulas are immutable values with shared structure. Constructors keep a
/// canonical form:
///   - nested conjunctions/disjunctions are flattened, operands sorted by the
///     structural order and exact duplicates removed,
///   - unit and absorbing elements of the connectives are reduced,
///   - double negation is removed,
///   - quantifiers binding a variable that does not occur in the body are
///     dropped, and bodies that are plainly true/false collapse (both atom
///     structures are nonempty),
///   - bound variables are renamed to canonical level-indexed names, so
///     alpha-equivalent formulas are structurally equal.
class Formula {
public:
    enum class Kind : std::uint8_t {
        truth,
        falsity,
        relation,
        negation,
        conjunction,
        disjunction,
        exists,
        forall,
    };

    enum class Rel : std::uint8_t { eq, leq };

    /// Default-constructed formula is ⊤.
    Formula();

    static Formula truth();
    static Formula falsity();
    static Formula boolean(bool b);

    /// Atomic equality. Operands are stored sorted (= is symmetric).
    static Formula eq(const AtomVariable& a, const AtomVariable& b);
    /// Atomic order relation; meaningful for ordered atoms only. The theory
    /// layer rejects it under equality atoms.
    static Formula leq(const AtomVariable& a, const AtomVariable& b);
    /// Derived: a < b  ==  a <= b and not a = b.
    static Formula lt(const AtomVariable& a, const AtomVariable& b);
    /// Derived: not (a = b).
    static Formula neq(const AtomVariable& a, const AtomVariable& b);

    Kind kind() const;
    bool is_true() const { return kind() == Kind::truth; }
    bool is_false() const { return kind() == Kind::falsity; }

    /// Relation accessors; valid only when kind() == relation.
    Rel rel() const;
    const AtomVariable& lhs() const;
    const AtomVariable& rhs() const;

    /// Operands of a connective (negation has exactly one).
    std::span<const Formula> operands() const;

    /// Quantifier accessors; valid only for exists/forall.
    const AtomVariable& bound() const;
    const Formula& body() const;

    /// Free variables, sorted by name, no duplicates.
    const std::vector<AtomVariable>& free_variables() const;
    bool mentions(const AtomVariable& v) const;

    /// Maximum quantifier nesting depth (0 for quantifier-free).
    std::size_t quantifier_depth() const;
    bool quantifier_free() const { return quantifier_depth() == 0; }

    /// Total structural order; alpha-equivalent formulas compare equal.
    int compare(const Formula& other) const;
    bool operator==(const Formula& other) const { return compare(other) == 0; }
    bool operator<(const Formula& other) const { return compare(other) < 0; }

    /// Pretty form, e.g. "a = b ∧ ¬(c ≤ d)"; bound variables are shown with
    /// readable names. See the grammar in the README; parse_formula reads
    /// this form back.
    std::string to_string() const;

    /// Unambiguous serialization of the canonical form; stable across runs
    /// for structurally equal formulas. Used as a cache key.
    std::string canonical_key() const;

    struct Node;

private:
    explicit Formula(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
    std::shared_ptr<const Node> node_;

    friend Formula conj(std::vector<Formula> fs);
    friend Formula disj(std::vector<Formula> fs);
    friend Formula neg(const Formula& f);
    friend Formula exists(const AtomVariable& v, const Formula& body);
    friend Formula for_all(const AtomVariable& v, const Formula& body);
    friend class FormulaBuilder;
};

Formula conj(std::vector<Formula> fs);
Formula conj(const Formula& a, const Formula& b);
Formula conj(const Formula& a, const Formula& b, const Formula& c);
Formula disj(std::vector<Formula> fs);
Formula disj(const Formula& a, const Formula& b);
Formula neg(const Formula& f);
Formula implies(const Formula& a, const Formula& b);
Formula iff(const Formula& a, const Formula& b);
Formula exists(const AtomVariable& v, const Formula& body);
Formula for_all(const AtomVariable& v, const Formula& body);
Formula exists_closure(std::span<const AtomVariable> vs, Formula body);
Formula forall_closure(std::span<const AtomVariable> vs, Formula body);

/// Capture-avoiding simultaneous renaming of free variables. Mapped-to names
/// must not be reserved; bound variables are unaffected.
Formula substitute(const Formula& phi,
                   const std::map<AtomVariable, AtomVariable>& mapping);

/// Purely syntactic simplification: connective identities/absorption with
/// ⊤/⊥, double negation, reflexive relations (a = a, a <= a), duplicate and
/// complementary operands. Equivalence-preserving in every atom theory; no
/// solver calls.
Formula simplify(const Formula& phi);

/// Parses the pretty-printed form (ASCII spellings accepted as well).
/// Throws std::invalid_argument on malformed input.
Formula parse_formula(std::string_view text);

}  // namespace nlam
