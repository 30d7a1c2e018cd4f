#include "nlam/formula.hpp"

#include <algorithm>
#include <atomic>
#include <cassert>
#include <sstream>
#include <stdexcept>

namespace nlam {

namespace {

std::atomic<std::uint64_t> g_fresh_counter{0};

std::vector<AtomVariable> merge_vars(const std::vector<AtomVariable>& a,
                                     const std::vector<AtomVariable>& b) {
    std::vector<AtomVariable> out;
    out.reserve(a.size() + b.size());
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

}  // namespace

AtomVariable fresh_atom_variable() {
    return AtomVariable("a" + std::to_string(g_fresh_counter.fetch_add(1)));
}

void reset_fresh_names() { g_fresh_counter.store(0); }

bool is_reserved_name(std::string_view name) {
    return !name.empty() && name[0] == '$';
}

struct Formula::Node {
    Kind kind;
    Rel rel = Rel::eq;
    AtomVariable a, b;            // relation operands
    AtomVariable bound_var;       // quantifiers
    std::vector<Formula> kids;    // connective operands / quantifier body
    std::vector<AtomVariable> free_vars;
    std::size_t qdepth = 0;
};

namespace {

using Node = Formula::Node;
using Kind = Formula::Kind;
using Rel = Formula::Rel;

Formula wrap(std::shared_ptr<const Node> n);

const Formula& truth_singleton() {
    static const Formula f = [] {
        auto n = std::make_shared<Node>();
        n->kind = Kind::truth;
        return wrap(n);
    }();
    return f;
}

const Formula& falsity_singleton() {
    static const Formula f = [] {
        auto n = std::make_shared<Node>();
        n->kind = Kind::falsity;
        return wrap(n);
    }();
    return f;
}

}  // namespace

Formula::Formula() : node_(nullptr) { *this = truth_singleton(); }

class FormulaBuilder {
public:
    static Formula make(std::shared_ptr<const Node> n) { return Formula(std::move(n)); }
};

namespace {

Formula wrap(std::shared_ptr<const Node> n) { return FormulaBuilder::make(std::move(n)); }

int rank(Kind k) { return static_cast<int>(k); }

}  // namespace

Formula Formula::truth() { return truth_singleton(); }
Formula Formula::falsity() { return falsity_singleton(); }
Formula Formula::boolean(bool b) { return b ? truth() : falsity(); }

Formula Formula::eq(const AtomVariable& a, const AtomVariable& b) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::relation;
    n->rel = Rel::eq;
    // = is symmetric; keep operands sorted for canonical form.
    n->a = std::min(a, b);
    n->b = std::max(a, b);
    n->free_vars = (n->a == n->b) ? std::vector<AtomVariable>{n->a}
                                  : std::vector<AtomVariable>{n->a, n->b};
    return wrap(std::move(n));
}

Formula Formula::leq(const AtomVariable& a, const AtomVariable& b) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::relation;
    n->rel = Rel::leq;
    n->a = a;
    n->b = b;
    if (a == b) {
        n->free_vars = {a};
    } else {
        n->free_vars = {std::min(a, b), std::max(a, b)};
    }
    return wrap(std::move(n));
}

Formula Formula::lt(const AtomVariable& a, const AtomVariable& b) {
    return conj(leq(a, b), neg(eq(a, b)));
}

Formula Formula::neq(const AtomVariable& a, const AtomVariable& b) {
    return neg(eq(a, b));
}

Formula::Kind Formula::kind() const { return node_->kind; }
Formula::Rel Formula::rel() const { return node_->rel; }
const AtomVariable& Formula::lhs() const { return node_->a; }
const AtomVariable& Formula::rhs() const { return node_->b; }

std::span<const Formula> Formula::operands() const { return node_->kids; }

const AtomVariable& Formula::bound() const { return node_->bound_var; }
const Formula& Formula::body() const { return node_->kids.front(); }

const std::vector<AtomVariable>& Formula::free_variables() const {
    return node_->free_vars;
}

bool Formula::mentions(const AtomVariable& v) const {
    const auto& fv = node_->free_vars;
    return std::binary_search(fv.begin(), fv.end(), v);
}

std::size_t Formula::quantifier_depth() const { return node_->qdepth; }

int Formula::compare(const Formula& other) const {
    const Node* x = node_.get();
    const Node* y = other.node_.get();
    if (x == y) return 0;
    if (rank(x->kind) != rank(y->kind)) return rank(x->kind) < rank(y->kind) ? -1 : 1;
    switch (x->kind) {
        case Kind::truth:
        case Kind::falsity:
            return 0;
        case Kind::relation: {
            if (x->rel != y->rel) return x->rel < y->rel ? -1 : 1;
            if (int c = x->a.name.compare(y->a.name)) return c < 0 ? -1 : 1;
            if (int c = x->b.name.compare(y->b.name)) return c < 0 ? -1 : 1;
            return 0;
        }
        case Kind::exists:
        case Kind::forall:
            // Bound variables carry canonical level names, so comparing them
            // first makes alpha-equivalent formulas structurally identical.
            if (int c = x->bound_var.name.compare(y->bound_var.name)) return c < 0 ? -1 : 1;
            [[fallthrough]];
        default: {
            if (x->kids.size() != y->kids.size())
                return x->kids.size() < y->kids.size() ? -1 : 1;
            for (std::size_t i = 0; i < x->kids.size(); ++i) {
                if (int c = x->kids[i].compare(y->kids[i])) return c;
            }
            return 0;
        }
    }
}

namespace {

Formula make_connective(Kind kind, std::vector<Formula> fs) {
    const Formula unit = (kind == Kind::conjunction) ? Formula::truth() : Formula::falsity();
    const Formula zero = (kind == Kind::conjunction) ? Formula::falsity() : Formula::truth();

    std::vector<Formula> flat;
    flat.reserve(fs.size());
    for (auto& f : fs) {
        if (f.kind() == kind) {
            for (const auto& k : f.operands()) flat.push_back(k);
        } else if (f == zero) {
            return zero;
        } else if (f == unit) {
            continue;
        } else {
            flat.push_back(std::move(f));
        }
    }
    std::sort(flat.begin(), flat.end(),
              [](const Formula& a, const Formula& b) { return a.compare(b) < 0; });
    flat.erase(std::unique(flat.begin(), flat.end(),
                           [](const Formula& a, const Formula& b) { return a.compare(b) == 0; }),
               flat.end());
    if (flat.empty()) return unit;
    if (flat.size() == 1) return flat.front();

    auto n = std::make_shared<Node>();
    n->kind = kind;
    for (const auto& k : flat) {
        n->free_vars = merge_vars(n->free_vars, k.free_variables());
        n->qdepth = std::max(n->qdepth, k.quantifier_depth());
    }
    n->kids = std::move(flat);
    return wrap(std::move(n));
}

// Plain recursive renaming of free variables. The caller guarantees that no
// capture is possible (bound variables use reserved names and mapping targets
// are checked against them where required).
Formula rename_free(const Formula& f,
                    const std::map<AtomVariable, AtomVariable>& m) {
    auto lookup = [&m](const AtomVariable& v) -> const AtomVariable& {
        auto it = m.find(v);
        return it == m.end() ? v : it->second;
    };
    switch (f.kind()) {
        case Kind::truth:
        case Kind::falsity:
            return f;
        case Kind::relation: {
            const AtomVariable& a = lookup(f.lhs());
            const AtomVariable& b = lookup(f.rhs());
            return f.rel() == Rel::eq ? Formula::eq(a, b) : Formula::leq(a, b);
        }
        case Kind::negation:
            return neg(rename_free(f.operands()[0], m));
        case Kind::conjunction:
        case Kind::disjunction: {
            std::vector<Formula> kids;
            kids.reserve(f.operands().size());
            bool changed = false;
            for (const auto& k : f.operands()) {
                kids.push_back(rename_free(k, m));
                changed = changed || kids.back().compare(k) != 0;
            }
            if (!changed) return f;
            return make_connective(f.kind(), std::move(kids));
        }
        case Kind::exists:
        case Kind::forall: {
            assert(!m.count(f.bound()));
            Formula body = rename_free(f.body(), m);
            return f.kind() == Kind::exists ? exists(f.bound(), body)
                                            : for_all(f.bound(), body);
        }
    }
    return f;
}

Formula make_quantifier(Kind kind, const AtomVariable& v, const Formula& body) {
    if (body.is_true() || body.is_false()) return body;  // nonempty domain
    if (!body.mentions(v)) return body;
    const std::size_t depth = body.quantifier_depth();
    AtomVariable canonical("$" + std::to_string(depth));
    Formula canonical_body = body;
    if (v != canonical) {
        // Canonical level names are bound at construction only, so the target
        // name cannot occur free in the body.
        assert(!body.mentions(canonical));
        canonical_body = rename_free(body, {{v, canonical}});
    }
    auto n = std::make_shared<Node>();
    n->kind = kind;
    n->bound_var = canonical;
    n->qdepth = depth + 1;
    n->free_vars = canonical_body.free_variables();
    n->free_vars.erase(
        std::remove(n->free_vars.begin(), n->free_vars.end(), canonical),
        n->free_vars.end());
    n->kids = {std::move(canonical_body)};
    return wrap(std::move(n));
}

}  // namespace

Formula conj(std::vector<Formula> fs) { return make_connective(Kind::conjunction, std::move(fs)); }
Formula conj(const Formula& a, const Formula& b) { return conj(std::vector<Formula>{a, b}); }
Formula conj(const Formula& a, const Formula& b, const Formula& c) {
    return conj(std::vector<Formula>{a, b, c});
}
Formula disj(std::vector<Formula> fs) { return make_connective(Kind::disjunction, std::move(fs)); }
Formula disj(const Formula& a, const Formula& b) { return disj(std::vector<Formula>{a, b}); }

Formula neg(const Formula& f) {
    switch (f.kind()) {
        case Kind::truth: return Formula::falsity();
        case Kind::falsity: return Formula::truth();
        case Kind::negation: return f.operands()[0];
        default: break;
    }
    auto n = std::make_shared<Node>();
    n->kind = Kind::negation;
    n->free_vars = f.free_variables();
    n->qdepth = f.quantifier_depth();
    n->kids = {f};
    return wrap(std::move(n));
}

Formula implies(const Formula& a, const Formula& b) { return disj(neg(a), b); }

Formula iff(const Formula& a, const Formula& b) {
    return disj(conj(a, b), conj(neg(a), neg(b)));
}

Formula exists(const AtomVariable& v, const Formula& body) {
    return make_quantifier(Kind::exists, v, body);
}

Formula for_all(const AtomVariable& v, const Formula& body) {
    return make_quantifier(Kind::forall, v, body);
}

Formula exists_closure(std::span<const AtomVariable> vs, Formula body) {
    for (auto it = vs.rbegin(); it != vs.rend(); ++it) body = exists(*it, body);
    return body;
}

Formula forall_closure(std::span<const AtomVariable> vs, Formula body) {
    for (auto it = vs.rbegin(); it != vs.rend(); ++it) body = for_all(*it, body);
    return body;
}

Formula substitute(const Formula& phi,
                   const std::map<AtomVariable, AtomVariable>& mapping) {
    for (const auto& [from, to] : mapping) {
        (void)from;
        if (is_reserved_name(to.name))
            throw std::invalid_argument("substitute: reserved target name " + to.name);
    }
    return rename_free(phi, mapping);
}

namespace {

// And(..., f, not f, ...) -> false; dually for Or. Operands are sorted, so a
// binary search locates complements.
bool has_complementary_pair(std::span<const Formula> kids) {
    for (const auto& k : kids) {
        if (k.kind() != Kind::negation) continue;
        const Formula& inner = k.operands()[0];
        if (std::binary_search(kids.begin(), kids.end(), inner,
                               [](const Formula& a, const Formula& b) {
                                   return a.compare(b) < 0;
                               }))
            return true;
    }
    return false;
}

}  // namespace

Formula simplify(const Formula& phi) {
    switch (phi.kind()) {
        case Kind::truth:
        case Kind::falsity:
            return phi;
        case Kind::relation:
            if (phi.lhs() == phi.rhs()) return Formula::truth();
            return phi;
        case Kind::negation:
            return neg(simplify(phi.operands()[0]));
        case Kind::conjunction:
        case Kind::disjunction: {
            std::vector<Formula> kids;
            kids.reserve(phi.operands().size());
            for (const auto& k : phi.operands()) kids.push_back(simplify(k));
            Formula out = make_connective(phi.kind(), std::move(kids));
            if (out.kind() == phi.kind() && has_complementary_pair(out.operands()))
                return phi.kind() == Kind::conjunction ? Formula::falsity()
                                                       : Formula::truth();
            return out;
        }
        case Kind::exists:
            return exists(phi.bound(), simplify(phi.body()));
        case Kind::forall:
            return for_all(phi.bound(), simplify(phi.body()));
    }
    return phi;
}

// --------------------------------------------------------------------------
// Printing

namespace {

struct Printer {
    // Display names for canonical bound variables, assigned on first sight.
    std::map<std::string, std::string> display;
    std::vector<std::string> taken;
    int next_id = 0;

    explicit Printer(const std::vector<AtomVariable>& free) {
        for (const auto& v : free) taken.push_back(v.name);
    }

    std::string bound_name(const std::string& raw) {
        auto it = display.find(raw);
        if (it != display.end()) return it->second;
        std::string candidate;
        do {
            candidate = "b" + std::to_string(next_id++);
        } while (std::find(taken.begin(), taken.end(), candidate) != taken.end());
        taken.push_back(candidate);
        display.emplace(raw, candidate);
        return candidate;
    }

    std::string name(const AtomVariable& v) {
        if (is_reserved_name(v.name)) {
            auto it = display.find(v.name);
            return it == display.end() ? v.name : it->second;
        }
        return v.name;
    }

    // Precedence: quantifier 0 < or 1 < and 2 < not 3 < atom 4.
    std::string print(const Formula& f, int parent) {
        switch (f.kind()) {
            case Kind::truth: return "⊤";
            case Kind::falsity: return "⊥";
            case Kind::relation: {
                const char* op = f.rel() == Rel::eq ? " = " : " ≤ ";
                return name(f.lhs()) + op + name(f.rhs());
            }
            case Kind::negation: {
                const Formula& inner = f.operands()[0];
                if (inner.kind() == Kind::relation && inner.rel() == Rel::eq)
                    return name(inner.lhs()) + " ≠ " + name(inner.rhs());
                if (inner.kind() == Kind::relation)
                    return "¬(" + print(inner, 0) + ")";
                return "¬" + print(inner, 3);
            }
            case Kind::conjunction:
            case Kind::disjunction: {
                const bool is_and = f.kind() == Kind::conjunction;
                const int prec = is_and ? 2 : 1;
                std::string sep = is_and ? " ∧ " : " ∨ ";
                std::string out;
                for (std::size_t i = 0; i < f.operands().size(); ++i) {
                    if (i) out += sep;
                    out += print(f.operands()[i], prec + 1);
                }
                if (parent > prec) out = "(" + out + ")";
                return out;
            }
            case Kind::exists:
            case Kind::forall: {
                std::string b = bound_name(f.bound().name);
                std::string out = (f.kind() == Kind::exists ? "∃" : "∀");
                out += b + ". " + print(f.body(), 0);
                display.erase(f.bound().name);  // scope ends here
                if (parent > 0) out = "(" + out + ")";
                return out;
            }
        }
        return {};
    }
};

}  // namespace

std::string Formula::to_string() const {
    // Relation atoms never need parentheses at top level.
    Printer p(free_variables());
    return p.print(*this, 0);
}

std::string Formula::canonical_key() const {
    switch (kind()) {
        case Kind::truth: return "T";
        case Kind::falsity: return "F";
        case Kind::relation:
            return (rel() == Rel::eq ? "=(" : "<=(") + lhs().name + "," + rhs().name + ")";
        case Kind::negation:
            return "~(" + operands()[0].canonical_key() + ")";
        case Kind::conjunction:
        case Kind::disjunction: {
            std::string out = kind() == Kind::conjunction ? "&(" : "|(";
            for (std::size_t i = 0; i < operands().size(); ++i) {
                if (i) out += ",";
                out += operands()[i].canonical_key();
            }
            return out + ")";
        }
        case Kind::exists:
        case Kind::forall:
            return std::string(kind() == Kind::exists ? "E" : "A") + bound().name +
                   "(" + body().canonical_key() + ")";
    }
    return {};
}

// --------------------------------------------------------------------------
// Parsing

namespace {

struct Token {
    enum Type {
        ident, kw_true, kw_false, kw_exists, kw_forall,
        t_not, t_and, t_or, t_eq, t_leq, t_lt, t_geq, t_gt, t_neq,
        lparen, rparen, dot, end
    };
    Type type;
    std::string text;
};

class Lexer {
public:
    explicit Lexer(std::string_view s) : s_(s) {}

    Token next() {
        skip_ws();
        if (pos_ >= s_.size()) return {Token::end, ""};
        if (eat("∧") || eat("/\\") || eat("&")) return {Token::t_and, ""};
        if (eat("∨") || eat("\\/") || eat("|")) return {Token::t_or, ""};
        if (eat("!=")) return {Token::t_neq, ""};
        if (eat("¬") || eat("~") || eat("!")) return {Token::t_not, ""};
        if (eat("∃")) return {Token::kw_exists, ""};
        if (eat("∀")) return {Token::kw_forall, ""};
        if (eat("≤") || eat("<=")) return {Token::t_leq, ""};
        if (eat("≥") || eat(">=")) return {Token::t_geq, ""};
        if (eat("≠")) return {Token::t_neq, ""};
        if (eat("⊤")) return {Token::kw_true, ""};
        if (eat("⊥")) return {Token::kw_false, ""};
        if (eat("<")) return {Token::t_lt, ""};
        if (eat(">")) return {Token::t_gt, ""};
        if (eat("=")) return {Token::t_eq, ""};
        if (eat("(")) return {Token::lparen, ""};
        if (eat(")")) return {Token::rparen, ""};
        if (eat(".")) return {Token::dot, ""};
        if (std::isalpha(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_') {
            std::size_t start = pos_;
            while (pos_ < s_.size() &&
                   (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
                ++pos_;
            std::string word(s_.substr(start, pos_ - start));
            if (word == "true") return {Token::kw_true, ""};
            if (word == "false") return {Token::kw_false, ""};
            if (word == "exists") return {Token::kw_exists, ""};
            if (word == "forall") return {Token::kw_forall, ""};
            if (word == "not") return {Token::t_not, ""};
            if (word == "and") return {Token::t_and, ""};
            if (word == "or") return {Token::t_or, ""};
            return {Token::ident, word};
        }
        throw std::invalid_argument("formula parse error: unexpected character at offset " +
                                    std::to_string(pos_));
    }

private:
    void skip_ws() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    bool eat(std::string_view lit) {
        if (s_.substr(pos_, lit.size()) == lit) {
            pos_ += lit.size();
            return true;
        }
        return false;
    }
    std::string_view s_;
    std::size_t pos_ = 0;
};

class Parser {
public:
    explicit Parser(std::string_view s) : lexer_(s) { advance(); }

    Formula parse() {
        Formula f = parse_or();
        expect(Token::end, "end of input");
        return f;
    }

private:
    void advance() { tok_ = lexer_.next(); }

    void expect(Token::Type t, const char* what) {
        if (tok_.type != t)
            throw std::invalid_argument(std::string("formula parse error: expected ") + what);
        advance();
    }

    Formula parse_or() {
        Formula f = parse_and();
        while (tok_.type == Token::t_or) {
            advance();
            f = disj(f, parse_and());
        }
        return f;
    }

    Formula parse_and() {
        Formula f = parse_unary();
        while (tok_.type == Token::t_and) {
            advance();
            f = conj(f, parse_unary());
        }
        return f;
    }

    Formula parse_unary() {
        if (tok_.type == Token::t_not) {
            advance();
            return neg(parse_unary());
        }
        if (tok_.type == Token::kw_exists || tok_.type == Token::kw_forall) {
            bool ex = tok_.type == Token::kw_exists;
            advance();
            AtomVariable v = parse_variable();
            expect(Token::dot, "'.'");
            Formula body = parse_or();
            return ex ? exists(v, body) : for_all(v, body);
        }
        return parse_primary();
    }

    AtomVariable parse_variable() {
        if (tok_.type != Token::ident)
            throw std::invalid_argument("formula parse error: expected variable name");
        AtomVariable v(tok_.text);
        advance();
        return v;
    }

    Formula parse_primary() {
        switch (tok_.type) {
            case Token::kw_true: advance(); return Formula::truth();
            case Token::kw_false: advance(); return Formula::falsity();
            case Token::lparen: {
                advance();
                Formula f = parse_or();
                expect(Token::rparen, "')'");
                return f;
            }
            case Token::ident: {
                AtomVariable a = parse_variable();
                switch (tok_.type) {
                    case Token::t_eq: advance(); return Formula::eq(a, parse_variable());
                    case Token::t_neq: advance(); return Formula::neq(a, parse_variable());
                    case Token::t_leq: advance(); return Formula::leq(a, parse_variable());
                    case Token::t_lt: advance(); return Formula::lt(a, parse_variable());
                    case Token::t_geq: advance(); return Formula::leq(parse_variable(), a);
                    case Token::t_gt: advance(); return Formula::lt(parse_variable(), a);
                    default:
                        throw std::invalid_argument(
                            "formula parse error: expected relation after variable");
                }
            }
            default:
                throw std::invalid_argument("formula parse error: unexpected token");
        }
    }

    Lexer lexer_;
    Token tok_;
};

}  // namespace

Formula parse_formula(std::string_view text) { return Parser(text).parse(); }

}  // namespace nlam
