#pragma once
// Expression DAG for the right-hand sides of combinatorial functional systems.
// Nodes are immutable and shared; structural equality is deep.

#include "subcrit/domain.hpp"

#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace subcrit {

enum class expr_kind {
    constant, // rational literal
    atom,     // the variable z
    marker,   // scalar-valued secondary variable (v, u, w_k, ...)
    var,      // system unknown
    sum,      // n-ary sum
    prod,     // n-ary product
    neg,      // additive inverse
    exp_op,   // labelled Set
    geom,     // 1/(1-e), e(0)=0
    set_ge,   // labelled Set with >= k components
    pset,     // unlabelled multiset: exp(sum_{i>=1} e(z^i)/i)
    pset_tail,// exp(sum_{i>=2} e(z^i)/i)
    pset_even,// exp(sum over even i>=2 of e(z^i)/i)
    pset_odd, // exp(sum over odd i>=1 of e(z^i)/i)
    pset_ge,  // unlabelled multiset with >= k components
    subst,    // e(z^k); marker scalars raised to the k-th power
    unroot_op,// integral of e(t)/t dt from 0 to z
    frozen,   // analytic-tail placeholder: wraps an expression or a fixed polynomial
};

struct expr_node;
using expr = std::shared_ptr<const expr_node>;

struct expr_node {
    expr_kind kind;
    rat value;              // constant
    std::string name;       // marker / var
    unsigned k = 0;         // subst scale factor, set_ge / pset_ge threshold
    std::vector<expr> args;
    std::vector<rat> poly;  // frozen payload when args is empty

    bool is_const(const rat& q) const { return kind == expr_kind::constant && value == q; }
};

inline expr make_node(expr_node n) { return std::make_shared<const expr_node>(std::move(n)); }

inline expr ex_const(rat q) { return make_node({.kind = expr_kind::constant, .value = std::move(q)}); }
inline expr ex_const(long num, long den = 1) { return ex_const(rat(num, den)); }
inline expr ex_atom() { return make_node({.kind = expr_kind::atom}); }
inline expr ex_marker(std::string name) { return make_node({.kind = expr_kind::marker, .name = std::move(name)}); }
inline expr ex_var(std::string name) { return make_node({.kind = expr_kind::var, .name = std::move(name)}); }

inline expr ex_sum(std::vector<expr> terms) {
    if (terms.empty()) return ex_const(0);
    if (terms.size() == 1) return terms[0];
    return make_node({.kind = expr_kind::sum, .args = std::move(terms)});
}
inline expr ex_prod(std::vector<expr> factors) {
    if (factors.empty()) return ex_const(1);
    if (factors.size() == 1) return factors[0];
    return make_node({.kind = expr_kind::prod, .args = std::move(factors)});
}
inline expr ex_neg(expr e) { return make_node({.kind = expr_kind::neg, .args = {std::move(e)}}); }
inline expr ex_exp(expr e) { return make_node({.kind = expr_kind::exp_op, .args = {std::move(e)}}); }
inline expr ex_geom(expr e) { return make_node({.kind = expr_kind::geom, .args = {std::move(e)}}); }
inline expr ex_set_ge(unsigned k, expr e) {
    return make_node({.kind = expr_kind::set_ge, .k = k, .args = {std::move(e)}});
}
inline expr ex_pset(expr e) { return make_node({.kind = expr_kind::pset, .args = {std::move(e)}}); }
inline expr ex_pset_tail(expr e) { return make_node({.kind = expr_kind::pset_tail, .args = {std::move(e)}}); }
inline expr ex_pset_even(expr e) { return make_node({.kind = expr_kind::pset_even, .args = {std::move(e)}}); }
inline expr ex_pset_odd(expr e) { return make_node({.kind = expr_kind::pset_odd, .args = {std::move(e)}}); }
inline expr ex_pset_ge(unsigned k, expr e) {
    return make_node({.kind = expr_kind::pset_ge, .k = k, .args = {std::move(e)}});
}
inline expr ex_subst(expr e, unsigned k) {
    if (k == 0) throw std::invalid_argument("Subst requires k >= 1");
    if (k == 1) return e; // Subst(e,1) == e
    return make_node({.kind = expr_kind::subst, .k = k, .args = {std::move(e)}});
}
inline expr ex_unroot(expr e) { return make_node({.kind = expr_kind::unroot_op, .args = {std::move(e)}}); }
inline expr ex_frozen(expr e) { return make_node({.kind = expr_kind::frozen, .args = {std::move(e)}}); }
inline expr ex_frozen_poly(std::vector<rat> poly) {
    return make_node({.kind = expr_kind::frozen, .poly = std::move(poly)});
}

// Arithmetic sugar for building systems legibly.
inline expr operator+(expr a, expr b) { return ex_sum({std::move(a), std::move(b)}); }
inline expr operator*(expr a, expr b) { return ex_prod({std::move(a), std::move(b)}); }
inline expr operator-(expr a, expr b) { return ex_sum({std::move(a), ex_neg(std::move(b))}); }

inline expr ex_pow(expr e, unsigned m) {
    if (m == 0) return ex_const(1);
    std::vector<expr> fs(m, e);
    return ex_prod(std::move(fs));
}

inline bool expr_equal(const expr& a, const expr& b) {
    if (a == b) return true;
    if (!a || !b) return false;
    if (a->kind != b->kind || a->k != b->k || a->name != b->name) return false;
    if (a->kind == expr_kind::constant && a->value != b->value) return false;
    if (a->poly != b->poly) return false;
    if (a->args.size() != b->args.size()) return false;
    for (size_t i = 0; i < a->args.size(); ++i)
        if (!expr_equal(a->args[i], b->args[i])) return false;
    return true;
}

// Does `name` occur as a live Var? With count_shielded=false, occurrences that
// only feed plethysm slices i>=2 — under Subst(.,k>=2), inside PSetTail or
// PSetEven arguments, or inside Frozen — do not count: they are distinct
// analytic inputs from the solver's point of view (d/dVar of those is zero).
inline bool var_occurs(const expr& e, const std::string& name, bool count_shielded) {
    if (!e) return false;
    switch (e->kind) {
    case expr_kind::var: return e->name == name;
    case expr_kind::subst:
    case expr_kind::pset_tail:
    case expr_kind::pset_even:
        if (!count_shielded) return false;
        return var_occurs(e->args[0], name, count_shielded);
    case expr_kind::frozen:
        if (!count_shielded) return false;
        return !e->args.empty() && var_occurs(e->args[0], name, count_shielded);
    default:
        for (const expr& a : e->args)
            if (var_occurs(a, name, count_shielded)) return true;
        return false;
    }
}

inline bool contains_kind(const expr& e, expr_kind k) {
    if (!e) return false;
    if (e->kind == k) return true;
    for (const expr& a : e->args)
        if (contains_kind(a, k)) return true;
    return false;
}

inline bool any_var(const expr& e) {
    if (!e) return false;
    if (e->kind == expr_kind::var) return true;
    for (const expr& a : e->args)
        if (any_var(a)) return true;
    return false;
}

// A parsed combinatorial class: named equations y_i = F_i(y; z, markers).
struct class_spec {
    std::string name;
    bool labelled = true;
    std::vector<std::pair<std::string, expr>> equations;
    std::vector<std::string> exposed;
    std::vector<std::string> markers;

    const expr& rhs(const std::string& var) const {
        for (const auto& [v, e] : equations)
            if (v == var) return e;
        throw std::out_of_range("no equation for variable " + var);
    }
    bool has_var(const std::string& var) const {
        for (const auto& [v, e] : equations)
            if (v == var) return true;
        return false;
    }
    bool has_marker(const std::string& m) const {
        for (const auto& x : markers)
            if (x == m) return true;
        return false;
    }
};

// Structural validation shared by the parser and the builtin constructors.
void validate(const class_spec& spec);

namespace detail {
inline void check_flavor(const expr& e, bool labelled, bool has_frozen, const std::string& ctx) {
    if (!e) return;
    const char* bad = nullptr;
    if (labelled) {
        switch (e->kind) {
        case expr_kind::pset: bad = "PSet"; break;
        case expr_kind::pset_tail: bad = "PSetTail"; break;
        case expr_kind::pset_even: bad = "PSetEven"; break;
        case expr_kind::pset_odd: bad = "PSetOdd"; break;
        case expr_kind::pset_ge: bad = "PSetGe"; break;
        case expr_kind::subst: bad = "Subst"; break;
        default: break;
        }
    } else {
        switch (e->kind) {
        // Exp over a live argument is exactly what PSet turns into once the
        // analytic tail factor is split off, so it is admitted whenever the
        // class carries Frozen content.
        case expr_kind::exp_op: if (!has_frozen) bad = "Exp"; break;
        case expr_kind::set_ge: bad = "SetGe"; break;
        default: break;
        }
    }
    if (bad)
        throw std::invalid_argument(ctx + ": constructor " + bad + " not allowed in " +
                                    (labelled ? "labelled" : "unlabelled") + " flavor");
    for (const expr& a : e->args) check_flavor(a, labelled, has_frozen, ctx);
}

inline void collect_vars(const expr& e, std::vector<std::string>& out) {
    if (!e) return;
    if (e->kind == expr_kind::var) out.push_back(e->name);
    for (const expr& a : e->args) collect_vars(a, out);
}
} // namespace detail

inline void validate(const class_spec& spec) {
    for (const auto& [v, e] : spec.equations) {
        if (v == "z") throw std::invalid_argument("variable must not be named z");
        for (const auto& m : spec.markers)
            if (v == m) throw std::invalid_argument("variable " + v + " collides with a marker");
        size_t defs = 0;
        for (const auto& [w, e2] : spec.equations)
            if (w == v) ++defs;
        if (defs != 1) throw std::invalid_argument("variable " + v + " defined more than once");
    }
    bool has_frozen = false;
    for (const auto& [v, e] : spec.equations)
        has_frozen = has_frozen || contains_kind(e, expr_kind::frozen);
    for (const auto& [v, e] : spec.equations) {
        std::vector<std::string> used;
        detail::collect_vars(e, used);
        for (const auto& u : used)
            if (!spec.has_var(u))
                throw std::invalid_argument("undefined variable " + u + " in equation for " + v);
        detail::check_flavor(e, spec.labelled, has_frozen, "equation for " + v);
    }
    for (const auto& x : spec.exposed)
        if (!spec.has_var(x)) throw std::invalid_argument("exposed variable " + x + " is undefined");
}

} // namespace subcrit
