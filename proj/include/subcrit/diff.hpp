#pragma once
// Symbolic differentiation of expression DAGs with respect to a system
// variable, the atom z, or a marker.
//
// Plethysm slices: d/dVar of Subst(e, k>=2) is zero. After tail freezing the
// k>=2 slices are distinct frozen inputs of the reduced system, so the only
// live dependence on a variable is the i=1 slice. Consequently
// d/dVar PSet(e) = PSet(e) * d/dVar e (the i=1 slice of the exponent), and
// PSetTail / PSetEven have no i=1 slice at all.
//
// Markers are not shielded: Subst raises marker scalars to the k-th power, so
// d/dMarker Subst(e, k) = k * v^(k-1) * Subst(d/dMarker e, k).
//
// z-derivatives of unfrozen Polya operators would be infinite plethysm sums;
// they are rejected. Frozen systems never contain them.

#include "subcrit/expr.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace subcrit {

enum class diff_var_kind { var, atom, marker };

struct diff_target {
    diff_var_kind kind;
    std::string name; // var / marker only

    static diff_target wrt_var(std::string n) { return {diff_var_kind::var, std::move(n)}; }
    static diff_target wrt_z() { return {diff_var_kind::atom, {}}; }
    static diff_target wrt_marker(std::string n) { return {diff_var_kind::marker, std::move(n)}; }
};

// Multisets with >= k components, expanded into PSet / Subst nodes:
// PSetGe(k, e) = PSet(e) - sum_{j<k} h_j with the complete homogeneous
// h_j = (1/j) sum_{i=1..j} Subst(e, i) h_{j-i}.
inline expr expand_pset_ge(unsigned k, const expr& e) {
    std::vector<expr> h;
    h.push_back(ex_const(1));
    for (unsigned j = 1; j < k; ++j) {
        std::vector<expr> terms;
        for (unsigned i = 1; i <= j; ++i)
            terms.push_back(ex_const(rat(1, j)) * ex_subst(e, i) * h[j - i]);
        h.push_back(ex_sum(std::move(terms)));
    }
    expr out = ex_pset(e);
    for (unsigned j = 0; j < k; ++j) out = out - h[j];
    return out;
}

namespace detail {

inline bool is_zero_expr(const expr& e) { return e->is_const(0); }

inline expr d(const expr& e, const diff_target& t);

inline expr d_product(const std::vector<expr>& fs, const diff_target& t) {
    std::vector<expr> terms;
    for (size_t i = 0; i < fs.size(); ++i) {
        expr di = d(fs[i], t);
        if (is_zero_expr(di)) continue;
        std::vector<expr> factor_list;
        for (size_t j = 0; j < fs.size(); ++j) factor_list.push_back(j == i ? di : fs[j]);
        terms.push_back(ex_prod(std::move(factor_list)));
    }
    return ex_sum(std::move(terms));
}

inline expr d(const expr& e, const diff_target& t) {
    switch (e->kind) {
    case expr_kind::constant: return ex_const(0);
    case expr_kind::atom: return t.kind == diff_var_kind::atom ? ex_const(1) : ex_const(0);
    case expr_kind::marker:
        return (t.kind == diff_var_kind::marker && e->name == t.name) ? ex_const(1) : ex_const(0);
    case expr_kind::var:
        return (t.kind == diff_var_kind::var && e->name == t.name) ? ex_const(1) : ex_const(0);
    case expr_kind::sum: {
        std::vector<expr> terms;
        for (const expr& a : e->args) {
            expr da = d(a, t);
            if (!is_zero_expr(da)) terms.push_back(da);
        }
        return ex_sum(std::move(terms));
    }
    case expr_kind::prod: return d_product(e->args, t);
    case expr_kind::neg: {
        expr da = d(e->args[0], t);
        return is_zero_expr(da) ? da : ex_neg(da);
    }
    case expr_kind::exp_op: {
        expr da = d(e->args[0], t);
        if (is_zero_expr(da)) return da;
        return e * da;
    }
    case expr_kind::geom: {
        expr da = d(e->args[0], t);
        if (is_zero_expr(da)) return da;
        return e * e * da;
    }
    case expr_kind::set_ge: {
        expr da = d(e->args[0], t);
        if (is_zero_expr(da)) return da;
        unsigned k = e->k == 0 ? 0 : e->k - 1;
        return ex_set_ge(k, e->args[0]) * da;
    }
    case expr_kind::pset: {
        if (t.kind == diff_var_kind::var) {
            expr da = d(e->args[0], t);
            if (is_zero_expr(da)) return da;
            return e * da; // only the i=1 slice is live
        }
        throw std::invalid_argument(
            "derivative of an unfrozen PSet with respect to z or a marker is an infinite "
            "plethysm sum; freeze tails first");
    }
    case expr_kind::pset_odd: {
        if (t.kind == diff_var_kind::var) {
            expr da = d(e->args[0], t);
            if (is_zero_expr(da)) return da;
            return e * da; // i=1 is the only live odd slice
        }
        throw std::invalid_argument(
            "derivative of an unfrozen PSetOdd with respect to z or a marker is an infinite "
            "plethysm sum; freeze tails first");
    }
    case expr_kind::pset_tail:
    case expr_kind::pset_even:
        if (t.kind == diff_var_kind::var) return ex_const(0); // no i=1 slice
        throw std::invalid_argument(
            "derivative of an unfrozen Polya tail with respect to z or a marker is an "
            "infinite plethysm sum; freeze tails first");
    case expr_kind::pset_ge:
        return d(expand_pset_ge(e->k, e->args[0]), t);
    case expr_kind::subst: {
        switch (t.kind) {
        case diff_var_kind::var: return ex_const(0); // shielded slice
        case diff_var_kind::marker: {
            expr da = d(e->args[0], t);
            if (is_zero_expr(da)) return da;
            return ex_const(static_cast<long>(e->k)) * ex_pow(ex_marker(t.name), e->k - 1) *
                   ex_subst(da, e->k);
        }
        case diff_var_kind::atom: {
            expr da = d(e->args[0], t);
            if (is_zero_expr(da)) return da;
            return ex_const(static_cast<long>(e->k)) * ex_pow(ex_atom(), e->k - 1) *
                   ex_subst(da, e->k);
        }
        }
        throw std::logic_error("unreachable");
    }
    case expr_kind::unroot_op:
        throw std::invalid_argument("Unroot has no in-grammar derivative");
    case expr_kind::frozen: {
        if (t.kind != diff_var_kind::atom) return ex_const(0); // analytic constant input
        if (!e->args.empty()) return ex_frozen(d(e->args[0], t));
        std::vector<rat> dp;
        for (size_t n = 1; n < e->poly.size(); ++n) dp.push_back(rat(n) * e->poly[n]);
        if (dp.empty()) dp.push_back(0);
        return ex_frozen_poly(std::move(dp));
    }
    }
    throw std::logic_error("unhandled expression kind");
}

} // namespace detail

inline expr differentiate(const expr& e, const diff_target& target) {
    return detail::d(e, target);
}
inline expr d_var(const expr& e, const std::string& var) {
    return differentiate(e, diff_target::wrt_var(var));
}
inline expr d_z(const expr& e) { return differentiate(e, diff_target::wrt_z()); }
inline expr d_marker(const expr& e, const std::string& m) {
    return differentiate(e, diff_target::wrt_marker(m));
}

} // namespace subcrit
