#pragma once
// Canonical printer for class specs and expressions. Output re-parses to a
// structurally identical spec (parse . print = identity).

#include "subcrit/expr.hpp"

#include <string>

namespace subcrit {

namespace detail {

// Precedence levels: 0 sum, 1 product, 2 atomic factor.
inline void print_expr(const expr& e, int parent_level, std::string& out);

inline void print_wrapped(const char* fn, const expr& arg, std::string& out) {
    out += fn;
    out += '(';
    print_expr(arg, 0, out);
    out += ')';
}

inline void print_poly(const std::vector<rat>& poly, std::string& out) {
    bool first = true;
    for (size_t n = 0; n < poly.size(); ++n) {
        if (poly[n] == 0) continue;
        if (!first) out += poly[n] < 0 ? " - " : " + ";
        else if (poly[n] < 0) out += "0 - ";
        first = false;
        rat a = boost::multiprecision::abs(poly[n]);
        if (n == 0) {
            out += a.str();
        } else {
            if (a != 1) { out += a.str(); out += " * "; }
            out += "z";
            for (size_t j = 1; j < n; ++j) out += " * z";
        }
    }
    if (first) out += "0";
}

inline void print_expr(const expr& e, int parent_level, std::string& out) {
    switch (e->kind) {
    case expr_kind::constant:
        if (e->value < 0) { // grammar has no unary minus; fold into a subtraction
            if (parent_level > 0) out += '(';
            rat a = boost::multiprecision::abs(e->value);
            out += "0 - " + a.str();
            if (parent_level > 0) out += ')';
        } else {
            out += e->value.str();
        }
        return;
    case expr_kind::atom: out += 'z'; return;
    case expr_kind::marker:
    case expr_kind::var: out += e->name; return;
    case expr_kind::sum: {
        if (parent_level > 0) out += '(';
        for (size_t i = 0; i < e->args.size(); ++i) {
            const expr& t = e->args[i];
            if (i == 0) {
                print_expr(t, 1, out);
            } else if (t->kind == expr_kind::neg) {
                out += " - ";
                print_expr(t->args[0], 1, out);
            } else {
                out += " + ";
                print_expr(t, 1, out);
            }
        }
        if (parent_level > 0) out += ')';
        return;
    }
    case expr_kind::prod: {
        if (parent_level > 1) out += '(';
        for (size_t i = 0; i < e->args.size(); ++i) {
            if (i) out += " * ";
            print_expr(e->args[i], 2, out);
        }
        if (parent_level > 1) out += ')';
        return;
    }
    case expr_kind::neg: // leading negation: rendered as 0 - x
        if (parent_level > 0) out += '(';
        out += "0 - ";
        print_expr(e->args[0], 1, out);
        if (parent_level > 0) out += ')';
        return;
    case expr_kind::exp_op: print_wrapped("Exp", e->args[0], out); return;
    case expr_kind::geom: print_wrapped("Geom", e->args[0], out); return;
    case expr_kind::pset: print_wrapped("PSet", e->args[0], out); return;
    case expr_kind::pset_tail: print_wrapped("PSetTail", e->args[0], out); return;
    case expr_kind::pset_even: print_wrapped("PSetEven", e->args[0], out); return;
    case expr_kind::pset_odd: print_wrapped("PSetOdd", e->args[0], out); return;
    case expr_kind::unroot_op: print_wrapped("Unroot", e->args[0], out); return;
    case expr_kind::set_ge:
        out += "SetGe(" + std::to_string(e->k) + ", ";
        print_expr(e->args[0], 0, out);
        out += ')';
        return;
    case expr_kind::pset_ge:
        out += "PSetGe(" + std::to_string(e->k) + ", ";
        print_expr(e->args[0], 0, out);
        out += ')';
        return;
    case expr_kind::subst:
        out += "Subst(";
        print_expr(e->args[0], 0, out);
        out += ", " + std::to_string(e->k) + ")";
        return;
    case expr_kind::frozen:
        out += "Frozen(";
        if (!e->args.empty()) print_expr(e->args[0], 0, out);
        else print_poly(e->poly, out);
        out += ')';
        return;
    }
}

} // namespace detail

inline std::string print(const expr& e) {
    std::string out;
    detail::print_expr(e, 0, out);
    return out;
}

inline std::string print(const class_spec& spec) {
    std::string out = "class " + spec.name + (spec.labelled ? " labelled" : " unlabelled") + " {\n";
    for (const auto& m : spec.markers) out += "    marker " + m + ";\n";
    for (const auto& [v, e] : spec.equations) out += "    " + v + " = " + print(e) + ";\n";
    if (!spec.exposed.empty()) {
        out += "    expose";
        for (const auto& x : spec.exposed) out += " " + x;
        out += ";\n";
    }
    out += "}\n";
    return out;
}

} // namespace subcrit
