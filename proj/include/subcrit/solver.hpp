#pragma once

#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "subcrit/diff.hpp"
#include "subcrit/eval.hpp"
#include "subcrit/expr.hpp"
#include "subcrit/series.hpp"

namespace subcrit {

struct solver_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A combinatorial system prepared for solving: the equations of a class_spec
// together with concrete values for its markers.
struct functional_system {
    class_spec spec;
    std::map<std::string, rat> marker_values;

    const std::vector<std::string>& vars() const { return names_; }

    static functional_system make(class_spec spec,
                                  std::map<std::string, rat> marker_values = {}) {
        functional_system sys;
        for (const auto& m : spec.markers)
            if (!marker_values.count(m))
                marker_values[m] = rat(1);
        for (const auto& [m, v] : marker_values)
            if (!spec.has_marker(m))
                throw std::invalid_argument("unknown marker: " + m);
        sys.spec = std::move(spec);
        sys.marker_values = std::move(marker_values);
        for (const auto& [name, rhs] : sys.spec.equations)
            sys.names_.push_back(name);
        return sys;
    }

private:
    std::vector<std::string> names_;
};

struct series_solution {
    std::map<std::string, qseries> values;
    unsigned order = 0;
    unsigned iterations = 0;
    bool stabilized = false;

    const qseries& at(const std::string& name) const {
        auto it = values.find(name);
        if (it == values.end()) throw std::invalid_argument("no such variable: " + name);
        return it->second;
    }
};

namespace detail {

inline eval_env<rat> solution_env(const functional_system& sys,
                                  const std::map<std::string, qseries>& vals) {
    eval_env<rat> env;
    env.vars = vals;
    for (const auto& [m, v] : sys.marker_values) env.markers[m] = v;
    return env;
}

} // namespace detail

// Solves y = F(y) by iteration from y = 0 over exact rationals, truncated at
// order N. Each equation must have zero constant term in the solution, which
// holds automatically for well-founded systems; the iteration stops as soon as
// two consecutive iterates agree, and fails if that does not happen within
// N + 2 rounds.
inline series_solution fixed_point(const functional_system& sys, unsigned N) {
    const coeff_domain dom = coeff_domain::exact();
    series_solution sol;
    sol.order = N;
    for (const auto& name : sys.vars())
        sol.values.emplace(name, qseries::zero(dom, N));

    for (unsigned iter = 0; iter < N + 2; ++iter) {
        std::map<std::string, qseries> prev = sol.values;
        // Gauss-Seidel sweep: later equations see the values already updated
        // in this round, so each sweep gains at least one coefficient.
        for (const auto& [name, rhs] : sys.spec.equations) {
            eval_env<rat> env = detail::solution_env(sys, sol.values);
            sol.values.at(name) = evaluate(rhs, env, dom, N);
        }
        ++sol.iterations;
        if (prev == sol.values) {
            sol.stabilized = true;
            return sol;
        }
    }
    throw solver_error("fixed point iteration did not stabilize within order + 2 rounds");
}

// Directed dependency graph on the system variables: edge i -> j when the
// right-hand side of y_j depends on y_i other than through plethysm slices
// of scale >= 2 (so exactly when dF_j/dy_i can be nonzero).
inline std::vector<std::vector<bool>> dependency_graph(const functional_system& sys) {
    const auto& vars = sys.vars();
    const size_t n = vars.size();
    std::vector<std::vector<bool>> adj(n, std::vector<bool>(n, false));
    for (size_t j = 0; j < n; ++j) {
        const expr& rhs = sys.spec.rhs(vars[j]);
        for (size_t i = 0; i < n; ++i)
            adj[i][j] = var_occurs(rhs, vars[i], false);
    }
    return adj;
}

// Whether the dependency graph is strongly connected (one mutually recursive
// block). Single-variable systems count as strongly recursive only when the
// variable depends on itself.
inline bool strongly_recursive(const functional_system& sys) {
    auto adj = dependency_graph(sys);
    const size_t n = adj.size();
    if (n == 0) return false;
    if (n == 1) return adj[0][0];
    auto reach = [&](bool forward) {
        std::vector<bool> seen(n, false);
        std::vector<size_t> stack = {0};
        seen[0] = true;
        while (!stack.empty()) {
            size_t u = stack.back();
            stack.pop_back();
            for (size_t v = 0; v < n; ++v) {
                bool edge = forward ? adj[u][v] : adj[v][u];
                if (edge && !seen[v]) {
                    seen[v] = true;
                    stack.push_back(v);
                }
            }
        }
        for (bool s : seen)
            if (!s) return false;
        return true;
    };
    return reach(true) && reach(false);
}

// How markers are treated when freezing a system.
enum class freeze_mode {
    literal,        // markers are replaced by their bound values
    variables_only, // markers stay symbolic; only series tails are frozen
};

namespace detail {

// True when the subtree contains an occurrence of a kept variable that feeds
// the scale-1 plethysm slice (so its value genuinely varies with the unknowns).
inline bool live_in(const expr& e, const std::set<std::string>& kept) {
    for (const auto& v : kept)
        if (var_occurs(e, v, false)) return true;
    return false;
}

class freezer {
public:
    freezer(const functional_system& sys, const series_solution& sol,
            std::set<std::string> kept, freeze_mode mode)
        : sys_(sys), kept_(std::move(kept)), mode_(mode),
          env_(solution_env(sys, sol.values)), N_(sol.order) {}

    expr freeze(const expr& e) {
        if (freezable(e)) return to_frozen(e);
        switch (e->kind) {
        case expr_kind::constant:
        case expr_kind::atom:
        case expr_kind::var:
            return e;
        case expr_kind::marker:
            if (mode_ == freeze_mode::literal)
                return ex_const(sys_.marker_values.at(e->name));
            return e;
        case expr_kind::pset:
            // PSet(g) = Exp(g) * exp(sum_{i>=2} g(z^i)/i); the second factor
            // is analytic below the branch point and freezes to a polynomial.
            return ex_prod({ex_exp(freeze(e->args[0])), tail_poly(e->args[0], false)});
        case expr_kind::pset_odd:
            return ex_prod({ex_exp(freeze(e->args[0])), tail_poly(e->args[0], true)});
        case expr_kind::pset_ge:
            return freeze(expand_pset_ge(e->k, e->args[0]));
        case expr_kind::frozen:
            return to_frozen(e);
        default: {
            std::vector<expr> args;
            args.reserve(e->args.size());
            for (const expr& a : e->args) args.push_back(freeze(a));
            return rebuild(e, std::move(args));
        }
        }
    }

private:
    bool freezable(const expr& e) const {
        if (live_in(e, kept_)) return false;
        // Only bother freezing subtrees that carry solved series or plethysm
        // structure; bare arithmetic over z stays symbolic. Markers inside a
        // frozen subtree are evaluated at their bound values; in
        // variables_only mode that discards the (analytically negligible)
        // marker dependence entering through plethysm slices of scale >= 2.
        return contains_kind(e, expr_kind::var) || contains_kind(e, expr_kind::subst) ||
               contains_kind(e, expr_kind::pset) || contains_kind(e, expr_kind::pset_tail) ||
               contains_kind(e, expr_kind::pset_even) || contains_kind(e, expr_kind::pset_odd) ||
               contains_kind(e, expr_kind::pset_ge) || contains_kind(e, expr_kind::frozen);
    }

    expr to_frozen(const expr& e) {
        qseries val = evaluate(e, env_, coeff_domain::exact(), N_);
        return ex_frozen_poly(val.coeffs());
    }

    expr tail_poly(const expr& arg, bool odd) {
        qseries g = evaluate(arg, env_, coeff_domain::exact(), N_);
        qseries t = odd ? polya_exp_odd_tail(g) : polya_exp_tail(g);
        return ex_frozen_poly(t.coeffs());
    }

    static expr rebuild(const expr& e, std::vector<expr> args) {
        switch (e->kind) {
        case expr_kind::sum: return ex_sum(std::move(args));
        case expr_kind::prod: return ex_prod(std::move(args));
        case expr_kind::neg: return ex_neg(args[0]);
        case expr_kind::exp_op: return ex_exp(args[0]);
        case expr_kind::geom: return ex_geom(args[0]);
        case expr_kind::set_ge: return ex_set_ge(e->k, args[0]);
        case expr_kind::subst: return ex_subst(args[0], e->k);
        case expr_kind::pset_tail: return ex_pset_tail(args[0]);
        case expr_kind::pset_even: return ex_pset_even(args[0]);
        case expr_kind::unroot_op: return ex_unroot(args[0]);
        default:
            throw std::logic_error("rebuild: unexpected node kind");
        }
    }

    const functional_system& sys_;
    std::set<std::string> kept_;
    freeze_mode mode_;
    eval_env<rat> env_;
    unsigned N_;
};

} // namespace detail

// Rewrites the system so that everything analytic below the branch point
// becomes an explicit polynomial:
//   - auxiliary variables whose equations touch the kept variables only
//     through plethysm slices of scale >= 2 are eliminated entirely (their
//     occurrences elsewhere freeze to polynomials of the solution),
//   - PSet / PSetOdd nodes over live arguments split into Exp(arg) times a
//     frozen tail factor,
//   - PSetTail, PSetEven, Subst(., k>=2) and Frozen(...) subtrees collapse to
//     frozen polynomials.
// The kept equations then involve the surviving variables only through plain
// analytic operations, so they can be evaluated and differentiated at scalar
// arguments. Marker handling follows `mode`.
inline functional_system freeze_tails(const functional_system& sys,
                                      const series_solution& sol,
                                      freeze_mode mode = freeze_mode::literal) {
    std::set<std::string> kept(sys.spec.exposed.begin(), sys.spec.exposed.end());
    if (kept.empty())
        kept.insert(sys.vars().begin(), sys.vars().end());

    // A variable whose equation reaches other variables only through plethysm
    // slices of scale >= 2, directly or via other such variables, is analytic
    // wherever the kept solution is finite: it is eliminated entirely and its
    // occurrences freeze to polynomials. Least fixpoint, so variables in a
    // cycle of live dependence, which can carry the branch point, stay out.
    std::set<std::string> analytic;
    bool grew = true;
    while (grew) {
        grew = false;
        for (const auto& name : sys.vars()) {
            if (analytic.count(name)) continue;
            bool all_shielded = true;
            for (const auto& w : sys.vars()) {
                if (analytic.count(w)) continue;
                if (var_occurs(sys.spec.rhs(name), w, false)) {
                    all_shielded = false;
                    break;
                }
            }
            if (all_shielded) {
                analytic.insert(name);
                grew = true;
            }
        }
    }

    // Keep what the exposed equations depend on through live occurrences,
    // transitively, skipping the analytic variables.
    bool changed = true;
    while (changed) {
        changed = false;
        for (const auto& name : sys.vars()) {
            if (kept.count(name) || analytic.count(name)) continue;
            for (const auto& k : kept) {
                if (var_occurs(sys.spec.rhs(k), name, false)) {
                    kept.insert(name);
                    changed = true;
                    break;
                }
            }
        }
    }

    detail::freezer fr(sys, sol, kept, mode);
    functional_system out;
    out.spec.name = sys.spec.name + "_frozen";
    out.spec.labelled = sys.spec.labelled;
    for (const auto& [name, rhs] : sys.spec.equations) {
        if (!kept.count(name)) continue;
        out.spec.equations.emplace_back(name, fr.freeze(rhs));
    }
    for (const auto& v : sys.spec.exposed)
        out.spec.exposed.push_back(v);
    if (mode == freeze_mode::variables_only) {
        out.spec.markers = sys.spec.markers;
        out.marker_values = sys.marker_values;
    }
    return functional_system::make(std::move(out.spec), std::move(out.marker_values));
}

} // namespace subcrit
