#pragma once
// Scalar (big-float) evaluation of expression DAGs at a numeric point. Only
// plain analytic operations are admitted: Polya operators and plethysm slices
// must have been rewritten by tail freezing first, so that what remains is an
// expression in the system variables, the atom and frozen polynomials.

#include "subcrit/domain.hpp"
#include "subcrit/expr.hpp"

#include <map>
#include <stdexcept>
#include <string>
#include <unordered_map>

namespace subcrit {

// Evaluation left the analyticity domain (for now only the Geom pole); callers
// doing root-finding treat this as "no value here", not as a logic error.
struct scalar_domain_error : std::domain_error {
    using std::domain_error::domain_error;
};

struct scalar_env {
    std::map<std::string, bigfloat> vars;
    bigfloat z;
    std::map<std::string, bigfloat> markers;
};

// Converts at the current default big-float precision, unlike to_bigfloat
// which pins an explicit bit count.
inline bigfloat float_of(const rat& q) {
    bigfloat num(boost::multiprecision::numerator(q));
    bigfloat den(boost::multiprecision::denominator(q));
    return num / den;
}

// Memoizes per node, so shared subtrees across a system's equations and their
// symbolic derivatives are evaluated once per point.
class scalar_evaluator {
  public:
    explicit scalar_evaluator(const scalar_env& env) : env_(env) {}

    bigfloat eval(const expr& e) {
        auto it = memo_.find(e.get());
        if (it != memo_.end()) return it->second;
        bigfloat v = compute(e);
        memo_.emplace(e.get(), v);
        return v;
    }

  private:
    bigfloat compute(const expr& e) {
        switch (e->kind) {
        case expr_kind::constant: return float_of(e->value);
        case expr_kind::atom: return env_.z;
        case expr_kind::marker: {
            auto it = env_.markers.find(e->name);
            if (it == env_.markers.end())
                throw std::invalid_argument("scalar evaluation: unbound marker " + e->name);
            return it->second;
        }
        case expr_kind::var: {
            auto it = env_.vars.find(e->name);
            if (it == env_.vars.end())
                throw std::invalid_argument("scalar evaluation: unbound variable " + e->name);
            return it->second;
        }
        case expr_kind::sum: {
            bigfloat acc(0);
            for (const expr& a : e->args) acc += eval(a);
            return acc;
        }
        case expr_kind::prod: {
            bigfloat acc(1);
            for (const expr& a : e->args) acc *= eval(a);
            return acc;
        }
        case expr_kind::neg: return -eval(e->args[0]);
        case expr_kind::exp_op: return exp(eval(e->args[0]));
        case expr_kind::geom: {
            bigfloat x = eval(e->args[0]);
            if (x >= 1)
                throw scalar_domain_error("scalar evaluation: Geom argument reached its pole");
            return bigfloat(1) / (bigfloat(1) - x);
        }
        case expr_kind::set_ge: {
            // exp(x) minus the partial sum of components below the threshold.
            bigfloat x = eval(e->args[0]);
            bigfloat acc = exp(x);
            bigfloat term(1);
            for (unsigned j = 0; j < e->k; ++j) {
                acc -= term;
                term = term * x / bigfloat(j + 1);
            }
            return acc;
        }
        case expr_kind::frozen: {
            if (!e->args.empty()) return eval(e->args[0]);
            bigfloat acc(0);
            for (size_t n = e->poly.size(); n-- > 0;)
                acc = acc * env_.z + float_of(e->poly[n]);
            return acc;
        }
        case expr_kind::pset:
        case expr_kind::pset_tail:
        case expr_kind::pset_even:
        case expr_kind::pset_odd:
        case expr_kind::pset_ge:
        case expr_kind::subst:
        case expr_kind::unroot_op:
            throw std::invalid_argument(
                "scalar evaluation requires a tail-frozen expression (Polya operator or "
                "plethysm slice encountered)");
        }
        throw std::logic_error("unhandled expression kind");
    }

    const scalar_env& env_;
    std::unordered_map<const expr_node*, bigfloat> memo_;
};

inline bigfloat scalar_eval(const expr& e, const scalar_env& env) {
    scalar_evaluator ev(env);
    return ev.eval(e);
}

} // namespace subcrit
