#pragma once
// Series evaluation of expression DAGs. Evaluation carries a plethysm scale s:
// a subtree under Subst(., k) is evaluated with scale s*k, which maps the atom
// to z^(sk), marker scalars to their (sk)-th powers, and solution variables to
// their plethysm-scaled series. All constructions commute with plethysm, so
// the scale can be pushed to the leaves.

#include "subcrit/expr.hpp"
#include "subcrit/series.hpp"

#include <map>
#include <string>
#include <utility>

namespace subcrit {

template <class C> struct eval_env {
    std::map<std::string, series<C>> vars;
    std::map<std::string, C> markers;
};

namespace detail {

template <class C> class evaluator {
  public:
    evaluator(const eval_env<C>& env, coeff_domain dom, unsigned N)
        : env_(env), dom_(dom), N_(N) {}

    series<C> eval(const expr& e, unsigned scale) {
        auto key = std::make_pair(e.get(), scale);
        auto it = cache_.find(key);
        if (it != cache_.end()) return it->second;
        series<C> out = compute(e, scale);
        cache_.emplace(key, out);
        return out;
    }

  private:
    series<C> compute(const expr& e, unsigned scale) {
        switch (e->kind) {
        case expr_kind::constant:
            return series<C>::constant(dom_, domain_traits<C>::from_rat(e->value, dom_), N_);
        case expr_kind::atom: {
            series<C> s(dom_, N_);
            if (scale <= N_) return shift_up(series<C>::atom(dom_, N_), scale - 1);
            return s;
        }
        case expr_kind::marker: {
            auto it = env_.markers.find(e->name);
            if (it == env_.markers.end()) throw std::invalid_argument("unbound marker " + e->name);
            C v(1);
            for (unsigned i = 0; i < scale; ++i) v = v * it->second;
            normalize_precision(v, dom_);
            return series<C>::constant(dom_, v, N_);
        }
        case expr_kind::var: {
            auto it = env_.vars.find(e->name);
            if (it == env_.vars.end()) throw std::invalid_argument("unbound variable " + e->name);
            return plethysm_scale(it->second.truncated(N_), scale);
        }
        case expr_kind::sum: {
            series<C> acc(dom_, N_);
            for (const expr& a : e->args) acc = acc + eval(a, scale);
            return acc;
        }
        case expr_kind::prod: {
            series<C> acc = series<C>::constant(dom_, C(1), N_);
            for (const expr& a : e->args) acc = acc * eval(a, scale);
            return acc;
        }
        case expr_kind::neg: return -eval(e->args[0], scale);
        case expr_kind::exp_op: return exp(eval(e->args[0], scale));
        case expr_kind::geom: return geom(eval(e->args[0], scale));
        case expr_kind::set_ge: {
            series<C> x = eval(e->args[0], scale);
            if (x[0] != 0) throw std::domain_error("SetGe argument has nonzero constant term");
            series<C> out = exp(x);
            series<C> pow = series<C>::constant(dom_, C(1), N_);
            C fact(1);
            for (unsigned j = 0; j < e->k; ++j) {
                if (j > 0) { pow = pow * x; fact = fact * C(j); }
                out = out - (C(1) / fact) * pow;
            }
            return out;
        }
        case expr_kind::pset: return exp(plethysm_sum(e->args[0], scale, 1, 1));
        case expr_kind::pset_tail: return exp(plethysm_sum(e->args[0], scale, 2, 1));
        case expr_kind::pset_even: return exp(plethysm_sum(e->args[0], scale, 2, 2));
        case expr_kind::pset_odd: return exp(plethysm_sum(e->args[0], scale, 1, 2));
        case expr_kind::pset_ge: {
            // Multisets with >= k components: full PSet minus the exactly-j
            // layers for j < k. The exactly-j layer is the complete homogeneous
            // h_j of the plethysms p_i = e(z^i): h_j = (1/j) sum p_i h_{j-i}.
            series<C> out = exp(plethysm_sum(e->args[0], scale, 1, 1));
            std::vector<series<C>> h;
            h.push_back(series<C>::constant(dom_, C(1), N_));
            for (unsigned j = 1; j < e->k; ++j) {
                series<C> acc(dom_, N_);
                for (unsigned i = 1; i <= j; ++i)
                    acc = acc + eval_subst(e->args[0], scale, i) * h[j - i];
                h.push_back((C(1) / C(j)) * acc);
            }
            for (unsigned j = 0; j < e->k; ++j) out = out - h[j];
            return out;
        }
        case expr_kind::subst: return eval(e->args[0], scale * e->k);
        case expr_kind::unroot_op:
            // (unroot e)(z^s) has coefficient e_n/n at index ns, while
            // unroot(e(z^s)) divides by ns: compensate with the factor s.
            return C(scale) * unroot(eval(e->args[0], scale));
        case expr_kind::frozen: {
            if (!e->args.empty()) return eval(e->args[0], scale); // transparent wrapper
            std::vector<C> c(N_ + 1, C(0));
            for (size_t n = 0; n < e->poly.size() && n <= N_; ++n)
                c[n] = domain_traits<C>::from_rat(e->poly[n], dom_);
            return plethysm_scale(series<C>(dom_, std::move(c)), scale);
        }
        }
        throw std::logic_error("unhandled expression kind");
    }

    series<C> eval_subst(const expr& arg, unsigned scale, unsigned i) {
        if (scale > N_ || i > N_ / scale) // valuation >= scale*i exceeds the order
            return series<C>(dom_, N_);
        return eval(arg, scale * i);
    }

    series<C> plethysm_sum(const expr& arg, unsigned scale, unsigned start, unsigned step) {
        series<C> first = eval_subst(arg, scale, 1);
        if (first[0] != 0)
            throw std::domain_error("Polya operator argument has nonzero constant term");
        series<C> acc(dom_, N_);
        for (unsigned i = start; i * scale <= N_; i += step)
            acc = acc + (C(1) / C(i)) * eval_subst(arg, scale, i);
        return acc;
    }

    const eval_env<C>& env_;
    coeff_domain dom_;
    unsigned N_;
    std::map<std::pair<const expr_node*, unsigned>, series<C>> cache_;
};

} // namespace detail

template <class C>
series<C> evaluate(const expr& e, const eval_env<C>& env, coeff_domain dom, unsigned N) {
    detail::evaluator<C> ev(env, dom, N);
    return ev.eval(e, 1);
}

} // namespace subcrit
