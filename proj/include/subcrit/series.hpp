#pragma once
// Truncated formal power series over an exchangeable coefficient domain.
// Values are immutable: every operation returns a fresh series. Output
// coefficient n depends only on input coefficients at indices <= n, so
// computing at order N and truncating to M equals computing at order M.

#include "subcrit/domain.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace subcrit {

template <class C> class series {
  public:
    series(coeff_domain dom, unsigned order)
        : dom_(dom), c_(order + 1, C(0)), combinatorial_(true) {
        check_domain_kind();
    }
    series(coeff_domain dom, std::vector<C> coeffs, bool combinatorial = false)
        : dom_(dom), c_(std::move(coeffs)), combinatorial_(combinatorial) {
        if (c_.empty()) throw std::invalid_argument("series needs at least the constant coefficient");
        check_domain_kind();
        for (C& x : c_) normalize_precision(x, dom_);
        if (combinatorial_) check_nonnegative();
    }

    static series zero(coeff_domain dom, unsigned order) { return series(dom, order); }
    static series constant(coeff_domain dom, const C& value, unsigned order) {
        series s(dom, order);
        s.c_[0] = value;
        normalize_precision(s.c_[0], dom);
        return s;
    }
    static series atom(coeff_domain dom, unsigned order) { // the series z
        series s(dom, order);
        if (order >= 1) s.c_[1] = C(1);
        s.combinatorial_ = true;
        return s;
    }

    const coeff_domain& domain() const { return dom_; }
    unsigned order() const { return static_cast<unsigned>(c_.size()) - 1; }
    const C& operator[](unsigned n) const { return c_.at(n); }
    const std::vector<C>& coeffs() const { return c_; }
    bool combinatorial() const { return combinatorial_; }
    series marked_combinatorial() const {
        series s = *this;
        s.check_nonnegative();
        s.combinatorial_ = true;
        return s;
    }

    bool is_zero() const {
        for (const C& x : c_)
            if (x != 0) return false;
        return true;
    }

    series truncated(unsigned m) const {
        if (m >= order()) return *this;
        series s(dom_, m);
        std::copy(c_.begin(), c_.begin() + m + 1, s.c_.begin());
        s.combinatorial_ = combinatorial_;
        return s;
    }

    bool operator==(const series& o) const { return dom_ == o.dom_ && c_ == o.c_; }

    std::string str() const {
        std::string out;
        for (unsigned n = 0; n <= order(); ++n) {
            if (c_[n] == 0) continue;
            if (!out.empty()) out += " + ";
            out += value_str(c_[n]) + "*z^" + std::to_string(n);
        }
        return out.empty() ? "0" : out;
    }

    friend series operator+(const series& a, const series& b) {
        a.check_same_domain(b);
        series s(a.dom_, std::min(a.order(), b.order()));
        for (unsigned n = 0; n <= s.order(); ++n) s.c_[n] = a.c_[n] + b.c_[n];
        s.combinatorial_ = a.combinatorial_ && b.combinatorial_;
        return s;
    }
    friend series operator-(const series& a, const series& b) {
        a.check_same_domain(b);
        series s(a.dom_, std::min(a.order(), b.order()));
        for (unsigned n = 0; n <= s.order(); ++n) s.c_[n] = a.c_[n] - b.c_[n];
        s.combinatorial_ = false;
        return s;
    }
    friend series operator-(const series& a) {
        series s(a.dom_, a.order());
        for (unsigned n = 0; n <= s.order(); ++n) s.c_[n] = -a.c_[n];
        s.combinatorial_ = false;
        return s;
    }
    friend series operator*(const series& a, const series& b) {
        a.check_same_domain(b);
        series s(a.dom_, std::min(a.order(), b.order()));
        for (unsigned i = 0; i <= s.order(); ++i) {
            if (a.c_[i] == 0) continue;
            for (unsigned j = 0; i + j <= s.order(); ++j) {
                if (b.c_[j] == 0) continue;
                s.c_[i + j] += a.c_[i] * b.c_[j];
            }
        }
        s.combinatorial_ = a.combinatorial_ && b.combinatorial_;
        return s;
    }
    friend series operator*(const C& k, const series& a) {
        series s(a.dom_, a.order());
        for (unsigned n = 0; n <= s.order(); ++n) s.c_[n] = k * a.c_[n];
        for (C& x : s.c_) normalize_precision(x, s.dom_);
        s.combinatorial_ = a.combinatorial_ && !(k < C(0));
        return s;
    }

    // Scalar evaluation at a point (used by diagnostics and tests only).
    template <class X> X eval_at(const X& x) const {
        X acc(0);
        for (unsigned n = order() + 1; n-- > 0;) acc = acc * x + X(c_[n]);
        return acc;
    }

  private:
    void check_domain_kind() const {
        if (domain_traits<C>::kind != dom_.kind)
            throw std::invalid_argument("coefficient type does not match domain kind");
    }
    void check_same_domain(const series& o) const {
        if (!(dom_ == o.dom_)) throw std::invalid_argument("series domain mismatch");
    }
    void check_nonnegative() const {
        if (dom_.is_exact())
            for (const C& x : c_)
                if (x < 0) throw std::domain_error("combinatorial series has a negative coefficient");
    }
    static std::string value_str(const rat& q) { return q.str(); }
    static std::string value_str(const bigfloat& x) { return x.str(12, std::ios_base::fmtflags(0)); }

    coeff_domain dom_;
    std::vector<C> c_;
    bool combinatorial_ = false;
};

template <class C> series<C> derivative(const series<C>& f) {
    const unsigned n_out = f.order() == 0 ? 0 : f.order() - 1;
    std::vector<C> c(n_out + 1, C(0));
    for (unsigned n = 1; n <= f.order(); ++n) c[n - 1] = C(n) * f[n];
    return series<C>(f.domain(), std::move(c));
}

// z*f'(z): vertex pointing.
template <class C> series<C> point(const series<C>& f) {
    std::vector<C> c(f.order() + 1, C(0));
    for (unsigned n = 1; n <= f.order(); ++n) c[n] = C(n) * f[n];
    return series<C>(f.domain(), std::move(c), f.combinatorial());
}

// Integral of f(t)/t from 0 to z: inverse of pointing. Requires f(0)=0.
template <class C> series<C> unroot(const series<C>& f) {
    if (f[0] != 0) throw std::domain_error("unroot requires zero constant term");
    std::vector<C> c(f.order() + 1, C(0));
    for (unsigned n = 1; n <= f.order(); ++n) c[n] = f[n] / C(n);
    return series<C>(f.domain(), std::move(c), f.combinatorial());
}

template <class C> series<C> exp(const series<C>& f) {
    if (f[0] != 0) throw std::domain_error("exp requires zero constant term");
    const unsigned N = f.order();
    std::vector<C> g(N + 1, C(0));
    g[0] = C(1);
    // (e^f)' = f' e^f gives n*g_n = sum_{k=1..n} k f_k g_{n-k}.
    for (unsigned n = 1; n <= N; ++n) {
        C acc(0);
        for (unsigned k = 1; k <= n; ++k)
            if (f[k] != 0) acc += C(k) * f[k] * g[n - k];
        g[n] = acc / C(n);
    }
    return series<C>(f.domain(), std::move(g), f.combinatorial());
}

template <class C> series<C> log(const series<C>& f) {
    if (f[0] != C(1)) throw std::domain_error("log requires constant term 1");
    const unsigned N = f.order();
    std::vector<C> h(N + 1, C(0));
    // f = e^h gives n*h_n = n f_n - sum_{k=1..n-1} k h_k f_{n-k}.
    for (unsigned n = 1; n <= N; ++n) {
        C acc = C(n) * f[n];
        for (unsigned k = 1; k < n; ++k)
            if (h[k] != 0 && f[n - k] != 0) acc -= C(k) * h[k] * f[n - k];
        h[n] = acc / C(n);
    }
    return series<C>(f.domain(), std::move(h));
}

// 1/(1-f) with f(0)=0.
template <class C> series<C> geom(const series<C>& f) {
    if (f[0] != 0) throw std::domain_error("geom requires zero constant term");
    const unsigned N = f.order();
    std::vector<C> g(N + 1, C(0));
    g[0] = C(1);
    for (unsigned n = 1; n <= N; ++n) {
        C acc(0);
        for (unsigned k = 1; k <= n; ++k)
            if (f[k] != 0) acc += f[k] * g[n - k];
        g[n] = acc;
    }
    return series<C>(f.domain(), std::move(g), f.combinatorial());
}

// f(z^k), truncated at the input order.
template <class C> series<C> plethysm_scale(const series<C>& f, unsigned k) {
    if (k == 0) throw std::invalid_argument("plethysm_scale requires k >= 1");
    if (k == 1) return f;
    const unsigned N = f.order();
    std::vector<C> g(N + 1, C(0));
    for (unsigned n = 0; n * k <= N; ++n) g[n * k] = f[n];
    return series<C>(f.domain(), std::move(g), f.combinatorial());
}

// Divide by z^k; the k lowest coefficients must vanish. Output order N-k.
template <class C> series<C> shift_down(const series<C>& f, unsigned k) {
    if (k == 0) return f;
    if (f.order() < k) throw std::domain_error("shift_down beyond order");
    for (unsigned n = 0; n < k; ++n)
        if (f[n] != 0) throw std::domain_error("shift_down on nonzero low coefficient");
    std::vector<C> g(f.order() - k + 1, C(0));
    for (unsigned n = k; n <= f.order(); ++n) g[n - k] = f[n];
    return series<C>(f.domain(), std::move(g), f.combinatorial());
}

template <class C> series<C> shift_up(const series<C>& f, unsigned k) { // multiply by z^k
    std::vector<C> g(f.order() + 1, C(0));
    for (unsigned n = k; n <= f.order(); ++n) g[n] = f[n - k];
    return series<C>(f.domain(), std::move(g), f.combinatorial());
}

// Sum of f(z^i)/i over a set of indices i, then exponentiated by the callers.
// start=1 gives the full multiset operator, start=2 its analytic tail.
template <class C>
series<C> plethysm_log_sum(const series<C>& f, unsigned start, unsigned step) {
    if (f[0] != 0) throw std::domain_error("Polya operators require zero constant term");
    const unsigned N = f.order();
    series<C> acc(f.domain(), N);
    // f has valuation >= 1, so the i-th term has valuation >= i: i > N contributes nothing.
    for (unsigned i = start; i <= N; i += step)
        acc = acc + (C(1) / C(i)) * plethysm_scale(f, i);
    return acc;
}

// exp(sum_{i>=1} f(z^i)/i): the unlabelled multiset (Set) operator.
template <class C> series<C> polya_exp(const series<C>& f) {
    return exp(plethysm_log_sum(f, 1, 1));
}
// exp(sum_{i>=2} f(z^i)/i), so polya_exp(f) = exp(f) * polya_exp_tail(f).
template <class C> series<C> polya_exp_tail(const series<C>& f) {
    return exp(plethysm_log_sum(f, 2, 1));
}
// exp(sum over even i>=2 of f(z^i)/i).
template <class C> series<C> polya_exp_even(const series<C>& f) {
    return exp(plethysm_log_sum(f, 2, 2));
}
// exp(sum over odd i>=1 of f(z^i)/i).
template <class C> series<C> polya_exp_odd(const series<C>& f) {
    return exp(plethysm_log_sum(f, 1, 2));
}
// exp(sum over odd i>=3 of f(z^i)/i), so polya_exp_odd(f) = exp(f) * this.
template <class C> series<C> polya_exp_odd_tail(const series<C>& f) {
    return exp(plethysm_log_sum(f, 3, 2));
}

// g(f(z)) with f(0)=0, by Horner.
template <class C> series<C> compose(const series<C>& g, const series<C>& f) {
    if (f[0] != 0) throw std::domain_error("compose requires inner constant term 0");
    const unsigned N = std::min(g.order(), f.order());
    series<C> acc = series<C>::constant(g.domain(), g[g.order()], N);
    for (unsigned n = g.order(); n-- > 0;) {
        acc = acc * f.truncated(N);
        acc = acc + series<C>::constant(g.domain(), g[n], N);
    }
    return acc;
}

using qseries = series<rat>;
using fseries = series<bigfloat>;

inline fseries to_float(const qseries& f, unsigned precision_bits) {
    coeff_domain dom = coeff_domain::floating(precision_bits);
    precision_guard guard(dom);
    std::vector<bigfloat> c;
    c.reserve(f.order() + 1);
    for (unsigned n = 0; n <= f.order(); ++n)
        c.push_back(domain_traits<bigfloat>::from_rat(f[n], dom));
    return fseries(dom, std::move(c), f.combinatorial());
}

} // namespace subcrit
