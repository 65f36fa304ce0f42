#pragma once
// Locating the square-root branch point (tau, rho) of a functional system
// y = F(y; z): Newton iteration on the bordered characteristic system
// { y - F(y; z) = 0, det(I - Jac_F(y; z)) = 0 }, truncation-refinement
// schedules, growth-constant and exponent estimation, and subcriticality
// diagnostics. Systems must be tail-frozen first so that every right-hand
// side is a plain analytic expression of the unknowns and z.

#include "subcrit/classes.hpp"
#include "subcrit/diff.hpp"
#include "subcrit/linalg.hpp"
#include "subcrit/scalar.hpp"
#include "subcrit/solver.hpp"

#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace subcrit {

struct char_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct singular_point {
    bigfloat rho;                        // branch-point abscissa
    std::map<std::string, bigfloat> tau; // component values y_i(rho)
    bigfloat residual;       // max(|y - F|, |det(I - Jac)|), doubled-precision
    bigfloat jac_perron;     // Perron root of |Jac| at the point
    bool jac_spectral_ok = false;
    unsigned N_used = 0;
    unsigned precision_bits = 0;
    unsigned iterations = 0;
};

struct char_init {
    std::map<std::string, bigfloat> tau;
    bigfloat z;
};

struct char_options {
    unsigned precision_bits = 256;
    unsigned max_iterations = 200;
    unsigned N_used = 0; // metadata copied into the result
};

namespace detail {

// Determinant of a symbolic matrix by cofactor expansion, pruning entries that
// are structurally zero; with the sparsity of block-decomposition Jacobians
// the expansion stays small even for half a dozen unknowns.
inline expr det_expand(const std::vector<std::vector<expr>>& m, const std::vector<size_t>& rows,
                       const std::vector<size_t>& cols) {
    const size_t n = rows.size();
    if (n == 0) return ex_const(1);
    if (n == 1) return m[rows[0]][cols[0]];
    size_t best = 0, best_nz = n + 1;
    for (size_t c = 0; c < n; ++c) {
        size_t nz = 0;
        for (size_t r = 0; r < n; ++r)
            if (!m[rows[r]][cols[c]]->is_const(0)) ++nz;
        if (nz < best_nz) {
            best_nz = nz;
            best = c;
        }
    }
    std::vector<expr> terms;
    for (size_t r = 0; r < n; ++r) {
        const expr& entry = m[rows[r]][cols[best]];
        if (entry->is_const(0)) continue;
        std::vector<size_t> sub_rows, sub_cols;
        for (size_t i = 0; i < n; ++i)
            if (i != r) sub_rows.push_back(rows[i]);
        for (size_t j = 0; j < n; ++j)
            if (j != best) sub_cols.push_back(cols[j]);
        expr minor = det_expand(m, sub_rows, sub_cols);
        if (minor->is_const(0)) continue;
        expr term = minor->is_const(1) ? entry : entry * minor;
        terms.push_back((r + best) % 2 ? ex_neg(term) : term);
    }
    return ex_sum(std::move(terms));
}

} // namespace detail

// The symbolic bordered system: right-hand sides, their Jacobian, the pruned
// determinant expression, and the gradient of all r+1 equations with respect
// to (y_1..y_r, z). Everything downstream evaluates these at numeric points.
struct char_system {
    std::vector<std::string> vars;
    std::vector<expr> rhs;
    std::vector<std::vector<expr>> jac; // dF_i/dy_j
    expr det_expr;                      // det(I - Jac)
    std::vector<expr> bordered;         // r equations y_i - F_i, then det_expr
    std::vector<std::vector<expr>> grad; // (r+1) x (r+1); last column is d/dz

    static char_system build(const functional_system& sys) {
        char_system cs;
        cs.vars = sys.vars();
        const size_t r = cs.vars.size();
        for (const auto& v : cs.vars) cs.rhs.push_back(sys.spec.rhs(v));
        cs.jac.assign(r, std::vector<expr>(r));
        std::vector<std::vector<expr>> m(r, std::vector<expr>(r));
        for (size_t i = 0; i < r; ++i) {
            for (size_t j = 0; j < r; ++j) {
                cs.jac[i][j] = d_var(cs.rhs[i], cs.vars[j]);
                const bool zero = cs.jac[i][j]->is_const(0);
                if (i == j) m[i][j] = zero ? ex_const(1) : ex_const(1) - cs.jac[i][j];
                else m[i][j] = zero ? ex_const(0) : ex_neg(cs.jac[i][j]);
            }
        }
        std::vector<size_t> idx(r);
        for (size_t i = 0; i < r; ++i) idx[i] = i;
        cs.det_expr = detail::det_expand(m, idx, idx);
        for (size_t i = 0; i < r; ++i) cs.bordered.push_back(ex_var(cs.vars[i]) - cs.rhs[i]);
        cs.bordered.push_back(cs.det_expr);
        cs.grad.assign(r + 1, std::vector<expr>(r + 1));
        for (size_t i = 0; i < r; ++i) {
            for (size_t j = 0; j < r; ++j) cs.grad[i][j] = m[i][j];
            expr dz = d_z(cs.rhs[i]);
            cs.grad[i][r] = dz->is_const(0) ? dz : ex_neg(dz);
        }
        for (size_t j = 0; j < r; ++j) cs.grad[r][j] = d_var(cs.det_expr, cs.vars[j]);
        cs.grad[r][r] = d_z(cs.det_expr);
        return cs;
    }
};

namespace detail {

inline scalar_env char_point_env(const functional_system& sys, const std::vector<std::string>& vars,
                                 const std::vector<bigfloat>& x) {
    scalar_env env;
    const size_t r = vars.size();
    for (size_t i = 0; i < r; ++i) env.vars[vars[i]] = x[i];
    env.z = x[r];
    for (const auto& [m, q] : sys.marker_values) env.markers[m] = float_of(q);
    return env;
}

// Evaluates the bordered equations; false when the point left the analytic
// domain or produced a non-finite value.
inline bool eval_bordered(const char_system& cs, const scalar_env& env, std::vector<bigfloat>& g,
                          bigfloat& norm) {
    try {
        scalar_evaluator ev(env);
        g.assign(cs.bordered.size(), bigfloat(0));
        norm = 0;
        for (size_t k = 0; k < cs.bordered.size(); ++k) {
            g[k] = ev.eval(cs.bordered[k]);
            if (!isfinite(g[k])) return false;
            if (abs(g[k]) > norm) norm = abs(g[k]);
        }
        return true;
    } catch (const scalar_domain_error&) {
        return false;
    }
}

// The convergence certificate recomputes |y - F| directly and the determinant
// through the numeric path (cofactor for small orders, LU above).
inline bigfloat certificate_residual(const char_system& cs, const functional_system& sys,
                                     const std::vector<bigfloat>& x) {
    const size_t r = cs.vars.size();
    scalar_env env = char_point_env(sys, cs.vars, x);
    scalar_evaluator ev(env);
    bigfloat norm(0);
    for (size_t i = 0; i < r; ++i) {
        bigfloat gi = abs(x[i] - ev.eval(cs.rhs[i]));
        if (gi > norm) norm = gi;
    }
    fmatrix a(r, std::vector<bigfloat>(r, bigfloat(0)));
    for (size_t i = 0; i < r; ++i) {
        for (size_t j = 0; j < r; ++j) {
            if (!cs.jac[i][j]->is_const(0)) a[i][j] = -ev.eval(cs.jac[i][j]);
            if (i == j) a[i][j] += 1;
        }
    }
    bigfloat d = abs(determinant(a));
    return d > norm ? d : norm;
}

// Seed for Newton: march z upward in steps of 0.01 running the value iteration
// y <- F(y; z) from zero; the last z where it still converges brackets the
// branch point of a positive system from below.
inline std::vector<bigfloat> coarse_scan(const functional_system& sys, const char_system& cs) {
    precision_guard guard(64);
    const size_t r = cs.vars.size();
    std::map<std::string, bigfloat> markers;
    for (const auto& [m, q] : sys.marker_values) markers[m] = float_of(q);
    std::vector<bigfloat> seed;
    bool have = false, stopped = false;
    for (unsigned step = 1; step <= 400 && !stopped; ++step) {
        bigfloat z = bigfloat(step) / 100;
        std::vector<bigfloat> y(r, bigfloat(0));
        bool ok = false;
        try {
            for (unsigned it = 0; it < 600; ++it) {
                scalar_env env;
                for (size_t i = 0; i < r; ++i) env.vars[cs.vars[i]] = y[i];
                env.z = z;
                env.markers = markers;
                scalar_evaluator ev(env);
                bigfloat change(0), scale(1);
                std::vector<bigfloat> next(r);
                for (size_t i = 0; i < r; ++i) {
                    next[i] = ev.eval(cs.rhs[i]);
                    bigfloat d = abs(next[i] - y[i]);
                    if (d > change) change = d;
                    if (abs(next[i]) > scale) scale = abs(next[i]);
                }
                y = std::move(next);
                if (!isfinite(scale)) break;
                if (change <= bigfloat("1e-10") * scale) {
                    ok = true;
                    break;
                }
            }
        } catch (const scalar_domain_error&) {
            ok = false;
        }
        if (ok) {
            seed = y;
            seed.push_back(z);
            have = true;
        } else {
            stopped = true;
        }
    }
    if (!have) throw char_error("characteristic solve: coarse scan found no convergent seed");
    if (!stopped)
        throw char_error("characteristic solve: coarse scan kept converging through z = 4; "
                         "no singularity bracketed");
    return seed;
}

} // namespace detail

// Damped Newton iteration on the bordered system. Converges to a residual of
// 10^(-precision_bits/4); the returned residual is re-verified in doubled
// precision and must stay below 2^(-precision_bits/2). Pure in its inputs, so
// independent solves may run concurrently.
inline singular_point char_solve(const functional_system& sys,
                                 std::optional<char_init> init = std::nullopt,
                                 const char_options& opt = {}) {
    precision_guard guard(opt.precision_bits);
    char_system cs = char_system::build(sys);
    const size_t r = cs.vars.size();

    std::vector<bigfloat> x;
    if (init) {
        x.reserve(r + 1);
        for (const auto& v : cs.vars) {
            auto it = init->tau.find(v);
            if (it == init->tau.end())
                throw std::invalid_argument("char_solve: initial guess misses variable " + v);
            x.push_back(it->second);
        }
        x.push_back(init->z);
    } else {
        x = detail::coarse_scan(sys, cs);
    }

    const bigfloat target = pow(bigfloat(10), -static_cast<int>(opt.precision_bits / 4));
    const bigfloat newton_tol = pow(bigfloat(2), -static_cast<int>(opt.precision_bits / 2));

    std::vector<bigfloat> g;
    bigfloat res;
    if (!detail::eval_bordered(cs, detail::char_point_env(sys, cs.vars, x), g, res))
        throw char_error("characteristic solve: initial point lies outside the analytic domain");

    unsigned iter = 0;
    while (res > target) {
        if (++iter > opt.max_iterations)
            throw char_error("characteristic solve: Newton divergence (iteration limit at "
                             "residual " + res.str(8, std::ios_base::scientific) + ")");
        scalar_env env = detail::char_point_env(sys, cs.vars, x);
        scalar_evaluator ev(env);
        fmatrix jmat(r + 1, std::vector<bigfloat>(r + 1));
        for (size_t k = 0; k <= r; ++k)
            for (size_t j = 0; j <= r; ++j) jmat[k][j] = ev.eval(cs.grad[k][j]);
        std::vector<bigfloat> minus_g(r + 1);
        for (size_t k = 0; k <= r; ++k) minus_g[k] = -g[k];
        std::vector<bigfloat> delta;
        try {
            delta = solve_linear(std::move(jmat), minus_g);
        } catch (const std::runtime_error&) {
            throw char_error("characteristic solve: Newton divergence (singular bordered "
                             "Jacobian)");
        }
        bigfloat t(1);
        bool accepted = false;
        for (unsigned halving = 0; halving <= 40; ++halving) {
            std::vector<bigfloat> xt(r + 1);
            for (size_t i = 0; i <= r; ++i) xt[i] = x[i] + t * delta[i];
            std::vector<bigfloat> gt;
            bigfloat rt;
            if (detail::eval_bordered(cs, detail::char_point_env(sys, cs.vars, xt), gt, rt) &&
                rt < res) {
                x = std::move(xt);
                g = std::move(gt);
                res = rt;
                accepted = true;
                break;
            }
            t /= 2;
        }
        if (!accepted)
            throw char_error("characteristic solve: Newton divergence (step damping exhausted "
                             "at residual " + res.str(8, std::ios_base::scientific) + ")");
    }

    for (size_t i = 0; i < r; ++i)
        if (!(x[i] > 0))
            throw char_error("characteristic solve: negative component at convergence (" +
                             cs.vars[i] + ")");
    if (!(x[r] > 0))
        throw char_error("characteristic solve: negative component at convergence (z)");

    singular_point pt;
    {
        precision_guard doubled(2 * opt.precision_bits);
        pt.residual = detail::certificate_residual(cs, sys, x);
    }
    if (!(pt.residual <= newton_tol))
        throw char_error("characteristic solve: Newton divergence (doubled-precision residual " +
                         pt.residual.str(8, std::ios_base::scientific) + " above tolerance)");
    {
        scalar_env env = detail::char_point_env(sys, cs.vars, x);
        scalar_evaluator ev(env);
        fmatrix a(r, std::vector<bigfloat>(r, bigfloat(0)));
        for (size_t i = 0; i < r; ++i)
            for (size_t j = 0; j < r; ++j)
                if (!cs.jac[i][j]->is_const(0)) a[i][j] = abs(ev.eval(cs.jac[i][j]));
        perron_result pr = perron_power(a, bigfloat("1e-6"));
        pt.jac_perron = pr.lambda;
        pt.jac_spectral_ok = pr.converged && pr.lambda <= bigfloat(1) + bigfloat("1e-4");
    }
    pt.rho = x[r];
    for (size_t i = 0; i < r; ++i) pt.tau[cs.vars[i]] = x[i];
    pt.N_used = opt.N_used;
    pt.precision_bits = opt.precision_bits;
    pt.iterations = iter;
    return pt;
}

struct fit_report {
    bigfloat c_estimate;         // last normalized constant a_N N^(-alpha) gamma^(-N)
    bigfloat fluctuation;        // max relative spread of the constants, final quarter
    bigfloat exponent_estimate;  // free regression of the subexponential exponent
    unsigned window_lo = 0;
    unsigned window_hi = 0;
};

// Empirical fit of a_n ~ c n^alpha gamma^n: normalized constants under the
// given exponent, plus a least-squares estimate of the free exponent from
// log a_n - n log gamma against log n over the upper half of the indices.
inline fit_report asymptotic_fit(const std::vector<bigfloat>& a, const bigfloat& gamma,
                                 const rat& alpha) {
    if (a.size() < 21)
        throw std::invalid_argument("asymptotic_fit: needs at least 20 coefficients");
    if (!(gamma > 0)) throw std::invalid_argument("asymptotic_fit: gamma must be positive");
    const unsigned N = static_cast<unsigned>(a.size()) - 1;
    const unsigned lo = N / 2;
    for (unsigned n = lo; n <= N; ++n)
        if (!(a[n] > 0))
            throw std::domain_error(
                "asymptotic_fit: coefficients must be positive on the fit window");
    const bigfloat lg = log(gamma);
    bigfloat sx(0), sy(0), sxx(0), sxy(0);
    const unsigned cnt = N - lo + 1;
    for (unsigned n = lo; n <= N; ++n) {
        bigfloat xn = log(bigfloat(n));
        bigfloat yn = log(a[n]) - bigfloat(n) * lg;
        sx += xn;
        sy += yn;
        sxx += xn * xn;
        sxy += xn * yn;
    }
    fit_report out;
    out.window_lo = lo;
    out.window_hi = N;
    out.exponent_estimate = (bigfloat(cnt) * sxy - sx * sy) / (bigfloat(cnt) * sxx - sx * sx);
    const bigfloat af = float_of(alpha);
    const unsigned quarter = N - N / 4;
    bigfloat cmin, cmax, clast;
    for (unsigned n = quarter; n <= N; ++n) {
        bigfloat c = a[n] * exp(-af * log(bigfloat(n))) * exp(-bigfloat(n) * lg);
        if (n == quarter) {
            cmin = cmax = c;
        } else {
            if (c < cmin) cmin = c;
            if (c > cmax) cmax = c;
        }
        clast = c;
    }
    out.c_estimate = clast;
    out.fluctuation = (cmax - cmin) / abs(clast);
    return out;
}

inline fit_report asymptotic_fit(const qseries& a, const bigfloat& gamma, const rat& alpha,
                                 unsigned precision_bits = 256) {
    precision_guard guard(precision_bits);
    std::vector<bigfloat> c;
    c.reserve(a.order() + 1);
    for (unsigned n = 0; n <= a.order(); ++n) c.push_back(float_of(a[n]));
    return asymptotic_fit(c, gamma, alpha);
}

// Cauchy-Hadamard cross-check: ratio of the two topmost adjacent nonzero
// coefficients, an estimate of the growth constant 1/rho.
inline bigfloat ratio_growth_estimate(const qseries& f, unsigned precision_bits = 256) {
    precision_guard guard(precision_bits);
    for (unsigned n = f.order(); n >= 1; --n) {
        if (f[n] != 0 && f[n - 1] != 0) {
            rat q = f[n] / f[n - 1];
            return float_of(q);
        }
    }
    throw std::invalid_argument(
        "ratio_growth_estimate: needs two adjacent nonzero top coefficients");
}

struct growth_row {
    unsigned N;
    bigfloat rho;
};

struct growth_report {
    std::vector<growth_row> rows;
    bigfloat final_gamma;
    bigfloat exponent_estimate; // quiet NaN when the top order is below 20
    singular_point final_point;
    series_solution final_solution;
};

// Truncation-refinement schedule: for each N, solve the series to order N,
// freeze the tails, and run the characteristic solve seeded with the previous
// row's solution. The seed chain makes the rows sequentially dependent.
// Each schedule entry N truncates the solution to its N leading Taylor
// coefficients (degrees 0 through N-1) before freezing the tails and locating
// the branch point, so successive rows show the truncation converging.
inline growth_report refine_schedule(const functional_system& sys,
                                     const std::vector<unsigned>& schedule,
                                     unsigned precision_bits = 256) {
    if (schedule.empty()) throw std::invalid_argument("refine_schedule: empty schedule");
    if (schedule.front() == 0)
        throw std::invalid_argument("refine_schedule: schedule entries must be positive");
    for (size_t i = 1; i < schedule.size(); ++i)
        if (schedule[i] <= schedule[i - 1])
            throw std::invalid_argument("refine_schedule: schedule must be increasing");

    growth_report rep;
    std::optional<char_init> seed;
    for (unsigned N : schedule) {
        series_solution sol = fixed_point(sys, N - 1);
        functional_system frozen = freeze_tails(sys, sol, freeze_mode::literal);
        char_options opt;
        opt.precision_bits = precision_bits;
        opt.N_used = N;
        singular_point pt;
        try {
            pt = char_solve(frozen, seed, opt);
        } catch (const char_error& e) {
            throw char_error("N=" + std::to_string(N) + ": " + e.what());
        }
        rep.rows.push_back({N, pt.rho});
        seed = char_init{pt.tau, pt.rho};
        rep.final_point = pt;
        if (N == schedule.back()) rep.final_solution = std::move(sol);
    }

    precision_guard guard(precision_bits);
    rep.final_gamma = bigfloat(1) / rep.final_point.rho;
    rep.exponent_estimate = std::numeric_limits<bigfloat>::quiet_NaN();
    if (schedule.back() >= 21) {
        const std::string& head =
            sys.spec.exposed.empty() ? sys.vars().front() : sys.spec.exposed.front();
        try {
            fit_report fit = asymptotic_fit(rep.final_solution.at(head), rep.final_gamma,
                                            rat(-3, 2), precision_bits);
            rep.exponent_estimate = fit.exponent_estimate;
        } catch (const std::exception&) {
            // advisory field; leave NaN when the head series does not fit
        }
    }
    return rep;
}

inline growth_report refine_schedule(graph_class cls, bool labelled,
                                     const std::vector<unsigned>& schedule,
                                     unsigned precision_bits = 256, sp_variant var = {}) {
    return refine_schedule(functional_system::make(builtin(cls, labelled, var)), schedule,
                           precision_bits);
}

namespace detail {

inline expr find_pset_argument(const expr& e) {
    if (!e) return nullptr;
    if (e->kind == expr_kind::pset) return e->args[0];
    for (const expr& a : e->args) {
        expr found = find_pset_argument(a);
        if (found) return found;
    }
    return nullptr;
}

} // namespace detail

struct subcriticality_report {
    bool labelled = true;
    bool subcritical = false;
    bigfloat eta;               // radius estimate of the block series in the class variable
    bool eta_is_lower_bound = false; // probe hit its cap without finding a branch
    bigfloat class_value;       // class series value at rho
    bigfloat eta_margin;        // eta - class_value
    bigfloat rho;
    bool rho_in_unit = true;    // unlabelled only: rho in (0, 1)
    bigfloat tail_radius;       // unlabelled only: radius of the plethysm tail exponent
    bigfloat tail_margin;       // tail_radius - rho
};

// Advisory diagnostic. Labelled: the block radius eta comes from B'(y)
// coefficient ratios and subcriticality means C(rho) < eta. Unlabelled: rho
// must lie in (0,1), the tail exponent sum_{i>=2} h(z^i)/i must have radius
// beyond rho, and the frozen block structure must stay convergent for class
// values above f(rho), probed by climbing until the auxiliary iteration
// diverges. Never throws; inconclusive probes leave margins at zero or NaN.
inline subcriticality_report subcriticality_check(graph_class cls, bool labelled,
                                                  const series_solution& sol,
                                                  const singular_point& pt, sp_variant var = {}) {
    precision_guard guard(128);
    subcriticality_report rep;
    rep.labelled = labelled;
    rep.rho = pt.rho;
    const std::string class_var = labelled ? "C" : "f";
    rep.class_value = pt.tau.at(class_var);
    const bigfloat inf = std::numeric_limits<bigfloat>::infinity();
    const bigfloat nan = std::numeric_limits<bigfloat>::quiet_NaN();
    rep.tail_radius = nan;
    rep.tail_margin = nan;

    if (labelled) {
        const unsigned M = 72;
        bprime_forms forms = bprime(cls, var);
        class_spec probe;
        probe.name = "block_radius_probe";
        probe.labelled = true;
        probe.equations.emplace_back("y", ex_atom());
        for (auto& eq : forms.aux) probe.equations.push_back(eq);
        validate(probe);
        functional_system psys = functional_system::make(std::move(probe));
        series_solution ps = fixed_point(psys, M);
        eval_env<rat> env = detail::solution_env(psys, ps.values);
        qseries b = evaluate(forms.unmarked, env, coeff_domain::exact(), M);
        unsigned top = 0;
        for (unsigned n = M; n >= 1; --n) {
            if (b[n] != 0) {
                top = n;
                break;
            }
        }
        if (top == 0 || top + 4 < M) {
            rep.eta = inf; // the block series is a polynomial in y
        } else if (b[top - 1] != 0) {
            rat q = b[top - 1] / b[top];
            rep.eta = float_of(q);
        } else {
            rep.eta = pow(float_of(b[top]), bigfloat(-1) / bigfloat(top));
        }
        rep.eta_margin = rep.eta - rep.class_value;
        rep.subcritical = rep.class_value < rep.eta;
        return rep;
    }

    rep.rho_in_unit = pt.rho > 0 && pt.rho < 1;
    class_spec spec = builtin(cls, false, var);
    functional_system sys = functional_system::make(spec);

    expr harg = detail::find_pset_argument(spec.rhs("f"));
    if (harg) {
        eval_env<rat> env = detail::solution_env(sys, sol.values);
        qseries h = evaluate(harg, env, coeff_domain::exact(), sol.order);
        qseries tail_log = plethysm_log_sum(h, 2, 1);
        // even indices carry the dominant i = 2 slice; use the root form there
        for (unsigned n = tail_log.order() - tail_log.order() % 2; n >= 2; n -= 2) {
            if (tail_log[n] != 0) {
                rep.tail_radius = pow(float_of(tail_log[n]), bigfloat(-1) / bigfloat(n));
                break;
            }
        }
        rep.tail_margin = rep.tail_radius - rep.rho;
    }

    functional_system frozen = freeze_tails(sys, sol, freeze_mode::literal);
    {
        precision_guard scan_guard(64);
        const bigfloat zrho = pt.rho;
        std::vector<std::string> aux;
        for (const auto& v : frozen.vars())
            if (v != class_var) aux.push_back(v);
        auto iterate = [&](const bigfloat& yv, std::map<std::string, bigfloat>& vals) -> bool {
            try {
                for (unsigned it = 0; it < 400; ++it) {
                    scalar_env env;
                    env.vars = vals;
                    env.vars[class_var] = yv;
                    env.z = zrho;
                    scalar_evaluator ev(env);
                    bigfloat change(0), scale(1);
                    std::map<std::string, bigfloat> next = vals;
                    for (const auto& v : aux) {
                        bigfloat nv = ev.eval(frozen.spec.rhs(v));
                        bigfloat d = abs(nv - vals.at(v));
                        if (d > change) change = d;
                        if (abs(nv) > scale) scale = abs(nv);
                        next[v] = nv;
                    }
                    vals = std::move(next);
                    if (!isfinite(scale)) return false;
                    if (change <= bigfloat("1e-10") * scale) {
                        scalar_env probe_env;
                        probe_env.vars = vals;
                        probe_env.vars[class_var] = yv;
                        probe_env.z = zrho;
                        scalar_eval(frozen.spec.rhs(class_var), probe_env); // pole probe
                        return true;
                    }
                }
                return false;
            } catch (const scalar_domain_error&) {
                return false;
            }
        };
        std::map<std::string, bigfloat> vals;
        for (const auto& v : aux) vals[v] = pt.tau.at(v);
        bigfloat y = rep.class_value;
        bigfloat cap = 16 * y;
        if (cap < 8) cap = 8;
        rep.eta = rep.class_value;
        if (iterate(y, vals)) {
            while (y < cap) {
                bigfloat step = y / 8;
                if (step < bigfloat("0.02")) step = bigfloat("0.02");
                bigfloat ytry = y + step;
                if (ytry > cap) ytry = cap;
                std::map<std::string, bigfloat> trial = vals;
                if (iterate(ytry, trial)) {
                    y = ytry;
                    vals = std::move(trial);
                    if (y >= cap) {
                        rep.eta = cap;
                        rep.eta_is_lower_bound = true;
                    }
                } else {
                    bigfloat lo = y, hi = ytry;
                    for (unsigned round = 0; round < 45; ++round) {
                        bigfloat mid = (lo + hi) / 2;
                        std::map<std::string, bigfloat> mid_vals = vals;
                        if (iterate(mid, mid_vals)) {
                            lo = mid;
                            vals = std::move(mid_vals);
                        } else {
                            hi = mid;
                        }
                    }
                    rep.eta = (lo + hi) / 2;
                    break;
                }
            }
        }
        rep.eta_margin = rep.eta - rep.class_value;
    }
    rep.subcritical = rep.rho_in_unit && rep.eta_margin > 0 &&
                      !(rep.tail_margin <= 0); // NaN tail margin stays advisory-true
    return rep;
}

} // namespace subcrit
