#include "subcrit/diff.hpp"
#include "subcrit/eval.hpp"
#include "subcrit/parse.hpp"
#include "subcrit/printer.hpp"
#include "subcrit/solver.hpp"
#include "testutil.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <string>
#include <vector>

using namespace subcrit;
using testutil::random_series;

namespace {

const coeff_domain EX = coeff_domain::exact();

qseries eval_at(const expr& e, const eval_env<rat>& env, unsigned N) {
    return evaluate(e, env, EX, N);
}

} // namespace

TEST_CASE("parser builds the expected structure") {
    auto spec = parse_spec("class trees labelled { C = z * Exp(C); expose C; }");
    REQUIRE(spec.name == "trees");
    REQUIRE(spec.labelled);
    REQUIRE(spec.equations.size() == 1);
    REQUIRE(spec.exposed == std::vector<std::string>{"C"});
    const expr& rhs = spec.rhs("C");
    REQUIRE(rhs->kind == expr_kind::prod);
    REQUIRE(rhs->args[0]->kind == expr_kind::atom);
    REQUIRE(rhs->args[1]->kind == expr_kind::exp_op);
    REQUIRE(rhs->args[1]->args[0]->kind == expr_kind::var);
}

TEST_CASE("print then parse is the identity") {
    std::vector<std::string> sources = {
        "class trees labelled { C = z * Exp(C); expose C; }\n",
        "class utrees unlabelled { y = z * PSet(y); expose y; }\n",
        "class marked labelled {\n"
        "    marker u;\n"
        "    C = z * Exp(u * C);\n"
        "    D = C * C - 1/2 * C + SetGe(3, C);\n"
        "    expose C D;\n"
        "}\n",
        "class mixed unlabelled {\n"
        "    f = z * PSet(h);\n"
        "    h = f + 1/2 * f * f * Geom(f) + (1 + f) * Subst(f, 2) * Geom(Subst(f, 2));\n"
        "    g = PSetTail(f) + PSetEven(f) + PSetOdd(f) - PSetGe(2, f);\n"
        "    expose f;\n"
        "}\n",
        "class froz unlabelled { y = z * Exp(y) * Frozen(1 + 1/2 * z * z); expose y; }\n",
    };
    for (const auto& src : sources) {
        class_spec a = parse_spec(src);
        std::string printed = print(a);
        class_spec b = parse_spec(printed);
        REQUIRE(print(b) == printed);
        REQUIRE(a.equations.size() == b.equations.size());
        for (size_t i = 0; i < a.equations.size(); ++i) {
            REQUIRE(a.equations[i].first == b.equations[i].first);
            REQUIRE(expr_equal(a.equations[i].second, b.equations[i].second));
        }
    }
}

TEST_CASE("printed frozen polynomials evaluate identically after reparsing") {
    expr f = ex_frozen_poly({rat(1), rat(0), rat(1, 2), rat(-1, 3)});
    class_spec spec;
    spec.name = "t";
    spec.labelled = false;
    spec.equations.emplace_back("y", ex_atom() * f);
    spec.exposed.push_back("y");
    class_spec round = parse_spec(print(spec));
    eval_env<rat> env;
    env.vars.emplace("y", qseries::zero(EX, 8));
    REQUIRE(eval_at(spec.rhs("y"), env, 8) == eval_at(round.rhs("y"), env, 8));
}

TEST_CASE("parse errors report cause and position") {
    auto parse_fails = [](const std::string& src, const std::string& needle) {
        try {
            parse_spec(src);
            FAIL("expected a parse error for: " << src);
        } catch (const parse_error& e) {
            REQUIRE(std::string(e.what()).find(needle) != std::string::npos);
        }
    };
    parse_fails("class a unlabelled { y = z * Exp(y); expose y; }", "Exp");
    parse_fails("class a labelled { y = z * PSet(y); expose y; }", "PSet");
    parse_fails("class a labelled { y = z * Subst(y, 2); expose y; }", "Subst");
    parse_fails("class a labelled { y = Wat(z); expose y; }", "unknown function");
    parse_fails("class a labelled { y = z * w; expose y; }", "undefined variable");
    parse_fails("class a labelled { y = z; y = z; expose y; }", "redefinition");
    parse_fails("class a labelled { z = z; }", "must not be named z");
    parse_fails("class a unlabelled { y = Subst(y, 0); expose y; }", "Subst scale");
    parse_fails("class a labelled { y = z  expose y; }", "expected");
    parse_fails("class a labelled { y = z; expose w; }", "exposed variable");
    parse_fails("class a labelled { marker u; u = z; expose u; }", "collides");
    parse_fails("", "at least one class");
}

TEST_CASE("labelled constructors evaluate to their closed forms") {
    const unsigned N = 10;
    eval_env<rat> env;
    env.vars.emplace("C", qseries::atom(EX, N));
    env.markers.emplace("v", rat(3));

    auto z = qseries::atom(EX, N);
    REQUIRE(eval_at(ex_exp(ex_var("C")), env, N) == exp(z));
    REQUIRE(eval_at(ex_geom(ex_var("C")), env, N) == geom(z));

    auto one = qseries::constant(EX, 1, N);
    REQUIRE(eval_at(ex_set_ge(2, ex_var("C")), env, N) == exp(z) - one - z);
    REQUIRE(eval_at(ex_set_ge(0, ex_var("C")), env, N) == exp(z));

    auto vz = eval_at(ex_marker("v") * ex_atom(), env, N);
    REQUIRE(vz == rat(3) * z);
}

TEST_CASE("unlabelled constructors evaluate to Polya closed forms") {
    const unsigned N = 10;
    eval_env<rat> env;
    auto z = qseries::atom(EX, N);
    env.vars.emplace("C", z);

    // PSet(z) = 1/(1-z)
    REQUIRE(eval_at(ex_pset(ex_var("C")), env, N) == geom(z));

    // partitions into parts of size 1 and 2: floor(n/2)+1 of each n
    eval_env<rat> env2;
    env2.vars.emplace("C", z + z * z);
    auto parts = eval_at(ex_pset(ex_var("C")), env2, N);
    for (unsigned n = 0; n <= N; ++n) REQUIRE(parts[n] == rat(n / 2 + 1));

    // even/odd split multiplies back to the full operator
    std::mt19937_64 rng(42);
    for (int trial = 0; trial < 20; ++trial) {
        qseries f = random_series(rng, N, true, true);
        eval_env<rat> enr;
        enr.vars.emplace("C", f);
        auto whole = eval_at(ex_pset(ex_var("C")), enr, N);
        auto even = eval_at(ex_pset_even(ex_var("C")), enr, N);
        auto odd = eval_at(ex_pset_odd(ex_var("C")), enr, N);
        REQUIRE(whole == even * odd);
        auto tail = eval_at(ex_pset_tail(ex_var("C")), enr, N);
        REQUIRE(whole == exp(f) * tail);
    }
}

TEST_CASE("multiset thresholds match their expansion into full operators") {
    const unsigned N = 9;
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        qseries f = random_series(rng, N, true, true);
        eval_env<rat> env;
        env.vars.emplace("C", f);
        for (unsigned k = 0; k <= 4; ++k) {
            expr node = ex_pset_ge(k, ex_var("C"));
            REQUIRE(eval_at(node, env, N) == eval_at(expand_pset_ge(k, ex_var("C")), env, N));
        }
        // PSetGe(0, f) is the plain multiset construction
        REQUIRE(eval_at(ex_pset_ge(0, ex_var("C")), env, N) == polya_exp(f));
        // PSetGe(1, f) = PSet(f) - 1
        auto one = qseries::constant(EX, 1, N);
        REQUIRE(eval_at(ex_pset_ge(1, ex_var("C")), env, N) == polya_exp(f) - one);
    }
}

TEST_CASE("plethysm substitution rescales atoms, markers, and variables") {
    const unsigned N = 8;
    eval_env<rat> env;
    auto z = qseries::atom(EX, N);
    qseries f = z + rat(2) * z * z;
    env.vars.emplace("C", f);
    env.markers.emplace("v", rat(3));

    // Subst(v * z, 2) evaluates to v^2 z^2
    auto got = eval_at(ex_subst(ex_marker("v") * ex_atom(), 2), env, N);
    REQUIRE(got == rat(9) * shift_up(z, 1));

    // Subst(C, 3) is the series plethysm f(z^3)
    REQUIRE(eval_at(ex_subst(ex_var("C"), 3), env, N) == plethysm_scale(f, 3));

    // nested scaling composes multiplicatively
    auto nested = ex_subst(ex_subst(ex_var("C"), 2), 3);
    REQUIRE(eval_at(nested, env, N) == plethysm_scale(f, 6));
}

TEST_CASE("unrooting inside the grammar matches the series integral") {
    const unsigned N = 10;
    std::mt19937_64 rng(11);
    qseries f = random_series(rng, N);
    eval_env<rat> env;
    env.vars.emplace("C", f);
    REQUIRE(eval_at(ex_unroot(ex_var("C")), env, N) == unroot(f));
    // Unroot commutes with plethysm scaling through the compensating factor
    REQUIRE(eval_at(ex_subst(ex_unroot(ex_var("C")), 2), env, N) ==
            plethysm_scale(unroot(f), 2));
}

TEST_CASE("fixed point solves the labelled tree equation") {
    auto sys = functional_system::make(parse_spec("class t labelled { C = z * Exp(C); expose C; }"));
    auto sol = fixed_point(sys, 8);
    REQUIRE(sol.stabilized);
    REQUIRE(sol.iterations <= 10);
    const auto& C = sol.at("C");
    // n^(n-1)/n! labelled rooted trees
    for (unsigned n = 1; n <= 8; ++n) {
        bigint num = 1;
        for (unsigned i = 1; i < n; ++i) num *= n;
        REQUIRE(C[n] == rat(num, factorial(n)));
    }
    REQUIRE(C.combinatorial());
}

TEST_CASE("fixed point solves the unlabelled tree equation") {
    auto sys = functional_system::make(parse_spec("class t unlabelled { y = z * PSet(y); expose y; }"));
    auto sol = fixed_point(sys, 8);
    REQUIRE(sol.stabilized);
    std::vector<long> expected = {0, 1, 1, 2, 4, 9, 20, 48, 115};
    for (unsigned n = 0; n <= 8; ++n) REQUIRE(sol.at("y")[n] == rat(expected[n]));
}

TEST_CASE("fixed point solves the unlabelled cactus system") {
    const char* src =
        "class cacti unlabelled {\n"
        "    f = z * PSet(h);\n"
        "    h = f + 1/2 * f * f * Geom(f)\n"
        "      + 1/2 * (1 + f) * Subst(f, 2) * Geom(Subst(f, 2));\n"
        "    expose f;\n"
        "}\n";
    auto sol = fixed_point(functional_system::make(parse_spec(src)), 4);
    std::vector<long> expected = {0, 1, 1, 3, 8};
    for (unsigned n = 0; n <= 4; ++n) REQUIRE(sol.at("f")[n] == rat(expected[n]));
}

TEST_CASE("marker weights count edges in labelled trees") {
    auto spec = parse_spec("class t labelled { marker u; C = z * Exp(u * C); expose C; }");
    auto sys = functional_system::make(spec, {{"u", rat(2)}});
    auto sol = fixed_point(sys, 5);
    // every rooted tree on n vertices has n-1 edges, so coefficients pick up 2^(n-1)
    for (unsigned n = 1; n <= 5; ++n) {
        bigint num = 1;
        for (unsigned i = 1; i < n; ++i) num *= 2 * n;
        REQUIRE(sol.at("C")[n] == rat(num, factorial(n)));
    }
}

TEST_CASE("fixed point rejects ill-founded systems") {
    auto sys = functional_system::make(parse_spec("class bad labelled { C = C + z; expose C; }"));
    REQUIRE_THROWS_AS(fixed_point(sys, 6), solver_error);
}

TEST_CASE("dependency graph reflects live occurrences only") {
    const char* src =
        "class d unlabelled {\n"
        "    a = z * PSet(a + b);\n"
        "    b = Subst(a, 2) * Geom(Subst(a, 2));\n"
        "    expose a;\n"
        "}\n";
    auto sys = functional_system::make(parse_spec(src));
    auto adj = dependency_graph(sys);
    REQUIRE(adj[0][0]); // a depends on a
    REQUIRE(adj[1][0]); // a depends on b
    REQUIRE_FALSE(adj[0][1]); // b sees a only through Subst
    REQUIRE_FALSE(adj[1][1]);
    REQUIRE_FALSE(strongly_recursive(sys));

    auto trees = functional_system::make(parse_spec("class t labelled { C = z * Exp(C); expose C; }"));
    REQUIRE(strongly_recursive(trees));

    const char* two =
        "class o labelled {\n"
        "    C = z * Exp(C + 1/2 * T);\n"
        "    T = (T + C) * (T + C) * Geom(C + T);\n"
        "    expose C;\n"
        "}\n";
    REQUIRE(strongly_recursive(functional_system::make(parse_spec(two))));
}

TEST_CASE("freezing the unlabelled tree system splits off a polynomial tail") {
    auto sys = functional_system::make(parse_spec("class t unlabelled { y = z * PSet(y); expose y; }"));
    auto sol = fixed_point(sys, 8);
    auto frozen = freeze_tails(sys, sol);
    REQUIRE(frozen.vars() == std::vector<std::string>{"y"});

    std::string printed = print(frozen.spec.rhs("y"));
    REQUIRE(printed.find("Exp(y)") != std::string::npos);
    REQUIRE(printed.find("Frozen(") != std::string::npos);
    REQUIRE(printed.find("PSet") == std::string::npos);

    // the frozen tail is exp(sum_{i>=2} y(z^i)/i)
    qseries tail = polya_exp_tail(sol.at("y"));
    REQUIRE(tail[0] == 1);
    REQUIRE(tail[1] == 0);
    REQUIRE(tail[2] == rat(1, 2));
    REQUIRE(tail[3] == rat(1, 3));

    // re-solving the frozen system reproduces the solution exactly
    auto resol = fixed_point(frozen, 8);
    REQUIRE(resol.at("y") == sol.at("y"));
}

TEST_CASE("freezing eliminates variables reached only through higher slices") {
    const char* src =
        "class e unlabelled {\n"
        "    f = z * PSet(f + A);\n"
        "    A = Subst(f, 2) * Geom(Subst(f, 2));\n"
        "    expose f;\n"
        "}\n";
    auto sys = functional_system::make(parse_spec(src));
    auto sol = fixed_point(sys, 8);
    auto frozen = freeze_tails(sys, sol);
    REQUIRE(frozen.vars() == std::vector<std::string>{"f"});
    REQUIRE_FALSE(contains_kind(frozen.spec.rhs("f"), expr_kind::subst));
    REQUIRE_FALSE(contains_kind(frozen.spec.rhs("f"), expr_kind::pset));
    auto resol = fixed_point(frozen, 8);
    REQUIRE(resol.at("f") == sol.at("f"));
}

TEST_CASE("freezing keeps auxiliaries that feed the scale-1 slice") {
    const char* src =
        "class o labelled {\n"
        "    C = z * Exp(C + 1/2 * T);\n"
        "    T = (T + C) * (T + C) * Geom(C + T);\n"
        "    expose C;\n"
        "}\n";
    auto sys = functional_system::make(parse_spec(src));
    auto sol = fixed_point(sys, 8);
    auto frozen = freeze_tails(sys, sol);
    REQUIRE(frozen.vars().size() == 2); // labelled system: nothing to freeze
    auto resol = fixed_point(frozen, 8);
    REQUIRE(resol.at("C") == sol.at("C"));
    REQUIRE(resol.at("T") == sol.at("T"));
}

TEST_CASE("literal freezing replaces markers by their bound values") {
    auto spec = parse_spec("class t unlabelled { marker u; y = z * PSet(u * y); expose y; }");
    auto sys = functional_system::make(spec, {{"u", rat(1)}});
    auto sol = fixed_point(sys, 8);

    auto lit = freeze_tails(sys, sol, freeze_mode::literal);
    REQUIRE_FALSE(contains_kind(lit.spec.rhs("y"), expr_kind::marker));
    REQUIRE(fixed_point(lit, 8).at("y") == sol.at("y"));

    auto sym = freeze_tails(sys, sol, freeze_mode::variables_only);
    REQUIRE(contains_kind(sym.spec.rhs("y"), expr_kind::marker));
    REQUIRE(sym.spec.markers == std::vector<std::string>{"u"});
    REQUIRE(fixed_point(sym, 8).at("y") == sol.at("y"));
}

TEST_CASE("variable derivatives of Polya operators stay in the scale-1 slice") {
    const unsigned N = 9;
    std::mt19937_64 rng(5);
    qseries f = random_series(rng, N, true, true);
    eval_env<rat> env;
    env.vars.emplace("y", f);

    expr y = ex_var("y");
    REQUIRE(eval_at(d_var(ex_pset(y), "y"), env, N) == polya_exp(f));
    REQUIRE(eval_at(d_var(ex_pset_odd(y), "y"), env, N) == polya_exp_odd(f));
    REQUIRE(eval_at(d_var(ex_pset_tail(y), "y"), env, N) == qseries::zero(EX, N));
    REQUIRE(eval_at(d_var(ex_pset_even(y), "y"), env, N) == qseries::zero(EX, N));
    REQUIRE(eval_at(d_var(ex_subst(y, 2), "y"), env, N) == qseries::zero(EX, N));

    REQUIRE_THROWS_AS(d_z(ex_pset(y)), std::invalid_argument);
    REQUIRE_THROWS_AS(d_marker(ex_pset_tail(y), "v"), std::invalid_argument);
    REQUIRE_THROWS_AS(d_z(ex_unroot(y)), std::invalid_argument);
}

TEST_CASE("derivatives of plethysm substitutions follow the scaling rules") {
    const unsigned N = 8;
    eval_env<rat> env;
    env.vars.emplace("C", qseries::atom(EX, N));
    env.markers.emplace("v", rat(3));

    // d/dz Subst(z*z, 2) = 2 z Subst(2z, 2) = 4 z^3
    auto got = eval_at(d_z(ex_subst(ex_atom() * ex_atom(), 2)), env, N);
    auto z = qseries::atom(EX, N);
    REQUIRE(got == rat(4) * z * z * z);

    // d/dv Subst(v*C, 2) = 2 v Subst(C, 2); at v=3, C=z this is 6 z^2
    auto gotv = eval_at(d_marker(ex_subst(ex_marker("v") * ex_var("C"), 2), "v"), env, N);
    REQUIRE(gotv == rat(6) * z * z);

    // matches the v-derivative of the direct value v^2 z^2
    auto direct = eval_at(ex_subst(ex_marker("v") * ex_var("C"), 2), env, N);
    REQUIRE(direct == rat(9) * z * z);
}

TEST_CASE("frozen polynomial derivatives differentiate the payload") {
    const unsigned N = 6;
    eval_env<rat> env;
    expr f = ex_frozen_poly({rat(1), rat(2), rat(1, 2)});
    auto z = qseries::atom(EX, N);
    REQUIRE(eval_at(d_z(f), env, N) == qseries::constant(EX, 2, N) + z);
    REQUIRE(eval_at(d_var(f, "y"), env, N) == qseries::zero(EX, N));
    REQUIRE(eval_at(d_marker(f, "v"), env, N) == qseries::zero(EX, N));
}

namespace {

// Random expressions for the chain-rule identity. The grammar subset avoids
// nodes whose z-derivative is rejected (unfrozen Polya operators, Unroot) and
// keeps variables out of Subst arguments, where the variable derivative is
// zero by the slice convention and the series-level chain rule would not hold.
struct chain_rule_gen {
    std::mt19937_64& rng;
    int budget;

    expr gen(int depth, bool allow_vars) {
        if (depth <= 0 || budget <= 0 || pick(4) == 0) return leaf(allow_vars);
        --budget;
        switch (pick(8)) {
        case 0: return gen(depth - 1, allow_vars) + gen(depth - 1, allow_vars);
        case 1: return gen(depth - 1, allow_vars) * gen(depth - 1, allow_vars);
        case 2: return gen(depth - 1, allow_vars) - gen(depth - 1, allow_vars);
        case 3: return ex_neg(gen(depth - 1, allow_vars));
        case 4: return ex_exp(zero_const(depth - 1, allow_vars));
        case 5: return ex_geom(zero_const(depth - 1, allow_vars));
        case 6: return ex_set_ge(1 + pick(3), zero_const(depth - 1, allow_vars));
        default: return ex_subst(zero_const(depth - 1, false), 2 + pick(2));
        }
    }

    expr zero_const(int depth, bool allow_vars) {
        // valuation >= 1 by construction: either a solution variable or z times
        // an arbitrary subtree
        if (allow_vars && pick(3) == 0) return pick(2) ? ex_var("y") : ex_var("w");
        return ex_atom() * gen(depth, allow_vars);
    }

    expr leaf(bool allow_vars) {
        switch (pick(allow_vars ? 5 : 3)) {
        case 0: return ex_const(rat(1 + pick(4), 1 + pick(3)));
        case 1: return ex_atom();
        case 2: return ex_marker("v");
        case 3: return ex_var("y");
        default: return ex_var("w");
        }
    }

    unsigned pick(unsigned n) { return static_cast<unsigned>(rng() % n); }
};

} // namespace

TEST_CASE("symbolic derivatives satisfy the exact chain rule") {
    const unsigned N = 7;
    std::mt19937_64 rng(2024);
    int done = 0;
    while (done < 120) {
        chain_rule_gen g{rng, 20};
        expr e = g.gen(4, true);
        eval_env<rat> env;
        env.vars.emplace("y", random_series(rng, N, true, true));
        env.vars.emplace("w", random_series(rng, N, true, true));
        env.markers.emplace("v", rat(1 + rng() % 3, 1 + rng() % 2));

        qseries val(EX, N);
        try {
            val = eval_at(e, env, N);
        } catch (const std::domain_error&) {
            continue; // geom/exp argument out of range for this draw
        }
        ++done;

        qseries total = eval_at(d_z(e), env, N);
        total = total + eval_at(d_var(e, "y"), env, N) * derivative(env.vars.at("y")).truncated(N);
        total = total + eval_at(d_var(e, "w"), env, N) * derivative(env.vars.at("w")).truncated(N);
        REQUIRE(derivative(val) == total.truncated(N - 1));
    }
}
