#pragma once
// Recursive-descent parser for the class-specification language.
//
//   file   := class+
//   class  := "class" IDENT ("labelled"|"unlabelled") "{" (eqn|expose|marker)* "}"
//   eqn    := IDENT "=" expr ";"
//   expose := "expose" IDENT+ ";"
//   marker := "marker" IDENT ";"
//   expr   := term (("+"|"-") term)*
//   term   := factor ("*" factor)*
//   factor := NUMBER | "z" | IDENT | "(" expr ")" | FUNC "(" args ")"
//   FUNC   in {Exp, PSet, PSetTail, PSetEven, PSetOdd, SetGe, PSetGe, Subst,
//              Geom, Unroot, Frozen}
//   NUMBER := digits ("/" digits)?     # nonnegative rational literal
//
// Line comments start with '#'. Errors carry line and column.

#include "subcrit/expr.hpp"

#include <cctype>
#include <stdexcept>
#include <string>
#include <vector>

namespace subcrit {

class parse_error : public std::runtime_error {
  public:
    parse_error(const std::string& msg, int line, int col)
        : std::runtime_error("parse error at " + std::to_string(line) + ":" +
                             std::to_string(col) + ": " + msg),
          line_(line), col_(col) {}
    int line() const { return line_; }
    int column() const { return col_; }

  private:
    int line_, col_;
};

namespace detail {

struct token {
    enum kind_t { ident, number, punct, end } kind;
    std::string text;
    rat value; // number
    int line = 1, col = 1;
};

class lexer {
  public:
    explicit lexer(const std::string& src) : src_(src) { advance(); }

    const token& peek() const { return tok_; }
    token take() {
        token t = tok_;
        advance();
        return t;
    }

  private:
    void advance() {
        while (pos_ < src_.size()) {
            char c = src_[pos_];
            if (c == '#') {
                while (pos_ < src_.size() && src_[pos_] != '\n') ++pos_;
            } else if (c == '\n') {
                ++line_; col_ = 1; ++pos_;
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                ++col_; ++pos_;
            } else {
                break;
            }
        }
        tok_.line = line_;
        tok_.col = col_;
        if (pos_ >= src_.size()) {
            tok_.kind = token::end;
            tok_.text = "<end of input>";
            return;
        }
        char c = src_[pos_];
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            size_t start = pos_;
            while (pos_ < src_.size() &&
                   (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
                take_char();
            tok_.kind = token::ident;
            tok_.text = src_.substr(start, pos_ - start);
        } else if (std::isdigit(static_cast<unsigned char>(c))) {
            tok_.kind = token::number;
            bigint num = lex_digits();
            bigint den = 1;
            if (pos_ < src_.size() && src_[pos_] == '/') {
                take_char();
                if (pos_ >= src_.size() || !std::isdigit(static_cast<unsigned char>(src_[pos_])))
                    throw parse_error("expected digits after '/'", line_, col_);
                den = lex_digits();
                if (den == 0) throw parse_error("zero denominator", tok_.line, tok_.col);
            }
            tok_.value = rat(num, den);
            tok_.text = tok_.value.str();
        } else {
            tok_.kind = token::punct;
            tok_.text = std::string(1, c);
            take_char();
        }
    }

    bigint lex_digits() {
        bigint v = 0;
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
            v = v * 10 + (src_[pos_] - '0');
            take_char();
        }
        return v;
    }

    void take_char() { ++pos_; ++col_; }

    const std::string& src_;
    size_t pos_ = 0;
    int line_ = 1, col_ = 1;
    token tok_;
};

class parser {
  public:
    explicit parser(const std::string& src) : lex_(src) {}

    std::vector<class_spec> parse_file() {
        std::vector<class_spec> specs;
        while (lex_.peek().kind != token::end) specs.push_back(parse_class());
        if (specs.empty()) fail("expected at least one class");
        return specs;
    }

  private:
    class_spec parse_class() {
        expect_keyword("class");
        class_spec spec;
        spec.name = expect_ident("class name");
        std::string flavor = expect_ident("flavor");
        if (flavor == "labelled") spec.labelled = true;
        else if (flavor == "unlabelled") spec.labelled = false;
        else fail("expected 'labelled' or 'unlabelled', got '" + flavor + "'");
        expect_punct("{");
        while (!at_punct("}")) {
            const token& t = lex_.peek();
            if (t.kind != token::ident) fail("expected equation, 'expose', or 'marker'");
            if (t.text == "expose") {
                lex_.take();
                do spec.exposed.push_back(expect_ident("exposed variable"));
                while (lex_.peek().kind == token::ident);
                expect_punct(";");
            } else if (t.text == "marker") {
                lex_.take();
                spec.markers.push_back(expect_ident("marker name"));
                expect_punct(";");
            } else {
                std::string var = lex_.take().text;
                if (var == "z") fail("variable must not be named z");
                expect_punct("=");
                expr e = parse_expr();
                expect_punct(";");
                for (const auto& [v, old] : spec.equations)
                    if (v == var) fail("redefinition of variable " + var);
                spec.equations.emplace_back(var, e);
            }
        }
        expect_punct("}");
        finalize(spec);
        return spec;
    }

    void finalize(class_spec& spec) {
        // Resolve idents: names declared as markers become marker nodes.
        for (auto& [v, e] : spec.equations) e = resolve(e, spec);
        try {
            validate(spec);
        } catch (const std::invalid_argument& err) {
            fail(err.what());
        }
    }

    expr resolve(const expr& e, const class_spec& spec) {
        if (e->kind == expr_kind::var) {
            for (const auto& m : spec.markers)
                if (e->name == m) return ex_marker(e->name);
            return e;
        }
        if (e->args.empty()) return e;
        expr_node n = *e;
        for (auto& a : n.args) a = resolve(a, spec);
        return make_node(std::move(n));
    }

    expr parse_expr() {
        std::vector<expr> terms;
        terms.push_back(parse_term());
        while (at_punct("+") || at_punct("-")) {
            bool minus = lex_.take().text == "-";
            expr t = parse_term();
            terms.push_back(minus ? ex_neg(t) : t);
        }
        return ex_sum(std::move(terms));
    }

    expr parse_term() {
        std::vector<expr> factors;
        factors.push_back(parse_factor());
        while (at_punct("*")) {
            lex_.take();
            factors.push_back(parse_factor());
        }
        return ex_prod(std::move(factors));
    }

    expr parse_factor() {
        const token t = lex_.take();
        if (t.kind == token::number) return ex_const(t.value);
        if (t.kind == token::punct && t.text == "(") {
            expr e = parse_expr();
            expect_punct(")");
            return e;
        }
        if (t.kind != token::ident)
            throw parse_error("expected a factor, got '" + t.text + "'", t.line, t.col);
        if (t.text == "z") return ex_atom();
        if (at_punct("(")) return parse_func(t);
        return ex_var(t.text); // may later resolve to a marker
    }

    expr parse_func(const token& name) {
        expect_punct("(");
        expr result;
        if (name.text == "Exp") result = ex_exp(parse_expr());
        else if (name.text == "Geom") result = ex_geom(parse_expr());
        else if (name.text == "PSet") result = ex_pset(parse_expr());
        else if (name.text == "PSetTail") result = ex_pset_tail(parse_expr());
        else if (name.text == "PSetEven") result = ex_pset_even(parse_expr());
        else if (name.text == "PSetOdd") result = ex_pset_odd(parse_expr());
        else if (name.text == "Unroot") result = ex_unroot(parse_expr());
        else if (name.text == "Frozen") result = ex_frozen(parse_expr());
        else if (name.text == "SetGe" || name.text == "PSetGe") {
            unsigned k = expect_small_int("component threshold");
            expect_punct(",");
            expr arg = parse_expr();
            result = name.text == "SetGe" ? ex_set_ge(k, arg) : ex_pset_ge(k, arg);
        } else if (name.text == "Subst") {
            expr arg = parse_expr();
            expect_punct(",");
            unsigned k = expect_small_int("plethysm scale");
            if (k == 0) throw parse_error("Subst scale must be >= 1", name.line, name.col);
            result = ex_subst(arg, k);
        } else {
            throw parse_error("unknown function '" + name.text + "'", name.line, name.col);
        }
        expect_punct(")");
        return result;
    }

    unsigned expect_small_int(const char* what) {
        const token t = lex_.take();
        if (t.kind != token::number || boost::multiprecision::denominator(t.value) != 1 ||
            t.value < 0 || t.value > 1000000)
            throw parse_error(std::string("expected a small integer (") + what + ")", t.line, t.col);
        return static_cast<unsigned>(boost::multiprecision::numerator(t.value));
    }

    bool at_punct(const char* p) const {
        return lex_.peek().kind == token::punct && lex_.peek().text == p;
    }
    void expect_punct(const char* p) {
        const token t = lex_.take();
        if (t.kind != token::punct || t.text != p)
            throw parse_error(std::string("expected '") + p + "', got '" + t.text + "'", t.line, t.col);
    }
    std::string expect_ident(const char* what) {
        const token t = lex_.take();
        if (t.kind != token::ident)
            throw parse_error(std::string("expected ") + what + ", got '" + t.text + "'", t.line, t.col);
        return t.text;
    }
    void expect_keyword(const char* kw) {
        const token t = lex_.take();
        if (t.kind != token::ident || t.text != kw)
            throw parse_error(std::string("expected '") + kw + "', got '" + t.text + "'", t.line, t.col);
    }
    [[noreturn]] void fail(const std::string& msg) {
        throw parse_error(msg, lex_.peek().line, lex_.peek().col);
    }

    lexer lex_;
};

} // namespace detail

inline std::vector<class_spec> parse_specs(const std::string& source) {
    return detail::parser(source).parse_file();
}

inline class_spec parse_spec(const std::string& source) {
    auto specs = parse_specs(source);
    if (specs.size() != 1)
        throw parse_error("expected exactly one class", 1, 1);
    return specs[0];
}

} // namespace subcrit
