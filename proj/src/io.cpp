/*
   Copyright 2025 The formred Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

        http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#include "formred/io.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>
#include <set>
#include <tuple>

namespace formred {

/* ------------------------------------------------------------------ Expr */

Expr Expr::constant(const Rational& c) { return monomial(c, 0, 0); }

Expr Expr::monomial(const Rational& c, const Rational& x, const Rational& eps, long xi) {
    Expr e;
    e.add({x, eps, xi}, c);
    return e;
}

void Expr::add(const Key& k, const Rational& c) {
    if (c == 0) return;
    auto it = t_.find(k);
    if (it == t_.end()) {
        t_.emplace(k, c);
        return;
    }
    it->second += c;
    if (it->second == 0) t_.erase(it);
}

Expr operator+(const Expr& a, const Expr& b) {
    Expr r = a;
    for (const auto& [k, c] : b.t_) r.add(k, c);
    return r;
}

Expr Expr::operator-() const {
    Expr r;
    for (const auto& [k, c] : t_) r.t_.emplace(k, -c);
    return r;
}

Expr operator-(const Expr& a, const Expr& b) { return a + (-b); }

Expr operator*(const Expr& a, const Expr& b) {
    Expr r;
    for (const auto& [ka, ca] : a.t_)
        for (const auto& [kb, cb] : b.t_) r.add({ka.x + kb.x, ka.eps + kb.eps, ka.xi + kb.xi}, ca * cb);
    return r;
}

std::optional<Expr> Expr::pow(long e) const {
    if (e >= 0) {
        Expr r = constant(1);
        for (long i = 0; i < e; ++i) r = r * *this;
        return r;
    }
    if (!is_monomial()) return std::nullopt;
    const auto& [k, c] = *t_.begin();
    Rational ci = 1 / c;
    Rational cp = 1;
    for (long i = 0; i < -e; ++i) cp *= ci;
    return monomial(cp, k.x * e, k.eps * e, k.xi * e);
}

std::optional<Expr> Expr::divided(const Expr& m) const {
    if (!m.is_monomial()) return std::nullopt;
    return *this * *m.pow(-1);
}

Expr Expr::raw(long h, const Rational& p, const Rational& sigma) const {
    Expr r;
    for (const auto& [k, c] : t_) r.add({k.x + sigma * (k.xi - h) - p, k.eps + k.xi - h, 0}, c);
    return r;
}

BiSeries Expr::to_bi(long d) const {
    BiSeries f;
    for (const auto& [k, c] : t_) {
        if (k.xi != 0) throw Error("xi left in a raw expression");
        Rational idx = k.eps * d;
        if (idx.get_den() != 1) throw Error("eps exponent off the lattice");
        f += BiSeries::monomial(AlgebraicNumber(c), k.x, to_long(idx));
    }
    return f;
}

/* ---------------------------------------------------------------- lexer */

namespace {

enum class Tok { Ident, Int, Sym, End };

struct Token {
    Tok kind = Tok::End;
    std::string text;
    int line = 1, col = 1;
};

std::vector<Token> lex(const std::string& s) {
    std::vector<Token> out;
    int line = 1, col = 1;
    std::size_t i = 0;
    auto advance = [&](std::size_t n) {
        for (std::size_t k = 0; k < n; ++k, ++i) {
            if (s[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
    };
    while (i < s.size()) {
        const char c = s[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            advance(1);
            continue;
        }
        if (c == '#') {
            while (i < s.size() && s[i] != '\n') advance(1);
            continue;
        }
        Token t;
        t.line = line;
        t.col = col;
        std::size_t j = i;
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_')) ++j;
            t.kind = Tok::Ident;
        } else if (std::isdigit(static_cast<unsigned char>(c))) {
            while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
            t.kind = Tok::Int;
        } else if (std::string("[](),+-*/^=").find(c) != std::string::npos) {
            j = i + 1;
            t.kind = Tok::Sym;
        } else {
            throw ParseError(std::string("unexpected character '") + c + "'", line, col);
        }
        t.text = s.substr(i, j - i);
        advance(j - i);
        out.push_back(std::move(t));
    }
    Token end;
    end.line = line;
    end.col = col;
    out.push_back(end);
    return out;
}

class Parser {
  public:
    explicit Parser(const std::string& text) : toks_(lex(text)) {}

    const Token& peek() const { return toks_[pos_]; }
    const Token& peek_next() const { return toks_[std::min(pos_ + 1, toks_.size() - 1)]; }
    bool at_end() const { return peek().kind == Tok::End; }
    bool is_sym(const char* s) const { return peek().kind == Tok::Sym && peek().text == s; }

    [[noreturn]] void fail(const std::string& what, const Token& t) const { throw ParseError(what, t.line, t.col); }
    [[noreturn]] void fail(const std::string& what) const { fail(what, peek()); }

    Token take() { return toks_[pos_++]; }
    void expect(const char* s) {
        if (!is_sym(s)) fail(std::string("expected '") + s + "'" + found());
        ++pos_;
    }
    std::string found() const {
        return at_end() ? " at end of input" : ", found '" + peek().text + "'";
    }

    long integer() {
        bool neg = false;
        if (is_sym("-") || is_sym("+")) neg = take().text == "-";
        if (peek().kind != Tok::Int) fail("expected an integer" + found());
        const Token t = take();
        if (t.text.size() > 17) fail("integer literal too large", t);
        const long v = std::stol(t.text);
        return neg ? -v : v;
    }

    Rational rational() {
        const long a = integer();
        if (is_sym("/")) {
            const Token slash = take();
            const long b = integer();
            if (b == 0) fail("zero denominator", slash);
            return ratio(a, b);
        }
        return Rational(a);
    }

    Expr expr() {
        Expr e = term();
        while (is_sym("+") || is_sym("-")) {
            const bool minus = take().text == "-";
            Expr t = term();
            e = minus ? e - t : e + t;
        }
        return e;
    }

    Expr term() {
        Expr e = unary();
        while (is_sym("*") || is_sym("/")) {
            const Token op = take();
            Expr f = unary();
            if (op.text == "*") {
                e = e * f;
                continue;
            }
            if (f.is_zero()) fail("division by zero", op);
            auto q = e.divided(f);
            if (!q) fail("division by a non-monomial", op);
            e = *q;
        }
        return e;
    }

    Expr unary() {
        if (is_sym("-")) {
            take();
            return -unary();
        }
        if (is_sym("+")) {
            take();
            return unary();
        }
        return power();
    }

    Expr power() {
        Expr base = primary();
        if (!is_sym("^")) return base;
        const Token hat = take();
        Rational e;
        if (is_sym("(")) {
            take();
            e = rational();
            expect(")");
        } else {
            e = Rational(integer());
        }
        if (e.get_den() == 1) {
            if (base.is_zero() && e < 0) fail("zero to a negative power", hat);
            auto r = base.pow(to_long(e));
            if (!r) fail("negative power of a non-monomial", hat);
            return *r;
        }
        if (!base.is_monomial() || base.terms().begin()->second != 1)
            fail("fractional power of anything but x, eps or xi", hat);
        const auto& k = base.terms().begin()->first;
        if (k.xi != 0) {
            const Rational ek = e * k.xi;
            if (k.x != 0 || k.eps != 0 || ek.get_den() != 1) fail("fractional power of xi", hat);
            return Expr::monomial(1, 0, 0, to_long(ek));
        }
        return Expr::monomial(1, k.x * e, k.eps * e);
    }

    Expr primary() {
        const Token t = peek();
        if (t.kind == Tok::Int) {
            take();
            if (t.text.size() > 17) fail("integer literal too large", t);
            return Expr::constant(Rational(std::stol(t.text)));
        }
        if (t.kind == Tok::Ident) {
            take();
            if (t.text == "x") return Expr::monomial(1, 1, 0);
            if (t.text == "eps") return Expr::monomial(1, 0, 1);
            if (t.text == "xi") return Expr::monomial(1, 0, 0, 1);
            fail("unknown symbol '" + t.text + "'", t);
        }
        if (is_sym("(")) {
            take();
            Expr e = expr();
            expect(")");
            return e;
        }
        fail("expected an expression" + found());
    }

    std::vector<Expr> list() {
        std::vector<Expr> out;
        expect("[");
        if (is_sym("]")) fail("empty list");
        out.push_back(expr());
        while (is_sym(",")) {
            take();
            out.push_back(expr());
        }
        expect("]");
        return out;
    }

    /* c_n D^n f + ... + c_0 f = 0, coefficients written before D^k f. */
    std::vector<Expr> operator_equation() {
        std::map<long, Expr> by_order;
        bool first = true;
        while (first || is_sym("+") || is_sym("-")) {
            bool minus = false;
            if (is_sym("+") || is_sym("-")) minus = take().text == "-";
            first = false;
            Expr c = Expr::constant(1);
            long order = -1;
            while (order < 0) {
                const Token t = peek();
                if (t.kind == Tok::Ident && t.text == "D") {
                    take();
                    order = 1;
                    if (is_sym("^")) {
                        take();
                        order = integer();
                        if (order < 0) fail("negative derivative order", t);
                    }
                    if (peek().kind != Tok::Ident || peek().text != "f") fail("expected 'f'" + found());
                    take();
                } else if (t.kind == Tok::Ident && t.text == "f") {
                    take();
                    order = 0;
                } else {
                    if (at_end() || is_sym("=")) fail("expected 'f'" + found());
                    c = c * power();
                    if (is_sym("*")) {
                        take();
                    } else if (is_sym("/")) {
                        const Token op = take();
                        Expr den = power();
                        if (den.is_zero()) fail("division by zero", op);
                        auto q = c.divided(den);
                        if (!q) fail("division by a non-monomial", op);
                        c = *q;
                    }
                }
            }
            by_order[order] = minus ? by_order[order] - c : by_order[order] + c;
        }
        expect("=");
        if (peek().kind != Tok::Int || peek().text != "0") fail("expected '0'" + found());
        take();
        std::vector<Expr> a(static_cast<std::size_t>(by_order.rbegin()->first) + 1);
        for (auto& [k, c] : by_order) a[static_cast<std::size_t>(k)] = c;
        return a;
    }

    std::vector<std::vector<Expr>> matrix() {
        std::vector<std::vector<Expr>> rows;
        expect("[");
        rows.push_back(list());
        while (is_sym(",")) {
            take();
            rows.push_back(list());
        }
        expect("]");
        return rows;
    }

  private:
    std::vector<Token> toks_;
    std::size_t pos_ = 0;
};

long eps_lattice(const std::vector<Expr>& es) {
    long d = 1;
    for (const Expr& e : es)
        for (const auto& [k, c] : e.terms()) d = std::lcm(d, k.eps.get_den().get_si());
    return d;
}

int x_lattice(const std::vector<Expr>& es) {
    long s = 1;
    for (const Expr& e : es)
        for (const auto& [k, c] : e.terms()) s = std::lcm(s, k.x.get_den().get_si());
    return static_cast<int>(s);
}

std::string paren_coeff(const AlgebraicNumber& c) {
    std::string s = c.to_string();
    if (s.find(" + ", 1) != std::string::npos || s.find(" - ", 1) != std::string::npos) return "(" + s + ")";
    return s;
}

std::string join_signed(const std::vector<std::string>& parts) {
    if (parts.empty()) return "0";
    std::string out = parts.front();
    for (std::size_t i = 1; i < parts.size(); ++i) {
        if (parts[i][0] == '-')
            out += " - " + parts[i].substr(1);
        else
            out += " + " + parts[i];
    }
    return out;
}

}  // namespace

Expr parse_expression(const std::string& text) {
    Parser ps(text);
    Expr e = ps.expr();
    if (!ps.at_end()) ps.fail("unexpected '" + ps.peek().text + "' after the expression");
    return e;
}

InputFile parse_input(const std::string& text) {
    Parser ps(text);
    InputFile f;
    std::set<std::string> seen;
    if (ps.at_end()) ps.fail("empty input");
    while (!ps.at_end()) {
        if (ps.peek().kind != Tok::Ident || !(ps.peek_next().kind == Tok::Sym && ps.peek_next().text == "=")) {
            const Token at = ps.peek();
            if (!seen.insert("a").second) ps.fail("more than one equation", at);
            f.a = ps.operator_equation();
            continue;
        }
        const Token key = ps.take();
        if (!seen.insert(key.text).second) ps.fail("duplicate key '" + key.text + "'", key);
        ps.expect("=");
        const Token at = ps.peek();
        if (key.text == "n") {
            f.n = ps.integer();
            if (*f.n < 1) ps.fail("n must be positive", at);
        } else if (key.text == "h") {
            f.h = ps.integer();
        } else if (key.text == "p") {
            f.p = ps.rational();
        } else if (key.text == "sigma") {
            f.sigma = ps.rational();
            if (*f.sigma > 0) ps.fail("sigma must be <= 0", at);
        } else if (key.text == "A") {
            f.A = ps.matrix();
        } else if (key.text == "M") {
            f.M = ps.matrix();
        } else if (key.text == "a") {
            f.a = ps.list();
        } else {
            ps.fail("unknown key '" + key.text + "'", key);
        }
        if (ps.is_sym(",")) ps.take();
    }
    const int kinds = (f.A ? 1 : 0) + (f.M ? 1 : 0) + (f.a ? 1 : 0);
    if (kinds != 1) ps.fail("exactly one of A, M or a must be given");
    return f;
}

bool is_equation(const InputFile& f) { return f.a.has_value(); }
bool is_system(const InputFile& f) { return f.A.has_value() || f.M.has_value(); }

PerturbedSystem to_system(const InputFile& f) {
    if (!is_system(f)) throw PreconditionError("a system (A or M) is required");
    const auto& rows = f.A ? *f.A : *f.M;
    const std::size_t n = rows.size();
    for (const auto& r : rows)
        if (r.size() != n)
            throw DimensionMismatch("row of length " + std::to_string(r.size()) + " in a matrix with " +
                                    std::to_string(n) + " rows");
    if (f.n && static_cast<std::size_t>(*f.n) != n)
        throw DimensionMismatch("n = " + std::to_string(*f.n) + " but the matrix is " + std::to_string(n) + " x " +
                                std::to_string(n));
    const long h = f.A ? f.h.value_or(0) : 0;
    const Rational p = f.A ? f.p.value_or(0) : Rational(0);
    const Rational sigma = f.sigma.value_or(0);
    std::vector<Expr> raw;
    for (const auto& r : rows)
        for (const Expr& e : r) raw.push_back(e.raw(h, p, sigma));
    const long d = eps_lattice(raw);
    const int s = x_lattice(raw);
    BiMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) m(i, j) = raw[i * n + j].to_bi(d);
    return PerturbedSystem(std::move(m), s, d);
}

ScalarEquation to_equation(const InputFile& f) {
    if (!is_equation(f)) throw PreconditionError("a scalar equation (a) is required");
    const auto& a = *f.a;
    if (a.size() < 2) throw DimensionMismatch("an equation needs a0 and a leading coefficient");
    if (f.n && static_cast<std::size_t>(*f.n) + 1 != a.size())
        throw DimensionMismatch("n = " + std::to_string(*f.n) + " but " + std::to_string(a.size()) +
                                " coefficients are given");
    const Rational sigma = f.sigma.value_or(0);
    std::vector<Expr> raw;
    for (const Expr& e : a) raw.push_back(e.raw(0, 0, sigma));
    if (!raw.back().is_monomial()) throw PreconditionError("the leading coefficient must be a nonzero monomial");
    const Expr lead = raw.back();
    for (Expr& e : raw) e = *e.divided(lead);
    const long d = eps_lattice(raw);
    if (d != 1) throw PreconditionError("equation coefficients need integral eps exponents");
    std::vector<BiSeries> c;
    for (const Expr& e : raw) c.push_back(e.to_bi(1));
    return ScalarEquation::make(std::move(c), f.sigma);
}

PerturbedSystem parse_system(const std::string& text) { return to_system(parse_input(text)); }
ScalarEquation parse_equation(const std::string& text) { return to_equation(parse_input(text)); }

/* ------------------------------------------------------------- printing */

std::string format_rational(const Rational& q) { return q.get_str(); }

std::string format_power(const std::string& var, const Rational& e) {
    if (e == 0) return "";
    if (e == 1) return var;
    if (e.get_den() == 1 && e > 0) return var + "^" + e.get_str();
    return var + "^(" + e.get_str() + ")";
}

std::string format_term(const ExpTerm& t) {
    std::vector<std::string> parts;
    if (t.log)
        parts.push_back("log(x)");
    else if (t.x_exp != 0)
        parts.push_back(format_power("x", t.x_exp));
    if (t.eps_exp != 0) parts.push_back(format_power("eps", t.eps_exp));
    std::string mono;
    for (const auto& p : parts) mono += (mono.empty() ? "" : "*") + p;
    const std::string cs = paren_coeff(t.coeff);
    if (mono.empty()) return t.coeff.to_string();
    if (cs == "1") return mono;
    if (cs == "-1") return "-" + mono;
    return cs + "*" + mono;
}

std::string format_terms(const std::vector<ExpTerm>& terms) {
    std::vector<std::string> parts;
    for (const auto& t : terms) parts.push_back(format_term(t));
    return join_signed(parts);
}

std::string format_matrix(const BiMatrix& m, long d) {
    std::string s = "[";
    for (std::size_t i = 0; i < m.rows(); ++i) {
        s += i ? ", [" : "[";
        for (std::size_t j = 0; j < m.cols(); ++j) {
            if (j) s += ", ";
            s += m(i, j).to_string(d);
        }
        s += "]";
    }
    return s + "]";
}

std::string format_system(const PerturbedSystem& sys) { return "M=" + format_matrix(sys.M(), sys.d()); }

std::vector<std::pair<std::string, std::string>> generators(const std::vector<AlgebraicNumber>& numbers) {
    std::set<const TowerLevel*> seen;
    std::vector<std::tuple<int, std::string, std::string>> found;
    std::vector<AlgebraicNumber> stack(numbers.begin(), numbers.end());
    while (!stack.empty()) {
        AlgebraicNumber a = std::move(stack.back());
        stack.pop_back();
        for (const TowerLevel* l = a.level().get(); l; l = l->parent.get()) {
            if (!seen.insert(l).second) break;
            found.emplace_back(l->depth, l->name,
                               "RootOf(" + to_string(l->minpoly) + ", index=" + std::to_string(l->depth) + ")");
            for (const auto& c : l->minpoly.coeffs()) stack.push_back(c);
        }
        for (const auto& c : a.coords()) stack.push_back(c);
    }
    std::sort(found.begin(), found.end());
    std::vector<std::pair<std::string, std::string>> out;
    for (auto& [dep, name, def] : found) out.emplace_back(name, def);
    return out;
}

std::vector<AlgebraicNumber> coefficients(const std::vector<ExpTerm>& terms) {
    std::vector<AlgebraicNumber> out;
    for (const auto& t : terms) out.push_back(t.coeff);
    return out;
}

std::vector<AlgebraicNumber> coefficients(const BiMatrix& m) {
    std::vector<AlgebraicNumber> out;
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j)
            for (const auto& [k, f] : m(i, j).terms())
                for (const auto& c : f.coeffs())
                    if (!c.is_zero()) out.push_back(c);
    return out;
}

}  // namespace formred
