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

#ifndef FORMRED_IO_HPP
#define FORMRED_IO_HPP

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "formred/driver.hpp"
#include "formred/linalg.hpp"
#include "formred/scalar.hpp"

namespace formred {

/*
   Finite sum of c x^a eps^b xi^k with rational a, b.  xi stands for
   x^sigma eps and is substituted once sigma is known.
*/
class Expr {
  public:
    struct Key {
        Rational x, eps;
        long xi = 0;
        friend bool operator<(const Key& a, const Key& b) {
            if (a.xi != b.xi) return a.xi < b.xi;
            if (a.eps != b.eps) return a.eps < b.eps;
            return a.x < b.x;
        }
    };

    Expr() = default;
    static Expr constant(const Rational& c);
    static Expr monomial(const Rational& c, const Rational& x, const Rational& eps, long xi = 0);

    const std::map<Key, Rational>& terms() const { return t_; }
    bool is_zero() const { return t_.empty(); }
    bool is_monomial() const { return t_.size() == 1; }

    friend Expr operator+(const Expr& a, const Expr& b);
    friend Expr operator-(const Expr& a, const Expr& b);
    friend Expr operator*(const Expr& a, const Expr& b);
    Expr operator-() const;
    /* Integer power; negative powers only of monomials. */
    std::optional<Expr> pow(long e) const;
    /* Quotient by a nonzero monomial. */
    std::optional<Expr> divided(const Expr& m) const;

    /* x^-p (x^sigma eps)^-h times the value, with xi = x^sigma eps. */
    Expr raw(long h, const Rational& p, const Rational& sigma) const;
    /* As an element over eps^(1/d); every eps exponent must lie on that lattice. */
    BiSeries to_bi(long d) const;

  private:
    void add(const Key& k, const Rational& c);
    std::map<Key, Rational> t_;
};

Expr parse_expression(const std::string& text);

/*
   Input file: whitespace separated key=value pairs, '#' starts a comment.
     n, h          integers
     p, sigma      rationals
     A=[[..],..]   xi^h x^p dF = A F with xi = x^sigma eps
     M=[[..],..]   dF = M F (raw form, as printed by the tools)
     a=[a0,..,an]  d^n f + ... + a0 f = 0, normalized by a dividing monomial an
   An equation may also be written out, "D^3 f - (x/xi^2) D^2 f - (1/xi^5) f = 0".
*/
struct InputFile {
    std::optional<long> n, h;
    std::optional<Rational> p, sigma;
    std::optional<std::vector<std::vector<Expr>>> A, M;
    std::optional<std::vector<Expr>> a;
};

InputFile parse_input(const std::string& text);
PerturbedSystem to_system(const InputFile& f);
ScalarEquation to_equation(const InputFile& f);
bool is_equation(const InputFile& f);
bool is_system(const InputFile& f);

PerturbedSystem parse_system(const std::string& text);
ScalarEquation parse_equation(const std::string& text);

/* ------------------------------------------------------------- printing */

std::string format_rational(const Rational& q);
/* "x^(5/2)", "eps^(-1)", "" for exponent 0. */
std::string format_power(const std::string& var, const Rational& e);
std::string format_term(const ExpTerm& t);
std::string format_terms(const std::vector<ExpTerm>& terms);
/* The raw matrix M of dF = M F, parseable back when exact. */
std::string format_matrix(const BiMatrix& m, long d);
std::string format_system(const PerturbedSystem& sys);

/* (name, RootOf definition) of every generator the numbers use. */
std::vector<std::pair<std::string, std::string>> generators(const std::vector<AlgebraicNumber>& numbers);
std::vector<AlgebraicNumber> coefficients(const std::vector<ExpTerm>& terms);
std::vector<AlgebraicNumber> coefficients(const BiMatrix& m);

}  // namespace formred

#endif
