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

#ifndef FORMRED_SERIES_HPP
#define FORMRED_SERIES_HPP

#include <gmpxx.h>

#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "formred/coeff.hpp"

namespace formred {

using Rational = mpq_class;

Rational floor_q(const Rational& q);
Rational ceil_q(const Rational& q);
long to_long(const Rational& q);
std::string to_string(const Rational& q);
// n/d in lowest terms.
inline Rational ratio(long n, long d) {
    Rational q(n, d);
    q.canonicalize();
    return q;
}

/*
   Truncation budget.  Series coming from exact input stay exact until an
   operation (an inverse, a Sylvester recursion) produces an infinite
   expansion; such results are cut xi_terms xi-steps past the leading
   eps-index and x_terms x-steps past the half-plane line.  A truncated
   coefficient is only taken for zero once `certainty` x-steps of it are
   known to vanish.
*/
struct Budget {
    long xi_terms = 8;
    long x_terms = 8;
    long certainty = 3;
};

/*
   Laurent series in x^(1/ram).  Coefficient i of c_ belongs to x^((vlo+i)/ram).
   prec is the first unknown exponent in units of 1/ram; exact series have
   prec == kInf.
*/
class PuiseuxSeries {
  public:
    static constexpr long kInf = std::numeric_limits<long>::max() / 4;

    PuiseuxSeries() = default;
    PuiseuxSeries(const AlgebraicNumber& c);  // NOLINT(google-explicit-constructor)
    PuiseuxSeries(long c) : PuiseuxSeries(AlgebraicNumber(c)) {}  // NOLINT

    static PuiseuxSeries monomial(const AlgebraicNumber& c, const Rational& e);
    /* O(x^e): nothing known to be nonzero below e. */
    static PuiseuxSeries big_o(const Rational& e);
    static PuiseuxSeries from_coeffs(int ram, long vlo, std::vector<AlgebraicNumber> c, long prec = kInf);

    int ram() const { return ram_; }
    long vlo() const { return vlo_; }
    long prec_units() const { return prec_; }
    const std::vector<AlgebraicNumber>& coeffs() const { return c_; }

    bool exact() const { return prec_ == kInf; }
    /* No coefficient is known to be nonzero. */
    bool known_zero() const { return c_.empty(); }
    bool exact_zero() const { return c_.empty() && exact(); }
    bool is_monomial() const;
    /* First unknown exponent; nullopt for exact series. */
    std::optional<Rational> precision() const;
    /* Exponent of the leading nonzero term; nullopt when known_zero(). */
    std::optional<Rational> valuation() const;
    /* valuation() if nonzero, else precision(); nullopt means exact zero. */
    std::optional<Rational> lower_bound() const;
    const AlgebraicNumber& leading() const;
    /* Coefficient of x^e; throws InsufficientOrder past the precision. */
    AlgebraicNumber coeff(const Rational& e) const;

    PuiseuxSeries lifted(int ram) const;
    PuiseuxSeries operator-() const;
    friend PuiseuxSeries operator+(const PuiseuxSeries& a, const PuiseuxSeries& b);
    friend PuiseuxSeries operator-(const PuiseuxSeries& a, const PuiseuxSeries& b);
    friend PuiseuxSeries operator*(const PuiseuxSeries& a, const PuiseuxSeries& b);
    PuiseuxSeries& operator+=(const PuiseuxSeries& b) { return *this = *this + b; }
    PuiseuxSeries& operator-=(const PuiseuxSeries& b) { return *this = *this - b; }
    PuiseuxSeries& operator*=(const PuiseuxSeries& b) { return *this = *this * b; }
    PuiseuxSeries scaled(const AlgebraicNumber& c) const;
    /* Multiply by x^e. */
    PuiseuxSeries shift(const Rational& e) const;
    PuiseuxSeries derive() const;
    /* 1/a with `rel` x-steps of relative precision when the result is infinite. */
    PuiseuxSeries inverse(const Rational& rel) const;
    /* Forget everything at exponents >= e. */
    PuiseuxSeries truncate(const Rational& e) const;
    /* Smallest ramification representing the same data. */
    PuiseuxSeries normalized() const;

    /* Structural equality (same known data and same precision). */
    friend bool operator==(const PuiseuxSeries& a, const PuiseuxSeries& b);
    friend bool operator!=(const PuiseuxSeries& a, const PuiseuxSeries& b) { return !(a == b); }

    std::string to_string(const std::string& var = "x") const;

  private:
    void trim();
    int ram_ = 1;
    long vlo_ = 0;
    std::vector<AlgebraicNumber> c_;
    long prec_ = kInf;
};

inline bool exactly_zero(const PuiseuxSeries& a) { return a.exact_zero(); }
/* Equal on every exponent known for both. */
bool agree(const PuiseuxSeries& a, const PuiseuxSeries& b);

/*
   Element of K = C((x))((eps)) stored raw: eps-index k maps to f_k(x).
   Indices up to last_known() are known (an absent index is exactly zero),
   later ones are an unknown tail assumed to respect the slope tail_slope().
   Exact elements have no tail.
*/
class BiSeries {
  public:
    BiSeries() = default;
    BiSeries(const PuiseuxSeries& c);  // NOLINT(google-explicit-constructor)
    BiSeries(const AlgebraicNumber& c) : BiSeries(PuiseuxSeries(c)) {}  // NOLINT
    BiSeries(long c) : BiSeries(PuiseuxSeries(c)) {}  // NOLINT

    static BiSeries term(const PuiseuxSeries& f, long k);
    static BiSeries monomial(const AlgebraicNumber& c, const Rational& xe, long k);
    /* Unknown from eps-index k on. */
    static BiSeries big_o(long k, const Rational& tail_slope = 0);
    static BiSeries from_terms(std::map<long, PuiseuxSeries> terms, std::optional<long> last_known,
                               const Rational& tail_slope = 0);

    const std::map<long, PuiseuxSeries>& terms() const { return t_; }
    bool has_tail() const { return last_.has_value(); }
    long last_known() const;
    const Rational& tail_slope() const { return slope_; }
    /* No eps tail and every coefficient exact. */
    bool exact() const;
    bool exact_zero() const { return t_.empty() && !last_; }
    /* f_k; throws InsufficientOrder for k past last_known(). */
    PuiseuxSeries coeff(long k) const;
    /* Smallest index holding any data (a nonzero or a truncated zero). */
    std::optional<long> first_index() const;

    BiSeries operator-() const;
    friend BiSeries operator+(const BiSeries& a, const BiSeries& b);
    friend BiSeries operator-(const BiSeries& a, const BiSeries& b);
    friend BiSeries operator*(const BiSeries& a, const BiSeries& b);
    BiSeries& operator+=(const BiSeries& b) { return *this = *this + b; }
    BiSeries& operator-=(const BiSeries& b) { return *this = *this - b; }
    BiSeries& operator*=(const BiSeries& b) { return *this = *this * b; }
    BiSeries scaled(const PuiseuxSeries& c) const;
    /* Multiply by x^xe eps^k. */
    BiSeries shift(const Rational& xe, long k) const;
    /* d/dx, termwise on the raw coefficients. */
    BiSeries derive() const;
    /* eps = eps~^d. */
    BiSeries ramify_eps(long d) const;
    /* Same value written over x^(1/s) (s a multiple of every ramification). */
    BiSeries ramify_x(int s) const;
    BiSeries inverse(const Budget& budget) const;
    /* Keep eps-indices <= kmax and x-exponents below sigma*k + p + n. */
    BiSeries truncate(const Rational& sigma, const Rational& p, long kmax, long n) const;

    friend bool operator==(const BiSeries& a, const BiSeries& b);
    friend bool operator!=(const BiSeries& a, const BiSeries& b) { return !(a == b); }

    /* eps exponents are printed as k/d. */
    std::string to_string(long d = 1, const std::string& var = "x") const;

  private:
    void clean();
    std::map<long, PuiseuxSeries> t_;
    std::optional<long> last_;
    Rational slope_ = 0;
};

inline bool exactly_zero(const BiSeries& a) { return a.exact_zero(); }
bool agree(const BiSeries& a, const BiSeries& b);

/* (sigma, p, nu) of an element or of a whole matrix of elements. */
struct NormalData {
    Rational sigma = 0;
    Rational p = 0;
    long nu = 0;
    bool zero = true;
};

NormalData normalize(const std::vector<const BiSeries*>& entries, long certainty);
NormalData normalize(const BiSeries& f, long certainty = 3);

/* Coefficient of xi^k, i.e. x^(-sigma k - p) f_k. */
PuiseuxSeries xi_coeff(const BiSeries& f, long k, const Rational& sigma, const Rational& p);

/* Newton polygon points (k, val_x f_k) with the supporting line. */
struct NewtonPolygonK {
    std::vector<std::pair<long, Rational>> points;
    Rational sigma, p;
};
NewtonPolygonK newton_polygon(const BiSeries& f, long certainty = 3);

/*
   f(x, x^e eps) = eps^nu x^mu sum_k g_k(x) (x^e eps)^k with val_x g_k >= 0,
   e the largest integer <= sigma_f.
*/
struct RegularRescale {
    long e;
    long nu;
    Rational mu;
    std::vector<PuiseuxSeries> g;
};
RegularRescale rescale_to_regular(const BiSeries& f, long certainty = 3);

}  // namespace formred

#endif
