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

#ifndef FORMRED_COEFF_HPP
#define FORMRED_COEFF_HPP

#include <gmpxx.h>

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "formred/errors.hpp"
#include "formred/poly.hpp"

namespace formred {

class AlgebraicNumber;
struct TowerLevel;

/* A tower is a pointer to its top level; nullptr is the rationals. */
using ExtensionTower = std::shared_ptr<const TowerLevel>;
using APoly = Poly<AlgebraicNumber>;

/*
   Element of Q(theta_1)(theta_2)...  An element lives at the lowest level
   where it can be written: a rational has no level, otherwise it is a
   polynomial in the generator of its level with coefficients from strictly
   lower levels, of degree below the degree of the defining polynomial and
   at least one.
*/
class AlgebraicNumber {
  public:
    AlgebraicNumber() = default;
    AlgebraicNumber(long v) : q_(v) {}  // NOLINT(google-explicit-constructor)
    AlgebraicNumber(const mpq_class& v) : q_(v) { q_.canonicalize(); }  // NOLINT
    AlgebraicNumber(long num, long den) : q_(num, den) { q_.canonicalize(); }

    /* The generator theta of the top level of a nonempty tower. */
    static AlgebraicNumber generator(const ExtensionTower& t);

    bool is_zero() const { return !node_ && q_ == 0; }
    bool is_one() const { return !node_ && q_ == 1; }
    bool is_rational() const { return !node_; }
    const mpq_class& rational() const;
    /* Level this number lives at; nullptr for rationals. */
    const ExtensionTower& level() const { return node_; }
    /* Coefficients in the generator of level(); empty for rationals. */
    const std::vector<AlgebraicNumber>& coords() const { return c_; }

    AlgebraicNumber operator-() const;
    friend AlgebraicNumber operator+(const AlgebraicNumber& a, const AlgebraicNumber& b);
    friend AlgebraicNumber operator-(const AlgebraicNumber& a, const AlgebraicNumber& b);
    friend AlgebraicNumber operator*(const AlgebraicNumber& a, const AlgebraicNumber& b);
    friend AlgebraicNumber operator/(const AlgebraicNumber& a, const AlgebraicNumber& b);
    AlgebraicNumber& operator+=(const AlgebraicNumber& b) { return *this = *this + b; }
    AlgebraicNumber& operator-=(const AlgebraicNumber& b) { return *this = *this - b; }
    AlgebraicNumber& operator*=(const AlgebraicNumber& b) { return *this = *this * b; }
    AlgebraicNumber& operator/=(const AlgebraicNumber& b) { return *this = *this / b; }
    AlgebraicNumber inverse() const;
    AlgebraicNumber pow(long e) const;

    friend bool operator==(const AlgebraicNumber& a, const AlgebraicNumber& b);
    friend bool operator!=(const AlgebraicNumber& a, const AlgebraicNumber& b) { return !(a == b); }

    /* Total order used only for deterministic sorting. */
    friend bool canonical_less(const AlgebraicNumber& a, const AlgebraicNumber& b);

    /* Text in the generator names, e.g. "1/3*r1 + 2/3". */
    std::string to_string() const;

  private:
    static AlgebraicNumber make(ExtensionTower node, std::vector<AlgebraicNumber> c);
    ExtensionTower node_;
    mpq_class q_;
    std::vector<AlgebraicNumber> c_;
    friend struct TowerOps;
};

inline bool exactly_zero(const AlgebraicNumber& a) { return a.is_zero(); }

struct TowerLevel {
    ExtensionTower parent;
    int depth = 0;
    std::string name;
    /* Monic defining polynomial over the parent level. */
    APoly minpoly;
};

/* Smallest tower containing both (one must be a prefix of the other). */
ExtensionTower join(const ExtensionTower& a, const ExtensionTower& b);
int depth(const ExtensionTower& t);
/* "RootOf(z^2+1, index=1)"-style description of every generator, bottom up. */
std::vector<std::pair<std::string, std::string>> describe(const ExtensionTower& t);

/* Inversion met a nontrivial factor of the defining polynomial of `level`. */
class ZeroDivisor : public Error {
  public:
    ZeroDivisor(ExtensionTower level, APoly factor);
    ExtensionTower level;
    APoly factor;
};

class NotSquarefree : public Error {
  public:
    explicit NotSquarefree(APoly gcd);
    APoly gcd;
};

/* Polynomial helpers over the tower field. */
APoly monic(const APoly& p);
std::pair<APoly, APoly> divmod(const APoly& a, const APoly& b);
APoly gcd(const APoly& a, const APoly& b);
/* Yun decomposition: list of (squarefree factor, multiplicity). */
std::vector<std::pair<APoly, int>> squarefree_decomposition(const APoly& p);
std::string to_string(const APoly& p, const std::string& var = "z");

/* Append a level with generator a root of the monic squarefree `poly`. */
std::pair<ExtensionTower, AlgebraicNumber> adjoin_root(const ExtensionTower& tower, const APoly& poly);

/* Known factorizations learned from ZeroDivisor restarts. */
using FactorHints = std::vector<APoly>;

/*
   All roots of a monic polynomial with their multiplicities, adjoining roots
   of factors without rational roots as needed.  Rational roots come first in
   ascending order, adjoined ones follow in discovery order.
*/
std::vector<std::pair<AlgebraicNumber, int>> distinct_root_partition(const APoly& poly,
                                                                     const FactorHints* hints = nullptr);

}  // namespace formred

#endif
