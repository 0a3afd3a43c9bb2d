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
#ifndef FORMRED_SCALAR_HPP
#define FORMRED_SCALAR_HPP

#include <optional>
#include <string>
#include <vector>

#include "formred/linalg.hpp"
#include "formred/poly.hpp"

namespace formred {

/*
   d^n f + a_{n-1} d^{n-1} f + ... + a_0 f = 0 with raw coefficients in (x, eps)
   and a_n = 1.  sigma is the exponent of xi = x^sigma eps used by the
   constructions below.
*/
struct ScalarEquation {
    std::vector<BiSeries> a;
    Rational sigma = 0;

    /* Without a declared sigma the companion system's normal form decides it. */
    static ScalarEquation make(std::vector<BiSeries> a, std::optional<Rational> sigma = std::nullopt,
                               long certainty = 3);
    long n() const { return static_cast<long>(a.size()) - 1; }
    /* val_eps(a_i), empty for a_i = 0. */
    std::optional<long> val(long i) const;
};

/* F = (f, df, ..., d^{n-1} f). */
PerturbedSystem companion_system(const ScalarEquation& eq);

struct PolygonEdge {
    Rational slope;
    std::vector<long> support;
    /* sum over the support of a_{i, nu_i}(x) X^i, sign fixed so the top coefficient leads positive. */
    Poly<PuiseuxSeries> E;
};

struct EpsPolygonScalar {
    std::vector<std::pair<long, long>> points;
    std::vector<PolygonEdge> edges;
};

EpsPolygonScalar eps_polygon(const ScalarEquation& eq);
Rational exp_order_scalar(const ScalarEquation& eq);

struct ScalarMoser {
    long kappa;
    long nu;
    Rational mu;
    std::vector<long> gamma;
};
ScalarMoser scalar_moser(const ScalarEquation& eq);

struct IrreducibleSystem {
    PerturbedSystem system;
    /* x xi^kappa dW = A W, which need not be the normal form of the system. */
    SystemShape shape;
    long i0;
};
IrreducibleSystem scalar_to_irreducible_system(const ScalarEquation& eq, long certainty = 3, long x_terms = 16);

std::string to_string(const Poly<PuiseuxSeries>& p, const std::string& var = "X");

}  // namespace formred

#endif
