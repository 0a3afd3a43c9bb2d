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

#ifndef FORMRED_REDUCE_HPP
#define FORMRED_REDUCE_HPP

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "formred/linalg.hpp"
#include "formred/poly.hpp"

namespace formred {

using LambdaPoly = Poly<PuiseuxSeries>;

/* ------------------------------------------------------------- theta */

/*
   Similarity U with U^{-1} A0 U = [[A0^11, 0], [A0^21, 0]] and the pencil
   G(lambda) = [[A0^11, A1^12], [A0^21, A1^22 + lambda I]] built from the
   conjugated pair.
*/
struct GLambda {
    PxMatrix U, Uinv;
    std::size_t r = 0;
    Matrix<LambdaPoly> G;
};
GLambda g_lambda(const PxMatrix& a0, const PxMatrix& a1, long certainty, long x_terms);
LambdaPoly det(const Matrix<LambdaPoly>& g);
/* G(0) restricted to a leading square block of size m. */
PxMatrix g_at_zero(const Matrix<LambdaPoly>& g, std::size_t m);

/* Coefficient of eta^r in det(lambda I + eta A0 + A1), expanded directly. */
LambdaPoly theta_direct(const PxMatrix& a0, const PxMatrix& a1, std::size_t r);
/* theta of the system read in the shape sh, computed as det G(lambda). */
LambdaPoly theta(const PerturbedSystem& sys, const SystemShape& sh, const Budget& budget);
LambdaPoly theta(const PerturbedSystem& sys, const Budget& budget);
/* Every coefficient certainly vanishes; throws InsufficientOrder when undecidable. */
bool vanishes(const LambdaPoly& p, long certainty);

/* ------------------------------------------------------------- split */

struct SplitBlock {
    PerturbedSystem sys;
    /* Columns of T (parent coordinates) carried by this block. */
    std::vector<std::size_t> columns;
    AlgebraicNumber eigenvalue;
};

struct SplitResult {
    BiMatrix T;
    std::vector<SplitBlock> blocks;
};

/* Block diagonalization along the distinct eigenvalues of A_{0,0}; needs h >= 1. */
SplitResult split(const PerturbedSystem& sys, const Budget& budget, const FactorHints* hints = nullptr);

/* ------------------------------------------------------- eigen shift */

/* coeff x^x_exp eps^eps_exp, or coeff log(x) eps^eps_exp when log is set. */
struct ExpTerm {
    AlgebraicNumber coeff;
    Rational x_exp;
    Rational eps_exp;
    bool log = false;
};

struct ShiftResult {
    PerturbedSystem sys;
    ExpTerm term;
};

/* F = G exp(int gamma xi^-h x^-p dx). */
ShiftResult eigen_shift(const PerturbedSystem& sys, const AlgebraicNumber& gamma, const Budget& budget);

/* ---------------------------------------------------- turning points */

struct TurningPointResult {
    PerturbedSystem sys;
    int s = 1;
    Rational exponent;
    PxMatrix T;
};

TurningPointResult resolve_turning_point(const PerturbedSystem& sys, const Budget& budget);

/* ------------------------------------------------ eps-rank reduction */

struct RankReductionResult {
    BiMatrix R;
    PerturbedSystem sys;
    std::vector<std::pair<long, std::size_t>> h_history;
    /* eps = eps~^ramification was introduced on the way (1 if not). */
    long ramification = 1;
};

RankReductionResult eps_rank_reduce(const PerturbedSystem& sys, const Budget& budget);

/* --------------------------------------------------- exponential order */

struct ExpOrderResult {
    Rational omega;
    LambdaPoly E;
    std::vector<long> support;
    /* val_eps(alpha_i), empty when alpha_i = 0. */
    std::vector<std::optional<long>> vals;
    bool guard = false;
};

ExpOrderResult exp_order_system(const PerturbedSystem& sys, const Budget& budget);

/* Smallest d with d (h - 1 + r/n) >= n; 1 when h + r > n already. */
long katz_degree(long n, long h, std::size_t r);

struct KatzResult {
    long d = 1;
    RankReductionResult reduced;
    bool guard = false;
};

/* eps = eps~^d then eps-rank reduction; d defaults to katz_degree. */
KatzResult katz_ramify(const PerturbedSystem& sys, const Budget& budget, std::optional<long> d = std::nullopt);

/* eps = eps~^d on the raw matrix, recording the ramification. */
PerturbedSystem ramify_eps(const PerturbedSystem& sys, long d);

/* rank A_0(x) in the current shape. */
std::size_t leading_rank(const PerturbedSystem& sys, const Budget& budget);

}  // namespace formred

#endif
