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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>
#include <tuple>

#include "formred/errors.hpp"
#include "formred/reduce.hpp"
#include "formred/scalar.hpp"

using namespace formred;

namespace {

using Term = std::tuple<Rational, Rational, long>;  // c * x^e * eps^k (or xi^k)

BiSeries bi(std::initializer_list<Term> terms) {
    BiSeries f;
    for (const auto& [c, e, k] : terms) f = f + BiSeries::monomial(AlgebraicNumber(c), e, k);
    return f;
}

BiMatrix bm(std::initializer_list<std::initializer_list<BiSeries>> rows) {
    BiMatrix m(rows.size(), rows.begin()->size());
    std::size_t i = 0;
    for (const auto& r : rows) {
        std::size_t j = 0;
        for (const BiSeries& v : r) m(i, j++) = v;
        ++i;
    }
    return m;
}

QMatrix q(std::initializer_list<std::initializer_list<long>> rows) {
    QMatrix m(rows.size(), rows.begin()->size());
    std::size_t i = 0;
    for (const auto& r : rows) {
        std::size_t j = 0;
        for (long v : r) m(i, j++) = AlgebraicNumber(v);
        ++i;
    }
    return m;
}

PuiseuxSeries px(std::initializer_list<std::pair<long, Rational>> terms) {
    PuiseuxSeries f;
    for (const auto& [c, e] : terms) f = f + PuiseuxSeries::monomial(AlgebraicNumber(c), e);
    return f;
}

Budget budget(long xi, long x) {
    Budget b;
    b.xi_terms = xi;
    b.x_terms = x;
    return b;
}

const BiSeries kZero;

bool agree_px(const PuiseuxSeries& a, const PuiseuxSeries& b, long upto = 3) {
    return certified_zero(a - b, Rational(upto));
}

bool agree_poly(const LambdaPoly& a, const LambdaPoly& b, long upto = 3) {
    for (int i = 0; i <= std::max(a.degree(), b.degree()); ++i)
        if (!agree_px(a.coeff(i), b.coeff(i), upto)) return false;
    return true;
}

bool agree_mat(const PxMatrix& a, const QMatrix& b, long upto = 3) {
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j)
            if (!agree_px(a(i, j), PuiseuxSeries(b(i, j)), upto)) return false;
    return true;
}

APoly lambda_poly(std::initializer_list<long> c) {
    std::vector<AlgebraicNumber> v;
    for (long a : c) v.emplace_back(a);
    return APoly(std::move(v));
}

QMatrix leading_constant(const PerturbedSystem& sys, const Budget& b) {
    return constant_term(sys.coefficient(0, sys.shape(b.certainty)));
}

/*
   M T - dT - T D, with D block diagonal from the split blocks, read as
   normal-form coefficients of the parent shape; the first `orders` xi-orders
   must vanish up to x^upto.
*/
bool split_residual_vanishes(const PerturbedSystem& sys, const SplitResult& sr, const Budget& b, long upto,
                             long orders) {
    const std::size_t n = sys.n();
    BiMatrix d(n, n);
    for (const SplitBlock& blk : sr.blocks)
        for (std::size_t i = 0; i < blk.columns.size(); ++i)
            for (std::size_t j = 0; j < blk.columns.size(); ++j)
                d(blk.columns[i], blk.columns[j]) = blk.sys.M()(i, j);
    const BiMatrix r = sys.M() * sr.T - derive(sr.T) - sr.T * d;
    const SystemShape sh = sys.shape(b.certainty);
    long last = sh.nu + 64;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (r(i, j).has_tail()) last = std::min(last, r(i, j).last_known());
    if (last < sh.nu + orders - 1) return false;
    for (long k = sh.nu; k < sh.nu + orders; ++k)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (!certified_zero(r(i, j).coeff(k).shift(-sh.sigma * k + sh.p), Rational(upto))) return false;
    return true;
}

// xi_A^2 x^5 dG = {[[0,1,0],[0,0,1],[0,0,1]] + E31 xi + diag(0,-x^4,-2x^4) xi^2} G, sigma = -3.
PerturbedSystem wasow_outer() {
    BiMatrix a = bm({{kZero, bi({{1, 0, 0}}), kZero},
                     {kZero, bi({{-1, 4, 2}}), bi({{1, 0, 0}})},
                     {bi({{1, 0, 1}}), kZero, bi({{1, 0, 0}, {-2, 4, 2}})}});
    return PerturbedSystem::from_normal(2, 5, -3, a);
}

// First subsystem of the split above, known to O(xi^3).
PerturbedSystem wasow_b() {
    BiMatrix a = bm({{bi({{-1, 0, 1}, {1, 0, 2}}) + BiSeries::big_o(3), bi({{1, 0, 0}, {-1, 0, 2}}) + BiSeries::big_o(3)},
                     {bi({{-1, 0, 1}, {1, 0, 2}}) + BiSeries::big_o(3),
                      bi({{-1, 0, 2}, {1, 4, 2}}) + BiSeries::big_o(3)}});
    return PerturbedSystem::from_normal(2, 5, -3, a);
}

PerturbedSystem algoexm() {
    BiMatrix a = bm({{bi({{2, 1, 3}}), bi({{3, 2, 4}}), bi({{2, 1, 2}}), bi({{2, 1, 5}, {1, 0, 5}})},
                     {kZero, bi({{1, 0, 4}}), kZero, kZero},
                     {kZero, kZero, bi({{1, 0, 2}}), kZero},
                     {bi({{-2, 1, 0}}), kZero, kZero, kZero}});
    return PerturbedSystem::from_normal(4, 0, 0, a);
}

PerturbedSystem firststep(long h) {
    BiMatrix a = bm({{bi({{1, 0, 1}}), bi({{-1, 3, 1}}), bi({{1, 0, 1}, {1, 1, 1}}), kZero},
                     {bi({{1, 2, 0}}), bi({{1, 1, 1}}), kZero, bi({{-2, 1, 1}})},
                     {bi({{-1, 1, 0}}), kZero, kZero, bi({{2, 0, 1}})},
                     {kZero, bi({{2, 0, 0}}), kZero, bi({{1, 0, 2}})}});
    return PerturbedSystem::from_normal(h, 0, 0, a);
}

PerturbedSystem seven() {
    auto e = [](long c, long xe, long k) { return bi({{c, xe, k}}); };
    BiMatrix a = bm({{kZero, kZero, e(1, 0, 2), kZero, e(1, 0, 1), e(1, 1, 0), kZero},
                     {e(1, 0, 2), e(1, 0, 3), e(1, 1, 1), kZero, kZero, kZero, kZero},
                     {kZero, kZero, kZero, e(1, 1, 0), kZero, kZero, e(4, 0, 0)},
                     {e(3, 2, 1), kZero, kZero, kZero, e(1, 0, 2), e(1, 1, 1), kZero},
                     {kZero, e(1, 1, 1), kZero, kZero, kZero, e(1, 0, 2), kZero},
                     {kZero, kZero, e(1, 1, 1), e(1, 0, 2), e(1, 0, 2), kZero, kZero},
                     {kZero, e(1, 0, 3), kZero, kZero, kZero, kZero, e(1, 1, 1)}});
    return PerturbedSystem::from_normal(2, 0, 0, a);
}

/* Transformation residual M R - dR - R M~ in the output shape. */
bool gauge_residual_vanishes(const PerturbedSystem& in, const RankReductionResult& rr, const Budget& b, long upto) {
    const BiMatrix r = in.M() * rr.R - derive(rr.R) - rr.R * rr.sys.M();
    const SystemShape sh = in.shape(b.certainty);
    for (std::size_t i = 0; i < r.rows(); ++i)
        for (std::size_t j = 0; j < r.cols(); ++j) {
            for (long k = sh.nu - 8; k <= sh.nu + 2; ++k) {
                if (r(i, j).has_tail() && k > r(i, j).last_known()) break;
                if (!certified_zero(r(i, j).coeff(k), Rational(upto))) return false;
            }
        }
    return true;
}

}  // namespace

/* ------------------------------------------------------------- theta */

TEST_CASE("theta of the nilpotent subsystem is one") {
    const Budget b = budget(6, 8);
    PerturbedSystem sys = wasow_b();
    const SystemShape sh = sys.shape(b.certainty);
    CHECK(sh.h == 2);
    CHECK(sh.sigma == -3);
    LambdaPoly th = theta(sys, b);
    CHECK(agree_poly(th, LambdaPoly::constant(PuiseuxSeries(AlgebraicNumber(1L)))));
    CHECK(agree_poly(th, theta_direct(sys.coefficient(0, sh), sys.coefficient(1, sh), 1)));
    CHECK_FALSE(vanishes(th, b.certainty));
}

TEST_CASE("theta of the worked order-5 irreducible system") {
    ScalarEquation eq = ScalarEquation::make(
        {bi({{-1, 2, -2}}), bi({{-3, 4, -4}, {1, 4, -2}}), bi({{1, 3, -3}, {1, 0, 0}}), bi({{2, 3, -1}}),
         bi({{1, 4, -3}, {1, 1, 0}}), bi({{1, 0, 0}})},
        Rational(-1));
    IrreducibleSystem irr = scalar_to_irreducible_system(eq);
    const Budget b = budget(8, 8);
    LambdaPoly th = theta(irr.system, irr.shape, b);
    LambdaPoly expect = LambdaPoly::monomial(px({{-1, 2}}), 4);
    CHECK(agree_poly(th, expect));
    PxMatrix a0 = irr.system.coefficient(0, irr.shape), a1 = irr.system.coefficient(1, irr.shape);
    CHECK(agree_poly(theta_direct(a0, a1, 1), expect));
}

TEST_CASE("theta vanishes for reducible systems") {
    const Budget b = budget(8, 8);
    CHECK(vanishes(theta(algoexm(), b), b.certainty));
    CHECK(vanishes(theta(firststep(2), b), b.certainty));
}

TEST_CASE("G(lambda) of the first-step example") {
    const Budget b = budget(8, 8);
    PerturbedSystem sys = firststep(2);
    const SystemShape sh = sys.shape(b.certainty);
    GLambda g = g_lambda(sys.coefficient(0, sh), sys.coefficient(1, sh), b.certainty, b.x_terms);
    CHECK(g.r == 2);
    CHECK(vanishes(det(g.G), b.certainty));
}

TEST_CASE("det G equals theta on random pencils") {
    std::mt19937 rng(7);
    std::uniform_int_distribution<long> c(-3, 3), dim(2, 4);
    int checked = 0;
    for (int t = 0; t < 200; ++t) {
        const std::size_t n = static_cast<std::size_t>(dim(rng));
        std::uniform_int_distribution<std::size_t> rk(1, n - 1);
        const std::size_t r = rk(rng);
        auto poly = [&]() { return px({{c(rng), 0}, {c(rng), 1}}); };
        PxMatrix bb(n, r), cc(r, n), a1(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < r; ++j) bb(i, j) = poly();
        for (std::size_t i = 0; i < r; ++i)
            for (std::size_t j = 0; j < n; ++j) cc(i, j) = poly();
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) a1(i, j) = poly();
        PxMatrix a0 = bb * cc;
        GLambda g = g_lambda(a0, a1, 3, 10);
        CHECK(agree_poly(det(g.G), theta_direct(a0, a1, g.r), 4));
        ++checked;
    }
    CHECK(checked == 200);
}

/* ------------------------------------------------------------- split */

TEST_CASE("split of the introductory inner system") {
    // xi x^(3/2) dG = {[[0,1],[1,0]] + xi [[0,0],[-1,-3/2 x^(1/2)]]} G, sigma = -3.
    BiMatrix a = bm({{kZero, bi({{1, 0, 0}})}, {bi({{1, 0, 0}, {-1, 0, 1}}), bi({{Rational(-3, 2), Rational(1, 2), 1}})}});
    PerturbedSystem sys = PerturbedSystem::from_normal(1, Rational(3, 2), -3, a);
    const Budget b = budget(6, 8);
    SplitResult sr = split(sys, b);
    REQUIRE(sr.blocks.size() == 2);
    const SystemShape sh = sys.shape(b.certainty);
    CHECK(agree_mat(sr.blocks[0].sys.coefficient(0, sh), q({{-1}})));
    CHECK(agree_mat(sr.blocks[1].sys.coefficient(0, sh), q({{1}})));
    // Columns of T at xi = 0 are eigenvectors of [[0,1],[1,0]].
    PxMatrix t0(2, 2);
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j) t0(i, j) = sr.T(i, j).coeff(0);
    QMatrix t00 = constant_term(t0);
    QMatrix lam(2, 2);
    lam(0, 0) = AlgebraicNumber(-1L);
    lam(1, 1) = AlgebraicNumber(1L);
    CHECK(q({{0, 1}, {1, 0}}) * t00 == t00 * lam);
    CHECK(rank(t00) == 2);
    CHECK(split_residual_vanishes(sys, sr, b, 3, 3));
}

TEST_CASE("split of the outer 3x3 system") {
    const Budget b = budget(6, 10);
    PerturbedSystem sys = wasow_outer();
    const SystemShape sh = sys.shape(b.certainty);
    CHECK(sh.h == 2);
    CHECK(sh.p == 5);
    SplitResult sr = split(sys, b);
    REQUIRE(sr.blocks.size() == 2);
    CHECK(sr.blocks[0].columns.size() == 2);
    PxMatrix t0(3, 3), t1(3, 3);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) {
            t0(i, j) = xi_coeff(sr.T(i, j), 0, sh.sigma, 0);
            t1(i, j) = xi_coeff(sr.T(i, j), 1, sh.sigma, 0);
        }
    CHECK(agree_mat(t0, q({{1, 0, 1}, {0, 1, 1}, {0, 0, 1}})));
    // The third column solves J X - X = -P^{-1} A_1 P on the off-diagonal block.
    CHECK(agree_mat(t1, q({{-1, -1, -2}, {-1, -1, -1}, {-1, -1, 0}})));

    const PerturbedSystem& bsys = sr.blocks[0].sys;
    CHECK(agree_mat(bsys.coefficient(0, sh), q({{0, 1}, {0, 0}})));
    CHECK(agree_mat(bsys.coefficient(1, sh), q({{-1, 0}, {-1, 0}})));
    PxMatrix b2 = bsys.coefficient(2, sh);
    CHECK(agree_px(b2(0, 0), px({{1, 0}})));
    CHECK(agree_px(b2(0, 1), px({{1, 0}})));
    CHECK(agree_px(b2(1, 0), px({{1, 0}})));
    CHECK(agree_px(b2(1, 1), px({{1, 0}, {-1, 4}}), 6));
    const PerturbedSystem& csys = sr.blocks[1].sys;
    CHECK(agree_px(csys.coefficient(0, sh)(0, 0), px({{1, 0}})));
    CHECK(agree_px(csys.coefficient(1, sh)(0, 0), px({{1, 0}})));
    CHECK(agree_px(csys.coefficient(2, sh)(0, 0), px({{-2, 0}, {-2, 4}}), 6));
    // det T = 1 + O(xi^2), so the xi^2 traces add up to that of A_2 = diag(0, -x^4, -2x^4).
    CHECK(agree_px(b2(0, 0) + b2(1, 1) + csys.coefficient(2, sh)(0, 0), px({{-3, 4}}), 6));
    CHECK(split_residual_vanishes(sys, sr, b, 3, 3));
}

TEST_CASE("split of an already block-diagonal system is exact") {
    BiMatrix a = bm({{bi({{1, 0, 0}, {1, 1, 1}}), kZero}, {kZero, bi({{2, 0, 0}, {1, 2, 1}})}});
    PerturbedSystem sys = PerturbedSystem::from_normal(1, 0, 0, a);
    SplitResult sr = split(sys, budget(4, 4));
    CHECK(sr.T == bi_identity(2));
    REQUIRE(sr.blocks.size() == 2);
    CHECK(sr.blocks[0].sys.M()(0, 0) == sys.M()(0, 0));
    CHECK(sr.blocks[1].sys.M()(0, 0) == sys.M()(1, 1));
}

TEST_CASE("split rejects a single eigenvalue") {
    BiMatrix a = bm({{bi({{1, 0, 0}}), bi({{1, 0, 1}})}, {bi({{1, 1, 1}}), bi({{1, 0, 0}})}});
    CHECK_THROWS_AS(split(PerturbedSystem::from_normal(1, 0, 0, a), budget(4, 4)), SpectraOverlap);
}

TEST_CASE("split residual on random systems") {
    std::mt19937 rng(11);
    std::uniform_int_distribution<long> c(-2, 2);
    const Budget b = budget(5, 6);
    int checked = 0;
    for (int t = 0; t < 30; ++t) {
        BiMatrix a(3, 3);
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t j = 0; j < 3; ++j) {
                a(i, j) = bi({{c(rng), 0, 1}, {c(rng), 1, 1}, {c(rng), 1, 2}});
                if (i == j) a(i, j) = a(i, j) + bi({{static_cast<long>(i == 2 ? 1 : 0), 0, 0}});
                if (i < j) a(i, j) = a(i, j) + bi({{c(rng), 0, 0}, {c(rng), 1, 0}});
            }
        PerturbedSystem sys = PerturbedSystem::from_normal(1 + t % 2, t % 3, 0, a);
        SplitResult sr = split(sys, b);
        REQUIRE(sr.blocks.size() == 2);
        CHECK(split_residual_vanishes(sys, sr, b, 2, 3));
        const SystemShape sh = sys.shape(b.certainty);
        QMatrix d00(3, 3);
        for (const SplitBlock& blk : sr.blocks) {
            QMatrix l = constant_term(blk.sys.coefficient(0, sh));
            for (std::size_t i = 0; i < blk.columns.size(); ++i)
                for (std::size_t j = 0; j < blk.columns.size(); ++j) d00(blk.columns[i], blk.columns[j]) = l(i, j);
        }
        QMatrix t00 = constant_term(eps_coeff(sr.T, 0));
        CHECK(leading_constant(sys, b) * t00 == t00 * d00);
        ++checked;
    }
    CHECK(checked == 30);
}

/* ------------------------------------------------------- eigen shift */

TEST_CASE("eigenvalue shift") {
    const Budget b = budget(6, 8);
    PerturbedSystem c = PerturbedSystem::from_normal(2, 5, -3, bm({{bi({{1, 0, 0}, {1, 0, 1}, {1, 0, 2}, {2, 4, 2}})}}));
    ShiftResult r = eigen_shift(c, AlgebraicNumber(1L), b);
    CHECK(r.term.coeff == AlgebraicNumber(1, 2));
    CHECK(r.term.x_exp == 2);
    CHECK(r.term.eps_exp == -2);
    CHECK_FALSE(r.term.log);
    CHECK(r.sys.M()(0, 0).coeff(-2).exact_zero());

    ShiftResult same = eigen_shift(c, AlgebraicNumber(0L), b);
    CHECK(same.sys.M() == c.M());

    PerturbedSystem diag = PerturbedSystem::from_normal(1, 0, 0, bm({{bi({{3, 0, 0}}), kZero}, {kZero, bi({{3, 0, 0}})}}));
    ShiftResult z = eigen_shift(diag, AlgebraicNumber(3L), b);
    CHECK(z.sys.M().is_zero());
    CHECK(z.term.x_exp == 1);
    CHECK(z.term.coeff == AlgebraicNumber(3L));

    // p = 1 with sigma = 0 integrates to a logarithm.
    PerturbedSystem lg = PerturbedSystem::from_normal(1, 1, 0, bm({{bi({{2, 0, 0}})}}));
    ShiftResult l = eigen_shift(lg, AlgebraicNumber(2L), b);
    CHECK(l.term.log);
    CHECK(l.term.eps_exp == -1);
}

/* ---------------------------------------------------- turning points */

TEST_CASE("turning point of the matrix Weber equation") {
    const Budget b = budget(6, 8);
    PerturbedSystem sys = PerturbedSystem::from_normal(1, 0, 0, bm({{kZero, bi({{1, 0, 0}})}, {bi({{1, 2, 0}}), kZero}}));
    TurningPointResult tp = resolve_turning_point(sys, b);
    const SystemShape sh = tp.sys.shape(b.certainty);
    CHECK(sh.sigma == -2);
    CHECK(sh.p == 1);
    CHECK(tp.s == 1);
    CHECK(tp.exponent == 1);
    CHECK(char_poly(leading_constant(tp.sys, b)) == lambda_poly({-1, 0, 1}));
}

TEST_CASE("turning point needing a half-integer exponent") {
    const Budget b = budget(6, 8);
    BiMatrix a = bm({{kZero, bi({{1, 0, 0}}), kZero}, {kZero, kZero, bi({{1, 0, 0}})}, {bi({{1, 0, 1}}), bi({{1, 1, 0}}), kZero}});
    PerturbedSystem sys = PerturbedSystem::from_normal(2, 0, 0, a);
    TurningPointResult tp = resolve_turning_point(sys, b);
    const SystemShape sh = tp.sys.shape(b.certainty);
    CHECK(sh.sigma == Rational(-3, 2));
    CHECK(sh.p == Rational(5, 2));
    CHECK(tp.exponent == Rational(1, 2));
    CHECK(char_poly(leading_constant(tp.sys, b)) == lambda_poly({0, -1, 0, 1}));
}

TEST_CASE("turning point of the 3x3 system") {
    const Budget b = budget(6, 8);
    BiMatrix a = bm({{kZero, bi({{1, 0, 0}}), kZero}, {kZero, kZero, bi({{1, 0, 0}})}, {bi({{1, 0, 1}}), kZero, bi({{1, 1, 0}})}});
    PerturbedSystem sys = PerturbedSystem::from_normal(2, 0, 0, a);
    TurningPointResult tp = resolve_turning_point(sys, b);
    const SystemShape sh = tp.sys.shape(b.certainty);
    CHECK(sh.sigma == -3);
    CHECK(sh.p == 5);
    CHECK(char_poly(leading_constant(tp.sys, b)) == lambda_poly({0, 0, -1, 1}));
}

TEST_CASE("turning point preconditions") {
    const Budget b = budget(6, 8);
    PerturbedSystem ok = PerturbedSystem::from_normal(1, 0, 0, bm({{bi({{1, 0, 0}}), kZero}, {kZero, bi({{-1, 0, 0}})}}));
    CHECK_THROWS_AS(resolve_turning_point(ok, b), PreconditionError);
    PerturbedSystem nil = PerturbedSystem::from_normal(1, 0, 0, bm({{kZero, bi({{1, 1, 0}})}, {bi({{1, 0, 1}}), kZero}}));
    CHECK_THROWS_AS(resolve_turning_point(nil, b), PreconditionError);
}

/* ------------------------------------------------ eps-rank reduction */

TEST_CASE("eps-rank reduction of the 4x4 example") {
    const Budget b = budget(10, 8);
    PerturbedSystem sys = algoexm();
    RankReductionResult rr = eps_rank_reduce(sys, b);
    const SystemShape sh = rr.sys.shape(b.certainty);
    CHECK(sh.h == 2);
    CHECK(leading_rank(rr.sys, b) == 2);
    CHECK_FALSE(vanishes(theta(rr.sys, b), b.certainty));
    CHECK(rr.h_history.front().first == 4);
    CHECK(rr.ramification == 1);
    for (std::size_t i = 1; i < rr.h_history.size(); ++i) {
        const auto& [h0, r0] = rr.h_history[i - 1];
        const auto& [h1, r1] = rr.h_history[i];
        CHECK(h1 * 4 + static_cast<long>(r1) < h0 * 4 + static_cast<long>(r0));
    }
    CHECK(gauge_residual_vanishes(sys, rr, b, 2));
}

TEST_CASE("first sweep of the first-step example drops the rank") {
    const Budget b = budget(10, 8);
    RankReductionResult rr = eps_rank_reduce(firststep(3), b);
    REQUIRE(rr.h_history.size() >= 2);
    CHECK(rr.h_history[0] == std::make_pair(3L, std::size_t{2}));
    CHECK(rr.h_history[1] == std::make_pair(3L, std::size_t{1}));
}

TEST_CASE("irreducible system is left alone") {
    const Budget b = budget(6, 8);
    PerturbedSystem sys = wasow_b();
    RankReductionResult rr = eps_rank_reduce(sys, b);
    CHECK(rr.R == bi_identity(2));
    CHECK(rr.h_history.size() == 1);
    CHECK(rr.sys.shape(b.certainty).h == 2);
}

/* --------------------------------------------------- exponential order */

TEST_CASE("exponential order of the nilpotent subsystem") {
    const Budget b = budget(6, 8);
    ExpOrderResult eo = exp_order_system(wasow_b(), b);
    CHECK(eo.omega == Rational(3, 2));
    CHECK(eo.support == std::vector<long>{0, 2});
    CHECK(agree_px(eo.E.coeff(2), px({{1, 0}})));
    CHECK(agree_px(eo.E.coeff(0), px({{1, -1}})));
    CHECK(eo.E.degree() == 2);
    CHECK(eo.guard);
}

TEST_CASE("exponential order of the second-order example") {
    const Budget b = budget(6, 8);
    BiMatrix a = bm({{bi({{3, 5, 2}}), bi({{1, 6, 1}})}, {bi({{1, 0, 0}, {1, 0, 1}}), kZero}});
    PerturbedSystem sys = PerturbedSystem::from_normal(2, 6, -3, a);
    ExpOrderResult eo = exp_order_system(sys, b);
    CHECK(eo.omega == Rational(3, 2));
    CHECK(agree_px(eo.E.coeff(2), px({{1, 0}})));
    CHECK(agree_px(eo.E.coeff(0), px({{-1, 3}})));
    CHECK(eo.E.coeff(1).exact_zero());
}

TEST_CASE("exponential order and ramification of the 7x7 example") {
    const Budget b = budget(30, 8);
    PerturbedSystem sys = seven();
    CHECK(sys.shape(b.certainty).h == 2);
    CHECK(leading_rank(sys, b) == 2);
    ExpOrderResult eo = exp_order_system(sys, b);
    CHECK(eo.omega == Rational(3, 2));
    CHECK_FALSE(eo.guard);
    CHECK(katz_degree(7, 2, 2) == 6);

    KatzResult k7 = katz_ramify(sys, b, 7L);
    CHECK(k7.d == 7);
    CHECK(k7.reduced.sys.shape(b.certainty).h == 11);
    CHECK(leading_rank(k7.reduced.sys, b) == 2);
    CHECK(k7.guard);
    ExpOrderResult e7 = exp_order_system(k7.reduced.sys, b);
    CHECK(e7.omega == Rational(21, 2));

    KatzResult k3 = katz_ramify(sys, b, 3L);
    CHECK(k3.reduced.sys.shape(b.certainty).h == 5);
    CHECK(leading_rank(k3.reduced.sys, b) == 2);
    CHECK_FALSE(k3.guard);
}

TEST_CASE("katz degree") {
    CHECK(katz_degree(2, 2, 1) == 1);
    CHECK(katz_degree(3, 1, 1) == 9);
    CHECK(katz_degree(4, 2, 1) == 4);
    CHECK_THROWS_AS(katz_degree(3, 1, 0), PreconditionError);
}

TEST_CASE("omega of companion systems matches the scalar formula") {
    std::mt19937 rng(5);
    std::uniform_int_distribution<long> v(-8, 2), c(1, 4), xe(0, 2), dim(2, 4);
    const Budget b = budget(6, 6);
    for (int t = 0; t < 200; ++t) {
        const long n = dim(rng);
        std::vector<BiSeries> a;
        for (long i = 0; i < n; ++i) {
            const long k = v(rng);
            a.push_back(bi({{c(rng), xe(rng), k}, {c(rng), xe(rng), k + 1}}));
        }
        a.push_back(bi({{1, 0, 0}}));
        ScalarEquation eq = ScalarEquation::make(std::move(a), Rational(0));
        CHECK(exp_order_system(companion_system(eq), b).omega == exp_order_scalar(eq));
    }
}
