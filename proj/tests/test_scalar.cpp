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

#include <random>
#include <set>
#include <tuple>

#include "formred/scalar.hpp"

using namespace formred;

namespace {

using Term = std::tuple<long, Rational, long>;  // c * x^e * eps^k

BiSeries bi(std::initializer_list<Term> terms) {
    BiSeries f;
    for (const auto& [c, e, k] : terms) f = f + BiSeries::monomial(AlgebraicNumber(c), e, k);
    return f;
}

BiSeries unit() { return bi({{1, 0, 0}}); }

// Worked order-5 example with sigma = -1, coefficients rewritten from xi to raw eps.
ScalarEquation worked_equation() {
    return ScalarEquation::make({bi({{-1, 2, -2}}), bi({{-3, 4, -4}, {1, 4, -2}}), bi({{1, 3, -3}, {1, 0, 0}}),
                                 bi({{2, 3, -1}}), bi({{1, 4, -3}, {1, 1, 0}}), unit()},
                                Rational(-1));
}

ScalarEquation wasow_equation() {
    return ScalarEquation::make({bi({{-1, 0, -5}}), BiSeries(), bi({{-1, 1, -2}}), unit()}, Rational(0));
}

// Random equation with prescribed eps-valuations; a_i = 0 when v[i] is empty.
ScalarEquation random_equation(std::mt19937& rng, long n, long vmin) {
    std::uniform_int_distribution<long> v(vmin, 2), c(1, 4), xe(0, 2), coin(0, 5);
    std::vector<BiSeries> a;
    for (long i = 0; i < n; ++i) {
        if (coin(rng) == 0) {
            a.emplace_back();
            continue;
        }
        long k = v(rng);
        a.push_back(bi({{c(rng), xe(rng), k}, {c(rng), xe(rng), k + 1}}));
    }
    a.push_back(unit());
    return ScalarEquation::make(std::move(a), Rational(0));
}

}  // namespace

TEST_CASE("eps-polygon of the three-dimensional turning-point equation") {
    ScalarEquation eq = wasow_equation();
    EpsPolygonScalar p = eps_polygon(eq);
    REQUIRE(p.edges.size() == 2);
    CHECK(p.edges[0].slope == ratio(3, 2));
    CHECK(p.edges[1].slope == 2);
    CHECK(to_string(p.edges[0].E) == "x*X^2 + 1");
    CHECK(to_string(p.edges[1].E) == "X^3 - x*X^2");
    CHECK(exp_order_scalar(eq) == 2);

    // X = x is a root of E_2 and X = i x^(-1/2) of E_1.
    PuiseuxSeries x = PuiseuxSeries::monomial(AlgebraicNumber(1L), 1);
    const auto& e2 = p.edges[1].E;
    CHECK((e2.coeff(3) * x * x * x + e2.coeff(2) * x * x).known_zero());
    auto [tw, i] = adjoin_root(nullptr, APoly({AlgebraicNumber(1L), AlgebraicNumber(0L), AlgebraicNumber(1L)}));
    PuiseuxSeries r = PuiseuxSeries::monomial(i, ratio(-1, 2));
    const auto& e1 = p.edges[0].E;
    CHECK((e1.coeff(2) * r * r + e1.coeff(0)).known_zero());
}

TEST_CASE("eps-polygon with nonnegative valuations") {
    ScalarEquation eq = ScalarEquation::make({bi({{1, 0, 0}}), bi({{1, 1, 0}}), unit()}, Rational(0));
    EpsPolygonScalar p = eps_polygon(eq);
    REQUIRE(p.edges.size() == 1);
    CHECK(p.edges[0].slope == 0);
    CHECK(p.edges[0].support == std::vector<long>{0, 1, 2});
    CHECK(exp_order_scalar(eq) == 0);
    ScalarEquation pos = ScalarEquation::make({bi({{1, 0, 1}}), unit()}, Rational(0));
    CHECK(exp_order_scalar(pos) == 0);
    CHECK(eps_polygon(pos).edges.empty());
}

TEST_CASE("eps-polygon agrees with a brute-force hull") {
    std::mt19937 rng(31);
    for (int t = 0; t < 250; ++t) {
        ScalarEquation eq = random_equation(rng, 4, -8);
        EpsPolygonScalar p = eps_polygon(eq);
        std::set<std::pair<long, long>> expect, got;
        const auto& pts = p.points;
        for (const auto& [u0, v0] : pts)
            for (const auto& [u1, v1] : pts) {
                if (u1 <= u0 || v1 < v0) continue;
                bool below = true, left_end = true, right_end = true;
                for (const auto& [i, v] : pts) {
                    long lhs = (v - v0) * (u1 - u0), rhs = (v1 - v0) * (i - u0);
                    if (lhs < rhs) below = false;
                    if (lhs == rhs && i < u0) left_end = false;
                    if (lhs == rhs && i > u1) right_end = false;
                }
                if (below && left_end && right_end) expect.emplace(u0, u1);
            }
        for (const auto& e : p.edges) got.emplace(e.support.front(), e.support.back());
        CHECK(got == expect);
        for (std::size_t e = 1; e < p.edges.size(); ++e) CHECK(p.edges[e - 1].slope < p.edges[e].slope);
        Rational top = p.edges.empty() ? Rational(0) : p.edges.back().slope;
        CHECK(exp_order_scalar(eq) == top);
    }
}

TEST_CASE("scalar Moser invariant of the worked equation") {
    ScalarEquation eq = worked_equation();
    ScalarMoser m = scalar_moser(eq);
    CHECK(m.kappa == 3);
    CHECK(m.nu == 1);
    CHECK(m.mu == ratio(16, 5));
    CHECK(m.gamma == std::vector<long>{-11, -9, -7, -5, -3});
}

TEST_CASE("irreducible system of the worked equation") {
    ScalarEquation eq = worked_equation();
    IrreducibleSystem irr = scalar_to_irreducible_system(eq);
    CHECK(irr.i0 == 4);
    CHECK(irr.shape.h == 3);
    CHECK(irr.shape.p == 1);
    CHECK(irr.shape.sigma == -1);
    // Entries as c x^e xi^k.
    BiMatrix expect(5, 5);
    for (std::size_t i = 0; i < 4; ++i) {
        expect(i, i) = bi({{11 - 2 * static_cast<long>(i), 0, 3}});
        expect(i, i + 1) = bi({{1, 1, 1}});
    }
    expect(4, 0) = bi({{1, 1, 9}});
    expect(4, 1) = bi({{3, 1, 5}, {-1, 3, 7}});
    expect(4, 2) = bi({{-1, 1, 4}, {-1, 1, 7}});
    expect(4, 3) = bi({{-2, 3, 4}});
    expect(4, 4) = bi({{-1, 2, 0}, {-1, 2, 3}, {3, 0, 3}});
    CHECK(irr.system.normal_matrix(irr.shape) == expect);
}

TEST_CASE("first-order equation") {
    ScalarEquation eq = ScalarEquation::make({bi({{2, 1, 1}}), unit()}, Rational(0));
    ScalarMoser m = scalar_moser(eq);
    CHECK(m.kappa == 0);
    IrreducibleSystem irr = scalar_to_irreducible_system(eq);
    CHECK(irr.system.n() == 1);
}

TEST_CASE("Moser invariant minimality and sandwich on random equations") {
    std::mt19937 rng(32);
    for (int t = 0; t < 250; ++t) {
        long n = 2 + t % 3;
        ScalarEquation eq = random_equation(rng, n, -9);
        ScalarMoser m = scalar_moser(eq);
        // kappa is the least natural number keeping the line V = kappa (U - n) under the points.
        bool ok = true, tight = m.kappa == 0;
        for (long i = 0; i < n; ++i)
            if (auto v = eq.val(i)) {
                ok = ok && *v + (n - i) * m.kappa >= 0;
                tight = tight || *v + (n - i) * (m.kappa - 1) < 0;
            }
        CHECK(ok);
        CHECK(tight);
        // gamma is dominated by the points and touches one at some i <= n - nu.
        bool touch = m.nu == 0;
        for (long i = 0; i < n; ++i) {
            auto v = eq.val(i);
            if (!v) continue;
            CHECK(m.gamma[static_cast<std::size_t>(i)] <= *v);
            if (i <= n - m.nu && m.gamma[static_cast<std::size_t>(i)] == *v) touch = true;
        }
        if (m.kappa >= 1) CHECK(touch);
        Rational w = exp_order_scalar(eq);
        CHECK(Rational(m.kappa - 1) + ratio(m.nu, n) <= w);
        CHECK(w <= m.kappa);
        if (m.kappa >= 1) {
            IrreducibleSystem irr = scalar_to_irreducible_system(eq);
            CHECK(irr.i0 == n - m.nu);
        }
    }
}

TEST_CASE("companion system") {
    ScalarEquation eq = wasow_equation();
    PerturbedSystem c = companion_system(eq);
    CHECK(c.n() == 3);
    CHECK(c.M()(2, 0) == bi({{1, 0, -5}}));
    CHECK(c.M()(2, 2) == bi({{1, 1, -2}}));
    CHECK(c.M()(0, 1) == unit());
}
