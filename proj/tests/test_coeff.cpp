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

#include "formred/coeff.hpp"

using namespace formred;

namespace {

APoly poly(std::initializer_list<long> c) {
    std::vector<AlgebraicNumber> v;
    for (long x : c) v.emplace_back(x);
    return APoly(v);
}

AlgebraicNumber random_element(std::mt19937& rng, const AlgebraicNumber& g, int deg) {
    std::uniform_int_distribution<long> d(-9, 9), den(1, 5);
    AlgebraicNumber acc, p(1L);
    for (int i = 0; i < deg; ++i) {
        acc += AlgebraicNumber(d(rng), den(rng)) * p;
        p *= g;
    }
    return acc;
}

}  // namespace

TEST_CASE("rational arithmetic") {
    CHECK(AlgebraicNumber(1, 2) + AlgebraicNumber(1, 3) == AlgebraicNumber(5, 6));
    CHECK(AlgebraicNumber(3, 4) / AlgebraicNumber(3, 2) == AlgebraicNumber(1, 2));
    CHECK_THROWS_AS(AlgebraicNumber(1L) / AlgebraicNumber(), DivisionByZero);
}

TEST_CASE("imaginary unit") {
    auto [t, i] = adjoin_root(nullptr, poly({1, 0, 1}));
    CHECK(i * i == AlgebraicNumber(-1L));
    CHECK((i * i).is_rational());
    CHECK(i.inverse() == -i);
    CHECK(describe(t).front().second == "RootOf(z^2+1, index=1)");
}

TEST_CASE("cube root of unity") {
    auto [t, z] = adjoin_root(nullptr, poly({1, 1, 1}));
    AlgebraicNumber one(1L);
    // oracle: (1 - z)(2 + z)/3 = (2 - z - z^2)/3 and z^2 = -z - 1 gives (3)/3
    AlgebraicNumber inv = one / (one - z);
    CHECK(inv == (AlgebraicNumber(2L) + z) / AlgebraicNumber(3L));
    CHECK((one - z) * inv == one);
    CHECK(z.pow(3) == one);
    CHECK(z * z == -z - one);
}

TEST_CASE("not squarefree") {
    APoly p = poly({1, 0, 1}) * poly({1, 0, 1});
    try {
        adjoin_root(nullptr, p);
        FAIL("expected NotSquarefree");
    } catch (const NotSquarefree& e) {
        CHECK(e.gcd == poly({1, 0, 1}));
    }
    // z^2 - z is squarefree even though it splits over Q
    CHECK_NOTHROW(adjoin_root(nullptr, poly({0, -1, 1})));
}

TEST_CASE("zero divisor in a reducible quotient") {
    // (z^2+1)(z^2+2) is squarefree but reducible
    auto [t, r] = adjoin_root(nullptr, poly({1, 0, 1}) * poly({2, 0, 1}));
    AlgebraicNumber u = r * r + AlgebraicNumber(1L);
    try {
        (void)u.inverse();
        FAIL("expected ZeroDivisor");
    } catch (const ZeroDivisor& e) {
        CHECK(e.level == t);
        CHECK(e.factor.degree() == 2);
        CHECK(divmod(t->minpoly, e.factor).second.is_zero());
    }
}

TEST_CASE("distinct root partition") {
    auto r1 = distinct_root_partition(poly({0, 0, -1, 1}));  // z^2 (z - 1)
    REQUIRE(r1.size() == 2);
    CHECK(r1[0] == std::make_pair(AlgebraicNumber(0L), 2));
    CHECK(r1[1] == std::make_pair(AlgebraicNumber(1L), 1));

    // oracle by rational root search: z^3 - z = z (z-1)(z+1)
    auto r2 = distinct_root_partition(poly({0, -1, 0, 1}));
    REQUIRE(r2.size() == 3);
    int total = 0;
    for (auto& [root, m] : r2) {
        CHECK(poly({0, -1, 0, 1})(root).is_zero());
        total += m;
    }
    CHECK(total == 3);

    auto r3 = distinct_root_partition(poly({1, 0, 1}) * poly({-2, 1}));
    REQUIRE(r3.size() == 3);
    CHECK(r3[0].first == AlgebraicNumber(2L));
    CHECK(r3[1].first == -r3[2].first);
    CHECK(r3[1].first * r3[1].first == AlgebraicNumber(-1L));

    auto r4 = distinct_root_partition(poly({-2, 0, 0, 1}));
    REQUIRE(r4.size() == 3);
    for (auto& [root, m] : r4) CHECK(poly({-2, 0, 0, 1})(root).is_zero());
    CHECK(r4[0].first != r4[1].first);
    CHECK(r4[1].first != r4[2].first);
    CHECK(r4[0].first != r4[2].first);
}

TEST_CASE("factor hints steer adjunction") {
    FactorHints hints{poly({1, 0, 1})};
    auto roots = distinct_root_partition(poly({1, 0, 1}) * poly({2, 0, 1}), &hints);
    REQUIRE(roots.size() == 4);
    CHECK(roots[0].first.level()->minpoly == poly({1, 0, 1}));
    for (auto& [root, m] : roots) CHECK((poly({1, 0, 1}) * poly({2, 0, 1}))(root).is_zero());
}

TEST_CASE("field axioms on random samples") {
    std::mt19937 rng(7);
    auto [t1, a] = adjoin_root(nullptr, poly({-2, 0, 1}));
    APoly m2({AlgebraicNumber(1L), a, AlgebraicNumber(1L)});  // z^2 + sqrt2 z + 1
    auto [t2, b] = adjoin_root(t1, m2);
    CHECK(m2(b).is_zero());
    for (int trial = 0; trial < 200; ++trial) {
        AlgebraicNumber x = random_element(rng, a, 2) + random_element(rng, a, 2) * b;
        AlgebraicNumber y = random_element(rng, a, 2) + random_element(rng, a, 2) * b;
        AlgebraicNumber z = random_element(rng, a, 2) * b;
        CHECK((x * y) * z == x * (y * z));
        CHECK(x * (y + z) == x * y + x * z);
        CHECK(x + y == y + x);
        if (!x.is_zero()) CHECK(x * x.inverse() == AlgebraicNumber(1L));
    }
}
