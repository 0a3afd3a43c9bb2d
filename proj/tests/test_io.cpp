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
#include "doctest.h"

#include <random>

#include "formred/errors.hpp"
#include "formred/io.hpp"

using namespace formred;

namespace {

BiSeries mono(const Rational& c, const Rational& e, long k) { return BiSeries::monomial(AlgebraicNumber(c), e, k); }

ParseError parse_error_of(const std::string& text) {
    try {
        parse_system(text);
    } catch (const ParseError& e) {
        return e;
    }
    FAIL("no ParseError for " << text);
    return ParseError("", 0, 0);
}

}  // namespace

TEST_CASE("expressions") {
    const Expr e = parse_expression("(2*x+1)*eps^5");
    CHECK(e.terms().size() == 2);
    const BiSeries f = e.to_bi(1);
    CHECK(f == mono(2, 1, 5) + mono(1, 0, 5));

    CHECK(parse_expression("x^2 - x*x").is_zero());
    CHECK(parse_expression("-x^2").to_bi(1) == mono(-1, 2, 0));
    CHECK(parse_expression("3/4*x/eps").to_bi(1) == mono(ratio(3, 4), 1, -1));
    CHECK(parse_expression("x^(5/2)*eps^(-3/2)").to_bi(2) == mono(1, ratio(5, 2), -3));
    CHECK(parse_expression("(x+eps)^2").terms().size() == 3);
    CHECK(parse_expression("eps^-2").to_bi(1) == mono(1, 0, -2));
    CHECK(parse_expression("xi^2").terms().begin()->first.xi == 2);
    CHECK_THROWS_AS(parse_expression("1/(1+x)"), ParseError);
    CHECK_THROWS_AS(parse_expression("(1+x)^(1/2)"), ParseError);
    CHECK_THROWS_AS(parse_expression("y"), ParseError);
    CHECK_THROWS_AS(parse_expression("x +"), ParseError);
    CHECK_THROWS_AS(parse_expression("x 2"), ParseError);
    CHECK_THROWS_AS(parse_expression("1/0"), ParseError);
}

TEST_CASE("introductory system") {
    const PerturbedSystem sys = parse_system("n=2 h=1 p=0 sigma=0  A=[[0,1],[x^3-eps,0]]");
    BiMatrix m(2, 2);
    m(0, 1) = mono(1, 0, -1);
    m(1, 0) = mono(1, 3, -1) + mono(-1, 0, 0);
    CHECK(sys.M() == m);
    CHECK(sys.s() == 1);
    CHECK(sys.d() == 1);

    const PerturbedSystem raw = parse_system("M=[[0, eps^(-1)], [x^3*eps^(-1) - 1, 0]]");
    CHECK(raw.M() == m);
}

TEST_CASE("xi and p are substituted") {
    const PerturbedSystem sys = parse_system("h=2 p=1 sigma=-1 A=[[0, xi], [x, 0]]");
    BiMatrix m(2, 2);
    // x^-1 (x^-1 eps)^-2 = x eps^-2
    m(0, 1) = mono(1, 0, -1);
    m(1, 0) = mono(1, 2, -2);
    CHECK(sys.M() == m);
}

TEST_CASE("lattices from fractional exponents") {
    const PerturbedSystem sys = parse_system("M=[[x^(1/2)*eps^(-1/3)]]");
    CHECK(sys.s() == 2);
    CHECK(sys.d() == 3);
    BiMatrix m(1, 1);
    m(0, 0) = mono(1, ratio(1, 2), -1);
    CHECK(sys.M() == m);
}

TEST_CASE("dimension errors") {
    CHECK_THROWS_AS(parse_system("A=[[0,1],[0]]"), DimensionMismatch);
    CHECK_THROWS_AS(parse_system("A=[[0,1]]"), DimensionMismatch);
    CHECK_THROWS_AS(parse_system("n=3 A=[[0,1],[1,0]]"), DimensionMismatch);
    CHECK_THROWS_AS(parse_equation("n=3 a=[1, 0, 1]"), DimensionMismatch);
}

TEST_CASE("parse errors carry positions") {
    ParseError e = parse_error_of("n=2\nA=[[0,1],[x^3-,0]]");
    CHECK(e.line == 2);
    CHECK(e.column == 15);

    e = parse_error_of("sigma=1 A=[[0]]");
    CHECK(e.line == 1);
    CHECK(e.column == 7);

    e = parse_error_of("# comment\n  foo=3");
    CHECK(e.line == 2);
    CHECK(e.column == 3);

    CHECK_THROWS_AS(parse_system(""), ParseError);
    CHECK_THROWS_AS(parse_system("h=1 h=2 A=[[0]]"), ParseError);
    CHECK_THROWS_AS(parse_system("A=[[0]] M=[[0]]"), ParseError);
    CHECK_THROWS_AS(parse_system("A=[[0]] $"), ParseError);
    CHECK_THROWS_AS(parse_system("p=1/0 A=[[0]]"), ParseError);
}

TEST_CASE("equations") {
    const ScalarEquation w = parse_equation("sigma=0 D^3 f - (x/xi^2) D^2 f - (1/xi^5) f = 0");
    REQUIRE(w.n() == 3);
    CHECK(w.a[0] == mono(-1, 0, -5));
    CHECK(w.a[1] == BiSeries());
    CHECK(w.a[2] == mono(-1, 1, -2));
    CHECK(w.a[3] == mono(1, 0, 0));
    CHECK(w.sigma == 0);

    const ScalarEquation v = parse_equation("sigma=0 a=[-eps^-5, 0, -x*eps^-2, 1]");
    CHECK(v.a == w.a);

    const ScalarEquation s = parse_equation("a=[x, 2*eps]");
    CHECK(s.a[0] == mono(ratio(1, 2), 1, -1));
    CHECK(s.a[1] == mono(1, 0, 0));

    CHECK(parse_equation("2*x*D f + 3 f = 0").a[0] == mono(ratio(3, 2), -1, 0));
    CHECK_THROWS_AS(parse_equation("a=[1, 1 + x]"), PreconditionError);
    CHECK_THROWS_AS(parse_equation("D^2 f + g = 0"), ParseError);
    CHECK_THROWS_AS(parse_equation("D^2 f + x f = 1"), ParseError);
    CHECK_THROWS_AS(parse_system("a=[1, 1]"), PreconditionError);
}

TEST_CASE("printing") {
    CHECK(format_power("x", 0) == "");
    CHECK(format_power("x", 1) == "x");
    CHECK(format_power("x", 3) == "x^3");
    CHECK(format_power("x", ratio(5, 2)) == "x^(5/2)");
    CHECK(format_power("eps", -1) == "eps^(-1)");

    CHECK(format_term({AlgebraicNumber(-2, 5), ratio(5, 2), -1, false}) == "-2/5*x^(5/2)*eps^(-1)");
    CHECK(format_term({AlgebraicNumber(1), 0, -1, true}) == "log(x)*eps^(-1)");
    CHECK(format_term({AlgebraicNumber(-1), 2, 0, false}) == "-x^2");
    CHECK(format_term({AlgebraicNumber(7), 0, 0, false}) == "7");
    CHECK(format_terms({}) == "0");
    CHECK(format_terms({{AlgebraicNumber(1), 1, -1, false}, {AlgebraicNumber(-3), 0, 0, true}}) ==
          "x*eps^(-1) - 3*log(x)");
}

TEST_CASE("algebraic coefficients and generators") {
    APoly z2p1({AlgebraicNumber(1), AlgebraicNumber(0), AlgebraicNumber(1)});
    auto [tower, r] = adjoin_root(nullptr, z2p1);
    const std::string t = format_term({r * AlgebraicNumber(2), ratio(1, 2), -1, false});
    CHECK(t.find("r1") != std::string::npos);
    const auto g = generators({r, AlgebraicNumber(3)});
    REQUIRE(g.size() == 1);
    CHECK(g[0].first == "r1");
    CHECK(g[0].second.rfind("RootOf(", 0) == 0);
    CHECK(g[0].second.find("index=1") != std::string::npos);
    CHECK(generators({AlgebraicNumber(1)}).empty());
}

TEST_CASE("random exact systems round trip through the printer") {
    std::mt19937_64 rng(20251016);
    std::uniform_int_distribution<int> coef(-9, 9), xe(0, 6), ke(-4, 3), den(1, 3), dim(1, 3), nterms(0, 3);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = static_cast<std::size_t>(dim(rng));
        const int xd = den(rng);
        const int kd = den(rng);
        BiMatrix m(n, n);
        std::vector<Expr> expect(n * n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                for (int t = nterms(rng); t > 0; --t) {
                    const Rational c = ratio(coef(rng), den(rng));
                    const Rational x = ratio(xe(rng), xd);
                    const long k = ke(rng);
                    m(i, j) += mono(c, x, k);
                    expect[i * n + j] = expect[i * n + j] + Expr::monomial(c, x, ratio(k, kd));
                }
        const PerturbedSystem sys(m, xd, kd);
        const std::string text = format_system(sys);
        CAPTURE(text);
        const PerturbedSystem back = parse_system(text);
        CHECK(kd % back.d() == 0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                CHECK((parse_expression(back.M()(i, j).to_string(back.d())) - expect[i * n + j]).is_zero());
                CHECK(back.M()(i, j) == expect[i * n + j].to_bi(back.d()));
            }
    }
}
