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

#include "formred/series.hpp"

using namespace formred;

namespace {

PuiseuxSeries X(const Rational& e, long c = 1) { return PuiseuxSeries::monomial(AlgebraicNumber(c), e); }

BiSeries M(long c, const Rational& xe, long k) { return BiSeries::monomial(AlgebraicNumber(c), xe, k); }

// Exact element with a handful of terms c x^(a/2) eps^k.
BiSeries random_exact(std::mt19937& rng) {
    std::uniform_int_distribution<long> coef(-4, 4), xe(-8, 8), ke(-1, 3), cnt(1, 4);
    BiSeries f;
    long n = cnt(rng);
    for (long i = 0; i < n; ++i) {
        long c = coef(rng);
        if (c == 0) c = 1;
        f = f + M(c, ratio(xe(rng), 2), ke(rng));
    }
    return f;
}

// Same shape but with a truncated eps tail and truncated x-coefficients.
BiSeries random_truncated(std::mt19937& rng) {
    std::uniform_int_distribution<long> xo(1, 8), extra(0, 2);
    BiSeries f = random_exact(rng);
    if (f.exact_zero()) return f;
    std::map<long, PuiseuxSeries> t;
    for (const auto& [k, fk] : f.terms()) t.emplace(k, fk + PuiseuxSeries::big_o(*fk.valuation() + xo(rng)));
    return BiSeries::from_terms(t, f.terms().rbegin()->first + extra(rng), -4);
}

}  // namespace

TEST_CASE("puiseux arithmetic examples") {
    CHECK(X(3).derive() == X(2, 3));
    PuiseuxSeries one_minus_x = PuiseuxSeries(AlgebraicNumber(1L)) - X(1);
    PuiseuxSeries g = one_minus_x.inverse(4);
    for (long e = 0; e <= 3; ++e) CHECK(g.coeff(e) == AlgebraicNumber(1L));
    CHECK(*g.precision() == 4);
    CHECK(g.to_string() == "1 + x + x^2 + x^3 + O(x^4)");
    CHECK(X(Rational(1, 2)).derive() == X(Rational(-1, 2)).scaled(AlgebraicNumber(1, 2)));
    CHECK(X(Rational(1, 2)).derive().to_string() == "1/2*x^(-1/2)");
}

TEST_CASE("puiseux precision propagation") {
    PuiseuxSeries a = X(0) + X(1) + PuiseuxSeries::big_o(3);
    PuiseuxSeries b = X(2) + PuiseuxSeries::big_o(4);
    PuiseuxSeries p = a * b;
    CHECK(*p.precision() == 4);
    CHECK(p.coeff(2) == AlgebraicNumber(1L));
    CHECK(p.coeff(3) == AlgebraicNumber(1L));
    CHECK_THROWS_AS(p.coeff(4), InsufficientOrder);
    CHECK(*(a + b).precision() == 3);
    CHECK((a * PuiseuxSeries()).exact_zero());
    CHECK(X(Rational(1, 3)).lifted(6).ram() == 6);
    CHECK(X(Rational(2, 6)) == X(Rational(1, 3)));
}

TEST_CASE("normal form of the sigma examples") {
    BiSeries a = M(1, 3, 1) + M(1, -8, 2);
    NormalData na = normalize(a);
    CHECK(na.sigma == -11);
    CHECK(na.nu == 1);
    CHECK(na.p == 3 + 11);

    const long K = 10;
    std::map<long, PuiseuxSeries> ft, st;
    ft.emplace(0, X(2));
    st.emplace(0, X(-2));
    for (long k = 1; k <= K; ++k) {
        ft.emplace(k, X(-3 * k));
        st.emplace(k, X(-3 * k));
    }
    BiSeries f = BiSeries::from_terms(ft, K, -3);
    BiSeries s = BiSeries::from_terms(st, K, -3);
    CHECK(normalize(f).sigma == -5);
    CHECK(normalize(s).sigma == -3);
    CHECK(normalize(BiSeries()).sigma == 0);
    CHECK(normalize(BiSeries()).p == 0);
    CHECK(normalize(BiSeries()).zero);
}

TEST_CASE("truncated zeros need certainty") {
    BiSeries f = BiSeries::term(PuiseuxSeries::big_o(1), 0) + M(1, 0, 1);
    CHECK_THROWS_AS(normalize(f, 3), InsufficientOrder);
    BiSeries g = BiSeries::term(PuiseuxSeries::big_o(20), 0) + M(1, 0, 1);
    CHECK(normalize(g, 3).nu == 1);
    CHECK_THROWS_AS(normalize(BiSeries::big_o(2)), InsufficientOrder);
}

TEST_CASE("derivative examples") {
    BiSeries xi = M(1, -3, 1);
    CHECK(xi.derive() == M(-3, -4, 1));
    BiSeries c = M(2, 0, 0) + M(-5, 0, 3) + M(1, 0, -1);
    CHECK(c.derive().exact_zero());
    BiSeries f = M(1, 2, 0) + M(4, 5, 0);
    CHECK(f.derive() == M(2, 1, 0) + M(20, 4, 0));
}

TEST_CASE("rescale to regular") {
    CHECK(rescale_to_regular(M(1, 3, 1)).e == 0);
    BiSeries a = M(1, 3, 1) + M(1, -8, 2);
    RegularRescale ra = rescale_to_regular(a);
    CHECK(ra.e == -11);
    for (const auto& g : ra.g)
        if (!g.known_zero()) CHECK(*g.valuation() >= 0);
    // Substitute eps <- x^(-e) eps directly and check the x-valuations.
    for (const auto& [k, fk] : a.terms()) CHECK(*fk.shift(-ra.e * k).valuation() >= 0);

    std::map<long, PuiseuxSeries> gt;
    for (long k = 1; k <= 8; ++k) gt.emplace(k, X(-3 * k));
    BiSeries g = BiSeries::from_terms(gt, 8, -3);
    RegularRescale rg = rescale_to_regular(g);
    CHECK(rg.e == -3);
    for (const auto& c : rg.g) CHECK(c == X(0));
}

TEST_CASE("ramification") {
    PuiseuxSeries t2 = X(1).lifted(2);
    CHECK(t2.ram() == 2);
    CHECK(t2.vlo() == 2);
    CHECK(BiSeries(X(1)).ramify_x(2).coeff(0).ram() == 2);

    BiSeries e = M(1, 0, 1) + M(1, 1, 2);
    BiSeries er = e.ramify_eps(2);
    CHECK(er.first_index() == 2);
    CHECK(normalize(er).nu == 2 * normalize(e).nu);

    // 1 + xi with xi = x^-3 eps, then eps = et^2: the new xi_t = x^sigma_t et squares back to xi.
    BiSeries f = M(1, 0, 0) + M(1, -3, 1);
    CHECK(normalize(f).sigma == -3);
    NormalData nd = normalize(f.ramify_eps(2));
    CHECK(nd.sigma == Rational(-3, 2));
    BiSeries xit = M(1, 0, 1).shift(nd.sigma, 0);
    CHECK(xit * xit == M(1, -3, 1).ramify_eps(2));
}

TEST_CASE("bivariate inverse") {
    BiSeries f = M(1, 0, 0) - M(1, -2, 1);
    Budget b;
    b.xi_terms = 6;
    b.x_terms = 6;
    BiSeries g = f.inverse(b);
    for (long k = 0; k <= 6; ++k) CHECK(g.coeff(k) == X(-2 * k));
    BiSeries one = f * g;
    CHECK(agree(one, BiSeries(X(0))));
    CHECK(one.has_tail());
}

TEST_CASE("printer") {
    BiSeries f = M(3, Rational(1, 2), 1) - M(1, -2, 0) + BiSeries::big_o(3);
    CHECK(f.to_string() == "-x^(-2) + 3*x^(1/2)*eps + O(eps^3)");
    CHECK(M(1, 0, 1).to_string(2) == "eps^(1/2)");
}

TEST_CASE("ring axioms and Leibniz on random exact samples") {
    std::mt19937 rng(11);
    for (int t = 0; t < 250; ++t) {
        BiSeries f = random_exact(rng), g = random_exact(rng), h = random_exact(rng);
        CHECK((f + g) + h == f + (g + h));
        CHECK(f + g == g + f);
        CHECK((f * g) * h == f * (g * h));
        CHECK(f * g == g * f);
        CHECK(f * (g + h) == f * g + f * h);
        CHECK((f - f).exact_zero());
        CHECK((f * g).derive() == f.derive() * g + f * g.derive());
    }
}

TEST_CASE("Leibniz to guaranteed order on truncated samples") {
    std::mt19937 rng(12);
    for (int t = 0; t < 250; ++t) {
        BiSeries f = random_truncated(rng), g = random_truncated(rng);
        CHECK(agree((f * g).derive(), f.derive() * g + f * g.derive()));
        CHECK(agree((f * g) * f, f * (g * f)));
    }
}

TEST_CASE("valuation laws") {
    std::mt19937 rng(13);
    for (int t = 0; t < 250; ++t) {
        BiSeries f = random_exact(rng), g = random_exact(rng);
        if (f.exact_zero() || g.exact_zero()) continue;
        CHECK(*(f * g).first_index() == *f.first_index() + *g.first_index());
        BiSeries s = f + g;
        if (!s.exact_zero()) CHECK(*s.first_index() >= std::min(*f.first_index(), *g.first_index()));
    }
}

TEST_CASE("normal form invariants") {
    std::mt19937 rng(14);
    std::uniform_int_distribution<long> ad(-6, 6), bd(-2, 2);
    for (int t = 0; t < 250; ++t) {
        BiSeries f = random_truncated(rng);
        if (f.exact_zero()) continue;
        NormalData nd = normalize(f);
        // Half-plane containment with equality at nu.
        for (const auto& [k, fk] : f.terms()) {
            if (fk.known_zero()) continue;
            CHECK(*fk.valuation() >= nd.sigma * k + nd.p);
            CHECK(*xi_coeff(f, k, nd.sigma, nd.p).valuation() >= 0);
        }
        CHECK(*f.coeff(nd.nu).valuation() == nd.sigma * nd.nu + nd.p);
        CHECK(nd.sigma <= 0);
        // Idempotent.
        NormalData again = normalize(f);
        CHECK(again.sigma == nd.sigma);
        CHECK(again.p == nd.p);
        // Monomial translation moves the line rigidly.
        Rational a = ratio(ad(rng), 2);
        long b = bd(rng);
        NormalData sh = normalize(f.shift(a, b));
        CHECK(sh.sigma == nd.sigma);
        CHECK(sh.p == nd.p + a - nd.sigma * b);
        CHECK(sh.nu == nd.nu + b);
        // Round trip through the xi-coefficients.
        std::map<long, PuiseuxSeries> back;
        for (const auto& [k, fk] : f.terms())
            back.emplace(k, xi_coeff(f, k, nd.sigma, nd.p).shift(nd.sigma * k + nd.p));
        BiSeries r = BiSeries::from_terms(back, f.has_tail() ? std::optional<long>(f.last_known()) : std::nullopt,
                                          f.tail_slope());
        CHECK(r == f);
    }
}

TEST_CASE("inverse on random samples") {
    std::mt19937 rng(15);
    Budget b;
    b.xi_terms = 5;
    b.x_terms = 6;
    for (int t = 0; t < 200; ++t) {
        BiSeries f = random_exact(rng);
        if (f.exact_zero()) continue;
        BiSeries one = f * f.inverse(b);
        CHECK(agree(one, BiSeries(X(0))));
    }
}
