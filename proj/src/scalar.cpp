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
#include "formred/scalar.hpp"

#include <algorithm>

#include "formred/errors.hpp"

namespace formred {

namespace {

BiSeries xi_power(const Rational& sigma, long k) { return BiSeries::monomial(AlgebraicNumber(1L), sigma * k, k); }

BiSeries one() { return BiSeries::monomial(AlgebraicNumber(1L), 0, 0); }

}  // namespace

ScalarEquation ScalarEquation::make(std::vector<BiSeries> a, std::optional<Rational> sigma, long certainty) {
    if (a.empty()) throw PreconditionError("scalar equation has no coefficients");
    if (a.back() != one()) throw PreconditionError("leading coefficient must be 1");
    ScalarEquation eq;
    eq.a = std::move(a);
    if (sigma) {
        if (*sigma > 0) throw PreconditionError("sigma must be nonpositive");
        eq.sigma = *sigma;
    } else {
        eq.sigma = companion_system(eq).shape(certainty).sigma;
    }
    return eq;
}

std::optional<long> ScalarEquation::val(long i) const {
    const BiSeries& f = a[static_cast<std::size_t>(i)];
    if (f.exact_zero()) return std::nullopt;
    std::optional<long> k = f.first_index();
    if (!k) throw InsufficientOrder("valuation of a truncated zero coefficient");
    return k;
}

PerturbedSystem companion_system(const ScalarEquation& eq) {
    std::size_t n = static_cast<std::size_t>(eq.n());
    BiMatrix m(n, n);
    for (std::size_t i = 0; i + 1 < n; ++i) m(i, i + 1) = one();
    for (std::size_t j = 0; j < n; ++j) m(n - 1, j) = -eq.a[j];
    return PerturbedSystem(m);
}

EpsPolygonScalar eps_polygon(const ScalarEquation& eq) {
    EpsPolygonScalar poly;
    for (long i = 0; i <= eq.n(); ++i)
        if (auto v = eq.val(i)) poly.points.emplace_back(i, *v);

    long vmin = poly.points.front().second;
    for (const auto& pt : poly.points) vmin = std::min(vmin, pt.second);
    std::size_t start = 0;
    while (poly.points[start].second != vmin) ++start;

    // Lower convex hull of the points from the leftmost minimum onward.
    std::vector<std::pair<long, long>> hull;
    for (std::size_t t = start; t < poly.points.size(); ++t) {
        const auto& c = poly.points[t];
        while (hull.size() >= 2) {
            const auto& a = hull[hull.size() - 2];
            const auto& b = hull.back();
            // Drop b when it lies on or above the segment a-c.
            if ((b.second - a.second) * (c.first - a.first) >= (c.second - a.second) * (b.first - a.first))
                hull.pop_back();
            else
                break;
        }
        hull.push_back(c);
    }

    for (std::size_t e = 0; e + 1 < hull.size(); ++e) {
        PolygonEdge edge;
        auto [u0, v0] = hull[e];
        auto [u1, v1] = hull[e + 1];
        edge.slope = ratio(v1 - v0, u1 - u0);
        std::vector<PuiseuxSeries> c(static_cast<std::size_t>(u1) + 1);
        for (const auto& [i, v] : poly.points) {
            if (i < u0 || i > u1 || (v - v0) * (u1 - u0) != (v1 - v0) * (i - u0)) continue;
            edge.support.push_back(i);
            c[static_cast<std::size_t>(i)] = xi_coeff(eq.a[static_cast<std::size_t>(i)], v, eq.sigma, 0);
        }
        edge.E = Poly<PuiseuxSeries>(std::move(c));
        const PuiseuxSeries& top = edge.E.leading();
        if (!top.known_zero() && top.leading().is_rational() && top.leading().rational() < 0) edge.E = -edge.E;
        poly.edges.push_back(std::move(edge));
    }
    return poly;
}

Rational exp_order_scalar(const ScalarEquation& eq) {
    Rational w = 0;
    for (long i = 0; i < eq.n(); ++i)
        if (auto v = eq.val(i)) w = std::max(w, ratio(-*v, eq.n() - i));
    return w;
}

ScalarMoser scalar_moser(const ScalarEquation& eq) {
    long n = eq.n();
    ScalarMoser r{0, 0, 0, {}};
    for (long i = 0; i < n; ++i)
        if (auto v = eq.val(i)) r.kappa = std::max(r.kappa, to_long(ceil_q(ratio(-*v, n - i))));
    for (long i = 0; i <= n; ++i)
        if (auto v = eq.val(i)) r.nu = std::max(r.nu, (i - n) * (r.kappa - 1) - *v);
    r.mu = Rational(r.kappa) + ratio(r.nu, n);
    for (long i = 0; i < n; ++i) r.gamma.push_back(std::max(r.kappa * (i - n), (r.kappa - 1) * (i - n) - r.nu));
    return r;
}

IrreducibleSystem scalar_to_irreducible_system(const ScalarEquation& eq, long certainty, long x_terms) {
    ScalarMoser mo = scalar_moser(eq);
    std::size_t n = static_cast<std::size_t>(eq.n());
    long i0 = eq.n() - mo.nu;
    const Rational& s = eq.sigma;
    BiSeries x = BiSeries::monomial(AlgebraicNumber(1L), 1, 0);

    BiMatrix a(n, n);
    for (std::size_t i = 0; i + 1 < n; ++i)
        a(i, i + 1) = static_cast<long>(i) < i0 ? x * xi_power(s, 1) : x;
    for (std::size_t i = 0; i < n; ++i) {
        Rational g = s * mo.gamma[i];
        if (g != 0) a(i, i) = xi_power(s, mo.kappa).scaled(PuiseuxSeries(AlgebraicNumber(g)));
    }
    for (std::size_t i = 0; i < n; ++i) a(n - 1, i) = a(n - 1, i) - x * eq.a[i] * xi_power(s, -mo.gamma[i]);

    // x xi^kappa dW = A W, so M = x^-1 xi^-kappa A.
    BiSeries scale = BiSeries::monomial(AlgebraicNumber(1L), -1 - s * mo.kappa, -mo.kappa);
    BiMatrix m = a.map([&](const BiSeries& f) { return f * scale; });

    IrreducibleSystem out;
    out.system = PerturbedSystem(m);
    out.shape.h = mo.kappa;
    out.shape.p = 1;
    out.shape.sigma = s;
    out.shape.nu = -mo.kappa;
    out.shape.zero = false;
    out.i0 = i0;
    if (mo.kappa >= 1 && rank(out.system.coefficient(0, out.shape), certainty, x_terms) != static_cast<std::size_t>(mo.nu))
        throw PreconditionError("constructed leading matrix has the wrong rank");
    return out;
}

std::string to_string(const Poly<PuiseuxSeries>& p, const std::string& var) {
    if (p.is_zero()) return "0";
    std::string out;
    for (int i = p.degree(); i >= 0; --i) {
        PuiseuxSeries c = p.coeff(i);
        if (c.known_zero()) continue;
        std::string power = i == 0 ? "" : (i == 1 ? var : var + "^" + std::to_string(i));
        bool neg = c.is_monomial() && c.leading().is_rational() && c.leading().rational() < 0;
        PuiseuxSeries mag = neg ? -c : c;
        std::string body;
        if (power.empty())
            body = mag.to_string();
        else if (mag == PuiseuxSeries(AlgebraicNumber(1L)))
            body = power;
        else if (mag.is_monomial())
            body = mag.to_string() + "*" + power;
        else
            body = "(" + mag.to_string() + ")*" + power;
        if (out.empty())
            out = (neg ? "-" : "") + body;
        else
            out += (neg ? " - " : " + ") + body;
    }
    return out;
}

}  // namespace formred
