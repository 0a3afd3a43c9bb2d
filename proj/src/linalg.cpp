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

#include "formred/linalg.hpp"

#include <algorithm>
#include <numeric>

namespace formred {

namespace {

const AlgebraicNumber kOne(1L);

PuiseuxSeries px_one() { return PuiseuxSeries(kOne); }

}  // namespace

// ------------------------------------------------------------ constants

QMatrix q_identity(std::size_t n) { return QMatrix::identity(n, kOne); }

QMatrix permutation_matrix(const std::vector<std::size_t>& perm) {
    QMatrix p(perm.size(), perm.size());
    for (std::size_t j = 0; j < perm.size(); ++j) p(perm[j], j) = kOne;
    return p;
}

PxMatrix to_px(const QMatrix& a) {
    return a.map([](const AlgebraicNumber& c) { return PuiseuxSeries(c); });
}

BiMatrix to_bi(const PxMatrix& a) {
    return a.map([](const PuiseuxSeries& c) { return BiSeries(c); });
}

BiMatrix to_bi(const QMatrix& a) { return to_bi(to_px(a)); }

Rref rref(const QMatrix& a) {
    Rref out{a, {}};
    QMatrix& r = out.r;
    std::size_t row = 0;
    for (std::size_t c = 0; c < r.cols() && row < r.rows(); ++c) {
        std::size_t piv = row;
        while (piv < r.rows() && r(piv, c).is_zero()) ++piv;
        if (piv == r.rows()) continue;
        if (piv != row)
            for (std::size_t j = 0; j < r.cols(); ++j) std::swap(r(piv, j), r(row, j));
        AlgebraicNumber inv = r(row, c).inverse();
        for (std::size_t j = c; j < r.cols(); ++j) r(row, j) *= inv;
        for (std::size_t i = 0; i < r.rows(); ++i) {
            if (i == row || r(i, c).is_zero()) continue;
            AlgebraicNumber f = r(i, c);
            for (std::size_t j = c; j < r.cols(); ++j)
                if (!r(row, j).is_zero()) r(i, j) -= f * r(row, j);
        }
        out.pivots.push_back(c);
        ++row;
    }
    return out;
}

std::size_t rank(const QMatrix& a) { return rref(a).pivots.size(); }

QMatrix nullspace(const QMatrix& a) {
    Rref e = rref(a);
    std::vector<std::size_t> free;
    for (std::size_t c = 0, k = 0; c < a.cols(); ++c) {
        if (k < e.pivots.size() && e.pivots[k] == c)
            ++k;
        else
            free.push_back(c);
    }
    QMatrix n(a.cols(), free.size());
    for (std::size_t f = 0; f < free.size(); ++f) {
        n(free[f], f) = kOne;
        for (std::size_t i = 0; i < e.pivots.size(); ++i) n(e.pivots[i], f) = -e.r(i, free[f]);
    }
    return n;
}

QMatrix inverse(const QMatrix& a) {
    if (!a.is_square()) throw DimensionMismatch("inverse of a non-square matrix");
    const std::size_t n = a.rows();
    QMatrix aug(n, 2 * n);
    aug.set_block(0, 0, a);
    aug.set_block(0, n, q_identity(n));
    Rref e = rref(aug);
    if (e.pivots.size() < n || e.pivots[n - 1] != n - 1) throw NotInvertible("singular constant matrix");
    return e.r.block(0, n, n, n);
}

APoly char_poly(const QMatrix& a) { return APoly(berkowitz(a, kOne)); }

SylvesterOperator::SylvesterOperator(const QMatrix& p, const QMatrix& q) : m_(p.rows()), k_(q.rows()) {
    if (!p.is_square() || !q.is_square()) throw DimensionMismatch("Sylvester operands must be square");
    const std::size_t N = m_ * k_;
    QMatrix op(N, N);
    for (std::size_t i = 0; i < m_; ++i)
        for (std::size_t j = 0; j < k_; ++j) {
            const std::size_t row = i * k_ + j;
            for (std::size_t l = 0; l < m_; ++l)
                if (!p(i, l).is_zero()) op(row, l * k_ + j) += p(i, l);
            for (std::size_t l = 0; l < k_; ++l)
                if (!q(l, j).is_zero()) op(row, i * k_ + l) -= q(l, j);
        }
    try {
        inv_ = inverse(op);
    } catch (const NotInvertible&) {
        throw SpectraOverlap();
    }
}

QMatrix SylvesterOperator::solve(const QMatrix& c) const {
    if (c.rows() != m_ || c.cols() != k_) throw DimensionMismatch("Sylvester right-hand side");
    const std::size_t N = m_ * k_;
    QMatrix x(m_, k_);
    for (std::size_t row = 0; row < N; ++row) {
        AlgebraicNumber acc;
        for (std::size_t col = 0; col < N; ++col) {
            const AlgebraicNumber& ci = c(col / k_, col % k_);
            if (!ci.is_zero() && !inv_(row, col).is_zero()) acc += inv_(row, col) * ci;
        }
        x(row / k_, row % k_) = acc;
    }
    return x;
}

QMatrix sylvester_solve(const QMatrix& p, const QMatrix& q, const QMatrix& c) {
    return SylvesterOperator(p, q).solve(c);
}

// ------------------------------------------------------- Puiseux matrices

bool certified_zero(const PuiseuxSeries& f, const Rational& threshold) {
    return f.known_zero() && (f.exact() || *f.precision() >= threshold);
}

PxMatrix px_identity(std::size_t n) { return PxMatrix::identity(n, px_one()); }

QMatrix constant_term(const PxMatrix& a) {
    return a.map([](const PuiseuxSeries& f) {
        if (!f.known_zero() && *f.valuation() < 0) throw PreconditionError("constant term of a series with a pole");
        return f.coeff(0);
    });
}

PxMatrix derive(const PxMatrix& a) {
    return a.map([](const PuiseuxSeries& f) { return f.derive(); });
}

PxMatrix shift(const PxMatrix& a, const Rational& e) {
    return a.map([&](const PuiseuxSeries& f) { return f.shift(e); });
}

std::optional<Rational> valuation(const PxMatrix& a) {
    std::optional<Rational> v;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j)
            if (!a(i, j).known_zero() && (!v || *a(i, j).valuation() < *v)) v = *a(i, j).valuation();
    return v;
}

PxMatrix inverse(const PxMatrix& a, long x_terms) {
    if (!a.is_square()) throw DimensionMismatch("inverse of a non-square matrix");
    const std::size_t n = a.rows();
    PxMatrix b = a, inv = px_identity(n);
    for (std::size_t c = 0; c < n; ++c) {
        std::optional<std::size_t> best;
        bool uncertain = false;
        for (std::size_t r = c; r < n; ++r) {
            const PuiseuxSeries& f = b(r, c);
            if (f.known_zero()) {
                uncertain = uncertain || !f.exact();
                continue;
            }
            if (!best || *f.valuation() < *b(*best, c).valuation()) best = r;
        }
        if (!best) {
            if (uncertain) throw InsufficientOrder("no certain pivot while inverting a series matrix");
            throw NotInvertible("singular series matrix");
        }
        if (*best != c)
            for (std::size_t j = 0; j < n; ++j) {
                std::swap(b(*best, j), b(c, j));
                std::swap(inv(*best, j), inv(c, j));
            }
        PuiseuxSeries pinv = b(c, c).inverse(x_terms);
        for (std::size_t j = 0; j < n; ++j) {
            b(c, j) = b(c, j) * pinv;
            inv(c, j) = inv(c, j) * pinv;
        }
        for (std::size_t r = 0; r < n; ++r) {
            if (r == c || b(r, c).exact_zero()) continue;
            PuiseuxSeries f = b(r, c);
            for (std::size_t j = 0; j < n; ++j) {
                if (!b(c, j).exact_zero()) b(r, j) -= f * b(c, j);
                if (!inv(c, j).exact_zero()) inv(r, j) -= f * inv(c, j);
            }
        }
    }
    return inv;
}

namespace {

/* Column elimination with least-valuation pivots; returns the transform and rank. */
std::pair<PxMatrix, std::size_t> column_eliminate(const PxMatrix& a, const Rational& thr, long x_terms) {
    const std::size_t n = a.rows(), m = a.cols();
    PxMatrix b = a, u = px_identity(m);
    std::vector<bool> used(n, false);
    std::size_t t = 0;
    for (; t < m; ++t) {
        std::optional<std::pair<std::size_t, std::size_t>> best;
        std::optional<Rational> weakest;
        for (std::size_t j = t; j < m; ++j)
            for (std::size_t i = 0; i < n; ++i) {
                if (used[i]) continue;
                const PuiseuxSeries& f = b(i, j);
                if (f.known_zero()) {
                    if (!certified_zero(f, thr) && (!weakest || *f.precision() < *weakest)) weakest = *f.precision();
                    continue;
                }
                if (!best || *f.valuation() < *b(best->first, best->second).valuation()) best = {{i, j}};
            }
        if (!best) {
            if (weakest) throw InsufficientOrder("cannot certify a zero column");
            break;
        }
        const auto [pi, pj] = *best;
        if (weakest && *weakest < *b(pi, pj).valuation()) throw InsufficientOrder("pivot valuation is undecidable");
        if (pj != t)
            for (std::size_t i = 0; i < std::max(n, m); ++i) {
                if (i < n) std::swap(b(i, pj), b(i, t));
                if (i < m) std::swap(u(i, pj), u(i, t));
            }
        PuiseuxSeries pinv = b(pi, t).inverse(x_terms);
        for (std::size_t j = t + 1; j < m; ++j) {
            if (b(pi, j).exact_zero()) continue;
            PuiseuxSeries c = -(b(pi, j) * pinv);
            for (std::size_t i = 0; i < n; ++i)
                if (!b(i, t).exact_zero()) b(i, j) += c * b(i, t);
            for (std::size_t i = 0; i < m; ++i)
                if (!u(i, t).exact_zero()) u(i, j) += c * u(i, t);
        }
        used[pi] = true;
    }
    for (std::size_t j = t; j < m; ++j)
        for (std::size_t i = 0; i < n; ++i)
            if (!certified_zero(b(i, j), thr)) throw InsufficientOrder("kernel column is not certainly zero");
    return {u, t};
}

}  // namespace

ColumnReduction smith_column_reduce(const PxMatrix& a0, long certainty, long x_terms) {
    if (!a0.is_square()) throw DimensionMismatch("column reduction of a non-square matrix");
    const std::size_t n = a0.rows();
    auto [us, r] = column_eliminate(a0, Rational(certainty), x_terms);
    ColumnReduction out;
    out.r = r;
    if (r == n) {
        out.U = px_identity(n);
        out.Uinv = px_identity(n);
        return out;
    }
    PxMatrix k = us.block(0, r, n, n - r);
    QMatrix k0 = constant_term(k);
    // Rows where K(0) is invertible, preferring the bottom rows.
    std::vector<std::size_t> chosen;
    for (std::size_t i = n; i-- > 0 && chosen.size() < n - r;) {
        std::vector<std::size_t> trial = chosen;
        trial.push_back(i);
        std::vector<std::size_t> all(n - r);
        std::iota(all.begin(), all.end(), 0);
        if (rank(k0.select(trial, all)) == trial.size()) chosen = trial;
    }
    std::vector<std::size_t> rest;
    for (std::size_t i = 0; i < n; ++i)
        if (std::find(chosen.begin(), chosen.end(), i) == chosen.end()) rest.push_back(i);
    out.U = PxMatrix(n, n);
    for (std::size_t j = 0; j < rest.size(); ++j) out.U(rest[j], j) = px_one();
    out.U.set_block(0, r, k);
    out.Uinv = inverse(out.U, x_terms);
    return out;
}

std::size_t rank(const PxMatrix& a, long certainty, long x_terms) {
    return column_eliminate(a, Rational(certainty), x_terms).second;
}

std::vector<std::vector<PuiseuxSeries>> left_nullspace(const PxMatrix& m, long certainty, long x_terms) {
    ColumnReduction cr = smith_column_reduce(m.transpose(), certainty, x_terms);
    std::vector<std::vector<PuiseuxSeries>> out;
    for (std::size_t j = cr.r; j < m.rows(); ++j) {
        std::vector<PuiseuxSeries> w(m.rows());
        for (std::size_t i = 0; i < m.rows(); ++i) w[i] = cr.U(i, j);
        out.push_back(std::move(w));
    }
    return out;
}

std::vector<PuiseuxSeries> left_nullvector(const PxMatrix& m, long certainty, long x_terms) {
    auto ns = left_nullspace(m, certainty, x_terms);
    if (ns.empty()) throw NotSingular();
    return ns.front();
}

PxMatrix sylvester_series(const PxMatrix& p, const PxMatrix& q, const PxMatrix& c, long x_terms) {
    const std::size_t m = p.rows(), k = q.rows();
    if (c.rows() != m || c.cols() != k) throw DimensionMismatch("Sylvester right-hand side");
    int s = 1;
    long prec_c = PuiseuxSeries::kInf, rel_pq = PuiseuxSeries::kInf;
    auto visit = [&](const PxMatrix& a) {
        for (std::size_t i = 0; i < a.rows(); ++i)
            for (std::size_t j = 0; j < a.cols(); ++j) s = std::lcm(s, a(i, j).ram());
    };
    visit(p);
    visit(q);
    visit(c);
    PxMatrix P = p.map([&](const PuiseuxSeries& f) { return f.lifted(s); });
    PxMatrix Q = q.map([&](const PuiseuxSeries& f) { return f.lifted(s); });
    PxMatrix C = c.map([&](const PuiseuxSeries& f) { return f.lifted(s); });
    std::optional<long> v0;
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < k; ++j) {
            const PuiseuxSeries& f = C(i, j);
            prec_c = std::min(prec_c, f.prec_units());
            if (!f.known_zero() && (!v0 || f.vlo() < *v0)) v0 = f.vlo();
        }
    for (const PxMatrix* a : {&P, &Q})
        for (std::size_t i = 0; i < a->rows(); ++i)
            for (std::size_t j = 0; j < a->cols(); ++j) {
                const PuiseuxSeries& f = (*a)(i, j);
                if (!f.known_zero() && f.vlo() < 0) throw PreconditionError("Sylvester coefficients must be regular");
                rel_pq = std::min(rel_pq, f.prec_units());
            }
    if (!v0) {
        PxMatrix x(m, k);
        if (prec_c != PuiseuxSeries::kInf)
            for (std::size_t i = 0; i < m; ++i)
                for (std::size_t j = 0; j < k; ++j) x(i, j) = PuiseuxSeries::from_coeffs(s, 0, {}, prec_c);
        return x;
    }
    long end = std::min(prec_c, *v0 + static_cast<long>(x_terms) * s);
    if (rel_pq != PuiseuxSeries::kInf) end = std::min(end, *v0 + rel_pq);
    const long len = std::max(0L, end - *v0);
    auto coeff_matrix = [&](const PxMatrix& a, long u) {
        return a.map([&](const PuiseuxSeries& f) { return f.coeff(ratio(u, s)); });
    };
    std::vector<QMatrix> Pi, Qi;
    for (long i = 0; i < len; ++i) {
        Pi.push_back(coeff_matrix(P, i));
        Qi.push_back(coeff_matrix(Q, i));
    }
    SylvesterOperator op(Pi.empty() ? coeff_matrix(P, 0) : Pi[0], Qi.empty() ? coeff_matrix(Q, 0) : Qi[0]);
    std::vector<QMatrix> X;
    for (long u = 0; u < len; ++u) {
        QMatrix r = coeff_matrix(C, *v0 + u);
        for (long i = 1; i <= u; ++i) {
            const QMatrix& xu = X[static_cast<std::size_t>(u - i)];
            if (xu.is_zero()) continue;
            if (!Pi[static_cast<std::size_t>(i)].is_zero()) r = r - Pi[static_cast<std::size_t>(i)] * xu;
            if (!Qi[static_cast<std::size_t>(i)].is_zero()) r = r + xu * Qi[static_cast<std::size_t>(i)];
        }
        X.push_back(op.solve(r));
    }
    PxMatrix out(m, k);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < k; ++j) {
            std::vector<AlgebraicNumber> cs(static_cast<std::size_t>(len));
            for (long u = 0; u < len; ++u) cs[static_cast<std::size_t>(u)] = X[static_cast<std::size_t>(u)](i, j);
            out(i, j) = PuiseuxSeries::from_coeffs(s, *v0, std::move(cs), end);
        }
    return out;
}

std::vector<PuiseuxSeries> char_poly(const PxMatrix& a0) { return berkowitz(a0, px_one()); }

PuiseuxExponents newton_puiseux_exponents(const PxMatrix& a0, long certainty) {
    std::vector<PuiseuxSeries> c = char_poly(a0);
    const std::size_t n = a0.rows();
    const Rational thr(certainty);
    std::vector<std::pair<long, Rational>> pts;
    for (std::size_t i = 0; i <= n; ++i) {
        if (certified_zero(c[i], thr)) continue;
        if (c[i].known_zero()) throw InsufficientOrder("characteristic coefficient is undecidable");
        pts.emplace_back(static_cast<long>(i), *c[i].valuation());
    }
    if (pts.front().first == static_cast<long>(n)) throw AllNilpotent();
    // Lower convex hull.
    std::vector<std::pair<long, Rational>> hull;
    for (const auto& pt : pts) {
        while (hull.size() >= 2) {
            const auto& a = hull[hull.size() - 2];
            const auto& b = hull.back();
            Rational cross = (b.second - a.second) * (pt.first - a.first) - (pt.second - a.second) * (b.first - a.first);
            if (cross >= 0)
                hull.pop_back();
            else
                break;
        }
        hull.push_back(pt);
    }
    PuiseuxExponents out;
    for (std::size_t h = 0; h + 1 < hull.size(); ++h) {
        const long i = hull[h].first, j = hull[h + 1].first;
        Rational e = (hull[h].second - hull[h + 1].second) / (j - i);
        std::vector<AlgebraicNumber> poly(static_cast<std::size_t>(j - i + 1));
        for (long k = i; k <= j; ++k) {
            if (certified_zero(c[static_cast<std::size_t>(k)], thr)) continue;
            if (*c[static_cast<std::size_t>(k)].valuation() + k * e == hull[h].second + i * e)
                poly[static_cast<std::size_t>(k - i)] = c[static_cast<std::size_t>(k)].leading();
        }
        APoly ep = monic(APoly(poly));
        for (const auto& [root, mult] : distinct_root_partition(ep)) {
            if (root.is_zero()) continue;
            out.exponents.push_back({e, root, mult});
        }
        out.s = static_cast<int>(std::lcm(static_cast<long>(out.s), e.get_den().get_si()));
    }
    std::stable_sort(out.exponents.begin(), out.exponents.end(),
                     [](const EigenExponent& a, const EigenExponent& b) { return a.exponent < b.exponent; });
    out.minimal = out.exponents.front().exponent;
    return out;
}

// -------------------------------------------------------------- bivariate

BiMatrix bi_identity(std::size_t n) { return BiMatrix::identity(n, BiSeries(px_one())); }

PxMatrix eps_coeff(const BiMatrix& a, long k) {
    return a.map([k](const BiSeries& f) { return f.coeff(k); });
}

BiMatrix derive(const BiMatrix& a) {
    return a.map([](const BiSeries& f) { return f.derive(); });
}

BiMatrix inverse(const BiMatrix& a, const Budget& budget) {
    if (!a.is_square()) throw DimensionMismatch("inverse of a non-square matrix");
    const std::size_t n = a.rows();
    BiMatrix b = a, inv = bi_identity(n);
    for (std::size_t c = 0; c < n; ++c) {
        std::optional<std::size_t> best;
        std::pair<long, Rational> best_key;
        for (std::size_t r = c; r < n; ++r) {
            if (b(r, c).exact_zero()) continue;
            NormalData nd = normalize(b(r, c), budget.certainty);
            if (nd.zero) continue;
            std::pair<long, Rational> key{nd.nu, *b(r, c).coeff(nd.nu).valuation()};
            if (!best || key < best_key) {
                best = r;
                best_key = key;
            }
        }
        if (!best) throw NotInvertible("singular bivariate matrix");
        if (*best != c)
            for (std::size_t j = 0; j < n; ++j) {
                std::swap(b(*best, j), b(c, j));
                std::swap(inv(*best, j), inv(c, j));
            }
        BiSeries pinv = b(c, c).inverse(budget);
        for (std::size_t j = 0; j < n; ++j) {
            b(c, j) = b(c, j) * pinv;
            inv(c, j) = inv(c, j) * pinv;
        }
        for (std::size_t r = 0; r < n; ++r) {
            if (r == c || b(r, c).exact_zero()) continue;
            BiSeries f = b(r, c);
            for (std::size_t j = 0; j < n; ++j) {
                if (!b(c, j).exact_zero()) b(r, j) = b(r, j) - f * b(c, j);
                if (!inv(c, j).exact_zero()) inv(r, j) = inv(r, j) - f * inv(c, j);
            }
        }
    }
    return inv;
}

PerturbedSystem::PerturbedSystem(BiMatrix m, int s, long d) : m_(std::move(m)), s_(s), d_(d) {
    if (!m_.is_square()) throw DimensionMismatch("system matrix must be square");
}

PerturbedSystem PerturbedSystem::from_normal(long h, const Rational& p, const Rational& sigma, const BiMatrix& a_xi,
                                             int s, long d) {
    BiMatrix m = a_xi.map([&](const BiSeries& f) {
        std::map<long, PuiseuxSeries> t;
        for (const auto& [j, c] : f.terms()) t.emplace(j - h, c.shift(sigma * (j - h) - p));
        std::optional<long> last;
        if (f.has_tail()) last = f.last_known() - h;
        return BiSeries::from_terms(std::move(t), last, f.tail_slope() + sigma);
    });
    return PerturbedSystem(std::move(m), s, d);
}

SystemShape PerturbedSystem::shape(long certainty) const {
    std::vector<const BiSeries*> es;
    for (std::size_t i = 0; i < n(); ++i)
        for (std::size_t j = 0; j < n(); ++j) es.push_back(&m_(i, j));
    NormalData nd = normalize(es, certainty);
    SystemShape sh;
    if (nd.zero) return sh;
    sh.zero = false;
    sh.nu = nd.nu;
    sh.h = -nd.nu;
    sh.p = -nd.p;
    sh.sigma = nd.sigma;
    return sh;
}

PxMatrix PerturbedSystem::coefficient(long j, const SystemShape& sh) const {
    return m_.map([&](const BiSeries& f) { return xi_coeff(f, sh.nu + j, sh.sigma, -sh.p); });
}

BiMatrix PerturbedSystem::normal_matrix(const SystemShape& sh) const {
    return m_.map([&](const BiSeries& f) {
        std::map<long, PuiseuxSeries> t;
        for (const auto& [k, c] : f.terms()) t.emplace(k - sh.nu, c.shift(-sh.sigma * k + sh.p));
        std::optional<long> last;
        if (f.has_tail()) last = f.last_known() - sh.nu;
        return BiSeries::from_terms(std::move(t), last, f.tail_slope() - sh.sigma);
    });
}

Gauge gauge_of(const QMatrix& t) { return {to_bi(t), to_bi(inverse(t))}; }

Gauge gauge_of(const PxMatrix& t, const PxMatrix& tinv) { return {to_bi(t), to_bi(tinv)}; }

Gauge compose(const Gauge& a, const Gauge& b) { return {a.T * b.T, b.Tinv * a.Tinv}; }

PerturbedSystem truncate(const PerturbedSystem& sys, const Budget& budget) {
    SystemShape sh = sys.shape(budget.certainty);
    if (sh.zero) return sys;
    BiMatrix m = sys.M().map(
        [&](const BiSeries& f) { return f.truncate(sh.sigma, -sh.p, sh.nu + budget.xi_terms, budget.x_terms); });
    return PerturbedSystem(std::move(m), sys.s(), sys.d());
}

PerturbedSystem gauge_apply(const PerturbedSystem& sys, const Gauge& g, const Budget& budget) {
    if (g.T.rows() != sys.n() || g.Tinv.rows() != sys.n()) throw DimensionMismatch("gauge size");
    BiMatrix m = g.Tinv * (sys.M() * g.T - derive(g.T));
    return truncate(PerturbedSystem(std::move(m), sys.s(), sys.d()), budget);
}

std::vector<BiSeries> char_poly(const PerturbedSystem& sys) {
    const std::size_t n = sys.n();
    const BiMatrix& a = sys.M();
    std::vector<BiSeries> c(n + 1);
    c[n] = BiSeries(px_one());
    BiMatrix mk(n, n);
    for (std::size_t k = 1; k <= n; ++k) {
        mk = a * mk;
        for (std::size_t i = 0; i < n; ++i) mk(i, i) = mk(i, i) + c[n - k + 1];
        BiMatrix am = a * mk;
        BiSeries tr;
        for (std::size_t i = 0; i < n; ++i) tr = tr + am(i, i);
        c[n - k] = tr.scaled(PuiseuxSeries(AlgebraicNumber(-1, static_cast<long>(k))));
    }
    return c;
}

}  // namespace formred
