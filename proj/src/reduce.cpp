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

#include "formred/reduce.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>

#include "formred/errors.hpp"

namespace formred {

namespace {

const AlgebraicNumber kOne(1L);

PuiseuxSeries px_one() { return PuiseuxSeries(kOne); }

LambdaPoly lambda_var() { return LambdaPoly(std::vector<PuiseuxSeries>{PuiseuxSeries(), px_one()}); }

bool is_identity(const PxMatrix& a) {
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) {
            const PuiseuxSeries& f = a(i, j);
            if (i == j ? !(f.exact() && f == px_one()) : !f.exact_zero()) return false;
        }
    return true;
}

bool nilpotent(const QMatrix& a) {
    APoly c = char_poly(a);
    for (int i = 0; i < c.degree(); ++i)
        if (!c.coeff(i).is_zero()) return false;
    return true;
}

Matrix<LambdaPoly> build_g(const PxMatrix& a0, const PxMatrix& a1, std::size_t r) {
    const std::size_t n = a0.rows();
    Matrix<LambdaPoly> g(n, n);
    const LambdaPoly lam = lambda_var();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            if (j < r) {
                g(i, j) = LambdaPoly::constant(a0(i, j));
            } else {
                g(i, j) = LambdaPoly::constant(a1(i, j));
                if (i == j) g(i, j) += lam;
            }
        }
    return g;
}

int ram_of(const PxMatrix& a) {
    int s = 1;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) s = std::lcm(s, a(i, j).ram());
    return s;
}

/* ----------------------------------------------------- Moser engine */

/*
   Reduction target with the distinguished variable eps: the raw system
   itself, gauges applied with their derivative terms.
*/
struct EpsTarget {
    static constexpr bool kSimilarity = false;

    EpsTarget(PerturbedSystem s, const Budget& b, BiMatrix r) : sys(std::move(s)), budget(b), R(std::move(r)) {
        refresh();
    }

    std::size_t n() const { return sys.n(); }
    long h() const { return sh.h; }
    PxMatrix coeff(long j) const { return sys.coefficient(j, sh); }
    bool done() const { return false; }

    void gauge(const PxMatrix& t, const PxMatrix& tinv) {
        sys = gauge_apply(sys, gauge_of(t, tinv), budget);
        R = R * to_bi(t);
        refresh();
    }

    void shear(const std::vector<int>& e) {
        const std::size_t m = n();
        BiMatrix s(m, m), si(m, m);
        for (std::size_t i = 0; i < m; ++i) {
            s(i, i) = BiSeries::monomial(kOne, sh.sigma * e[i], e[i]);
            si(i, i) = BiSeries::monomial(kOne, -sh.sigma * e[i], -e[i]);
        }
        sys = gauge_apply(sys, Gauge{s, si}, budget);
        R = R * s;
        refresh();
    }

    void refresh() {
        sh = sys.shape(budget.certainty);
        if (sh.zero) throw PreconditionError("rank reduction of the zero system");
    }

    PerturbedSystem sys;
    Budget budget;
    BiMatrix R;
    SystemShape sh;
};

/*
   Reduction target with the distinguished variable y = x^(1/s): a matrix
   series N(x) under similarity only.
*/
struct XTarget {
    static constexpr bool kSimilarity = true;

    XTarget(PxMatrix a, int s_) : s(s_), N(a.map([&](const PuiseuxSeries& f) { return f.lifted(s_); })) {
        T = px_identity(N.rows());
        Tinv = T;
        refresh();
    }

    std::size_t n() const { return N.rows(); }
    long h() const { return -v; }
    PxMatrix coeff(long j) const {
        return N.map([&](const PuiseuxSeries& f) { return PuiseuxSeries(f.coeff(ratio(v + j, s))); });
    }
    /* x^(-v) N(0) has a nonzero eigenvalue. */
    bool done() const { return !nilpotent(constant_term(coeff(0))); }

    void gauge(const PxMatrix& t, const PxMatrix& tinv) {
        N = tinv * N * t;
        T = T * t;
        Tinv = tinv * Tinv;
        refresh();
    }

    void shear(const std::vector<int>& e) {
        const std::size_t m = n();
        PxMatrix sm(m, m), si(m, m);
        for (std::size_t i = 0; i < m; ++i) {
            sm(i, i) = PuiseuxSeries::monomial(kOne, ratio(e[i], s));
            si(i, i) = PuiseuxSeries::monomial(kOne, ratio(-e[i], s));
        }
        gauge(sm, si);
    }

    void refresh() {
        std::optional<Rational> val = valuation(N);
        if (!val) throw PreconditionError("x-reduction of a zero matrix");
        Rational units = *val * s;
        if (units.get_den() != 1) throw PreconditionError("valuation off the ramification grid");
        v = units.get_num().get_si();
    }

    int s;
    PxMatrix N, T, Tinv;
    long v = 0;
};

enum class Stop { Irreducible, NonPositive, StalledH1 };

/* Left null vectors with constant entries, found coefficientwise. */
std::vector<std::vector<PuiseuxSeries>> constant_left_nullspace(const PxMatrix& g) {
    const std::size_t m = g.rows();
    std::set<Rational> exps;
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) {
            const PuiseuxSeries& f = g(i, j);
            for (std::size_t u = 0; u < f.coeffs().size(); ++u)
                if (!f.coeffs()[u].is_zero()) exps.insert(ratio(f.vlo() + static_cast<long>(u), f.ram()));
        }
    std::vector<std::vector<PuiseuxSeries>> out;
    if (exps.empty()) {
        for (std::size_t k = 0; k < m; ++k) {
            std::vector<PuiseuxSeries> w(m);
            w[k] = px_one();
            out.push_back(std::move(w));
        }
        return out;
    }
    QMatrix c(m, m * exps.size());
    std::size_t b = 0;
    for (const Rational& e : exps) {
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < m; ++j) c(i, b * m + j) = g(i, j).coeff(e);
        ++b;
    }
    QMatrix ns = nullspace(c.transpose());
    for (std::size_t k = 0; k < ns.cols(); ++k) {
        std::vector<PuiseuxSeries> w(m);
        for (std::size_t i = 0; i < m; ++i) w[i] = PuiseuxSeries(ns(i, k));
        out.push_back(std::move(w));
    }
    return out;
}

template <class Target>
Stop moser_reduce(Target& t, const Budget& b, std::vector<std::pair<long, std::size_t>>& hist) {
    const std::size_t n = t.n();
    std::optional<Rational> last_m;
    const std::size_t max_sweeps = 64 * n + 64;
    for (std::size_t sweep = 0; sweep < max_sweeps; ++sweep) {
        if (!Target::kSimilarity && t.h() <= 0) return Stop::NonPositive;
        if (t.done()) return Stop::Irreducible;
        ColumnReduction cr = smith_column_reduce(t.coeff(0), b.certainty, b.x_terms);
        if (!is_identity(cr.U)) t.gauge(cr.U, cr.Uinv);
        const std::size_t r = cr.r;
        Rational m = Rational(t.h()) + ratio(static_cast<long>(r), static_cast<long>(n));
        if (last_m && m >= *last_m) throw InsufficientOrder("a rank reduction sweep made no progress");
        last_m = m;
        hist.emplace_back(t.h(), r);

        Matrix<LambdaPoly> g = build_g(t.coeff(0), t.coeff(1), r);
        if (!vanishes(det(g), b.certainty)) return Stop::Irreducible;

        const bool constant_only = !Target::kSimilarity && t.h() == 1;
        std::size_t rho = 0;
        for (;;) {
            const std::size_t size = n - rho;
            PxMatrix g0 = g_at_zero(g, n);
            if (rank(g0.block(0, 0, r, size), b.certainty, b.x_terms) < r) break;
            if (rho == n - r) throw InsufficientOrder("elimination exhausted without a rank drop");
            PxMatrix gm = g0.block(0, 0, size, size);
            auto basis = constant_only ? constant_left_nullspace(gm) : left_nullspace(gm, b.certainty, b.x_terms);
            std::optional<std::vector<PuiseuxSeries>> w;
            for (auto& cand : basis) {
                for (std::size_t j = r; j < size && !w; ++j)
                    if (!cand[j].known_zero()) w = cand;
                if (w) break;
            }
            if (!w) {
                if (constant_only) return Stop::StalledH1;
                throw InsufficientOrder("no usable left null vector");
            }
            std::size_t piv = size;
            for (std::size_t j = r; j < size; ++j) {
                if ((*w)[j].known_zero()) continue;
                if (piv == size || *(*w)[j].valuation() <= *(*w)[piv].valuation()) piv = j;
            }
            std::vector<std::size_t> perm(n);
            std::iota(perm.begin(), perm.end(), 0);
            std::swap(perm[piv], perm[size - 1]);
            std::swap((*w)[piv], (*w)[size - 1]);
            PxMatrix p = to_px(permutation_matrix(perm));
            PxMatrix q = px_identity(n), qinv = px_identity(n);
            PuiseuxSeries winv = (*w)[size - 1].inverse(b.x_terms);
            for (std::size_t j = r; j + 1 < size; ++j) {
                if ((*w)[j].exact_zero()) continue;
                PuiseuxSeries c = (*w)[j] * winv;
                q(size - 1, j) = -c;
                qinv(size - 1, j) = c;
            }
            PxMatrix tm = p * q, tinv = qinv * p;
            if (!is_identity(tm)) t.gauge(tm, tinv);
            ++rho;
            g = build_g(t.coeff(0), t.coeff(1), r);
        }
        std::vector<int> e(n, 0);
        for (std::size_t i = 0; i < r; ++i) e[i] = 1;
        for (std::size_t i = n - rho; i < n; ++i) e[i] = 1;
        t.shear(e);
    }
    throw InsufficientOrder("rank reduction did not terminate");
}

BiMatrix ramified(const BiMatrix& r, long d) {
    return r.map([&](const BiSeries& f) { return f.ramify_eps(d); });
}

bool leading_nilpotent(const PerturbedSystem& sys, const SystemShape& sh) {
    return nilpotent(constant_term(sys.coefficient(0, sh)));
}

/* T0(x) with T0^{-1} A0 T0 block diagonal, by the x-recursion on constant Sylvester equations. */
std::pair<PxMatrix, PxMatrix> block_diagonalize_x(const PxMatrix& a0, const std::vector<std::size_t>& off,
                                                  const std::vector<std::size_t>& size, long x_terms) {
    const std::size_t n = a0.rows(), nb = off.size();
    const int s = ram_of(a0);
    long len = x_terms * s;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const PuiseuxSeries& f = a0(i, j);
            if (!f.exact()) len = std::min(len, f.lifted(s).prec_units());
        }
    if (len < 1) throw InsufficientOrder("leading matrix known to too low an order");
    std::vector<QMatrix> c;
    for (long u = 0; u < len; ++u)
        c.push_back(a0.map([&](const PuiseuxSeries& f) { return f.coeff(ratio(u, s)); }));
    std::map<std::pair<std::size_t, std::size_t>, SylvesterOperator> ops;
    for (std::size_t a = 0; a < nb; ++a)
        for (std::size_t bb = 0; bb < nb; ++bb)
            if (a != bb)
                ops.emplace(std::make_pair(a, bb), SylvesterOperator(c[0].block(off[a], off[a], size[a], size[a]),
                                                                     c[0].block(off[bb], off[bb], size[bb], size[bb])));
    std::vector<QMatrix> y(static_cast<std::size_t>(len), QMatrix(n, n)), bk(static_cast<std::size_t>(len));
    bk[0] = c[0];
    for (long k = 1; k < len; ++k) {
        QMatrix sk = c[static_cast<std::size_t>(k)];
        for (long i = 1; i < k; ++i)
            sk = sk + c[static_cast<std::size_t>(k - i)] * y[static_cast<std::size_t>(i)] -
                 y[static_cast<std::size_t>(i)] * bk[static_cast<std::size_t>(k - i)];
        QMatrix bd(n, n), yk(n, n);
        for (std::size_t a = 0; a < nb; ++a)
            for (std::size_t bb = 0; bb < nb; ++bb) {
                QMatrix blk = sk.block(off[a], off[bb], size[a], size[bb]);
                if (a == bb)
                    bd.set_block(off[a], off[a], blk);
                else
                    yk.set_block(off[a], off[bb], ops.at({a, bb}).solve(-blk));
            }
        bk[static_cast<std::size_t>(k)] = bd;
        y[static_cast<std::size_t>(k)] = yk;
    }
    std::vector<std::size_t> block_of(n);
    for (std::size_t a = 0; a < nb; ++a)
        for (std::size_t i = 0; i < size[a]; ++i) block_of[off[a] + i] = a;
    PxMatrix t(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            if (block_of[i] == block_of[j]) {
                if (i == j) t(i, j) = px_one();
                continue;
            }
            std::vector<AlgebraicNumber> cs(static_cast<std::size_t>(len));
            for (long u = 1; u < len; ++u) cs[static_cast<std::size_t>(u)] = y[static_cast<std::size_t>(u)](i, j);
            t(i, j) = PuiseuxSeries::from_coeffs(s, 0, std::move(cs), len);
        }
    return {t, inverse(t, x_terms)};
}

}  // namespace

/* ------------------------------------------------------------- theta */

GLambda g_lambda(const PxMatrix& a0, const PxMatrix& a1, long certainty, long x_terms) {
    ColumnReduction cr = smith_column_reduce(a0, certainty, x_terms);
    GLambda out;
    out.r = cr.r;
    out.G = build_g(cr.Uinv * a0 * cr.U, cr.Uinv * a1 * cr.U, cr.r);
    out.U = std::move(cr.U);
    out.Uinv = std::move(cr.Uinv);
    return out;
}

LambdaPoly det(const Matrix<LambdaPoly>& g) { return determinant(g, LambdaPoly::constant(px_one())); }

PxMatrix g_at_zero(const Matrix<LambdaPoly>& g, std::size_t m) {
    PxMatrix out(m, m);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) out(i, j) = g(i, j).coeff(0);
    return out;
}

LambdaPoly theta_direct(const PxMatrix& a0, const PxMatrix& a1, std::size_t r) {
    using EtaPoly = Poly<LambdaPoly>;
    const std::size_t n = a0.rows();
    const LambdaPoly lam = lambda_var();
    Matrix<EtaPoly> m(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            LambdaPoly c0 = LambdaPoly::constant(a1(i, j));
            if (i == j) c0 += lam;
            m(i, j) = EtaPoly(std::vector<LambdaPoly>{c0, LambdaPoly::constant(a0(i, j))});
        }
    EtaPoly d = determinant(m, EtaPoly::constant(LambdaPoly::constant(px_one())));
    return d.coeff(static_cast<int>(r));
}

LambdaPoly theta(const PerturbedSystem& sys, const SystemShape& sh, const Budget& budget) {
    GLambda g = g_lambda(sys.coefficient(0, sh), sys.coefficient(1, sh), budget.certainty, budget.x_terms);
    return det(g.G);
}

LambdaPoly theta(const PerturbedSystem& sys, const Budget& budget) {
    return theta(sys, sys.shape(budget.certainty), budget);
}

bool vanishes(const LambdaPoly& p, long certainty) {
    for (const PuiseuxSeries& c : p.coeffs()) {
        if (!c.known_zero()) return false;
        if (!certified_zero(c, Rational(certainty))) throw InsufficientOrder("cannot decide whether theta vanishes");
    }
    return true;
}

/* ------------------------------------------------------------- split */

SplitResult split(const PerturbedSystem& sys, const Budget& budget, const FactorHints* hints) {
    const SystemShape sh = sys.shape(budget.certainty);
    if (sh.zero || sh.h < 1) throw PreconditionError("splitting needs eps-rank h >= 1");
    const std::size_t n = sys.n();
    const QMatrix a00 = constant_term(sys.coefficient(0, sh));
    const auto roots = distinct_root_partition(char_poly(a00), hints);
    if (roots.size() < 2) throw SpectraOverlap();

    QMatrix p(n, n);
    std::vector<std::size_t> off, size;
    std::size_t col = 0;
    for (const auto& [mu, mult] : roots) {
        QMatrix b = a00 - QMatrix::identity(n, mu);
        QMatrix bm = q_identity(n);
        for (int k = 0; k < mult; ++k) bm = bm * b;
        QMatrix ker = nullspace(bm);
        if (ker.cols() != static_cast<std::size_t>(mult))
            throw Error("generalized eigenspace dimension differs from the multiplicity");
        off.push_back(col);
        size.push_back(ker.cols());
        p.set_block(0, col, ker);
        col += ker.cols();
    }
    const std::size_t nb = off.size();
    std::vector<std::size_t> block_of(n);
    for (std::size_t a = 0; a < nb; ++a)
        for (std::size_t i = 0; i < size[a]; ++i) block_of[off[a] + i] = a;

    PerturbedSystem s1 = gauge_apply(sys, gauge_of(p), budget);
    BiMatrix t_total = to_bi(p);

    auto make_blocks = [&](const PerturbedSystem& src, auto entry) {
        std::vector<SplitBlock> out;
        for (std::size_t a = 0; a < nb; ++a) {
            BiMatrix m(size[a], size[a]);
            for (std::size_t i = 0; i < size[a]; ++i)
                for (std::size_t j = 0; j < size[a]; ++j) m(i, j) = entry(off[a] + i, off[a] + j);
            SplitBlock blk;
            blk.sys = truncate(PerturbedSystem(std::move(m), src.s(), src.d()), budget);
            for (std::size_t i = 0; i < size[a]; ++i) blk.columns.push_back(off[a] + i);
            blk.eigenvalue = roots[a].first;
            out.push_back(std::move(blk));
        }
        return out;
    };

    bool block_diagonal = true;
    for (std::size_t i = 0; i < n && block_diagonal; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (block_of[i] != block_of[j] && !s1.M()(i, j).exact_zero()) {
                block_diagonal = false;
                break;
            }
    if (block_diagonal) {
        SplitResult res;
        res.T = t_total;
        res.blocks = make_blocks(s1, [&](std::size_t i, std::size_t j) { return s1.M()(i, j); });
        return res;
    }

    const SystemShape sh1 = s1.shape(budget.certainty);
    const PxMatrix a0 = s1.coefficient(0, sh1);
    bool a0_diagonal = true;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (block_of[i] != block_of[j] && !a0(i, j).exact_zero()) a0_diagonal = false;
    PerturbedSystem s2 = s1;
    if (!a0_diagonal) {
        auto [t0, t0inv] = block_diagonalize_x(a0, off, size, budget.x_terms);
        s2 = gauge_apply(s1, gauge_of(t0, t0inv), budget);
        t_total = t_total * to_bi(t0);
    }

    const SystemShape sh2 = s2.shape(budget.certainty);
    const long nu = sh2.nu, h = sh2.h;
    const Rational c = sh2.sigma * nu - sh2.p;
    const Rational tail = sh2.p < 1 ? sh2.sigma + (sh2.p - 1) / h : sh2.sigma;
    const BiMatrix& mm = s2.M();
    long kmax = nu + budget.xi_terms;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (mm(i, j).has_tail()) kmax = std::min(kmax, mm(i, j).last_known());
    if (kmax < nu) throw InsufficientOrder("system known to too few eps-orders to split");
    const long mmax = kmax - nu;

    std::vector<PxMatrix> mk, tk, dk;
    for (long m = 0; m <= mmax; ++m) mk.push_back(eps_coeff(mm, nu + m));
    const PxMatrix lead = shift(mk[0], -c);
    tk.push_back(px_identity(n));
    auto diag_part = [&](const PxMatrix& r) {
        PxMatrix d(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (block_of[i] == block_of[j]) d(i, j) = r(i, j);
        return d;
    };
    dk.push_back(diag_part(mk[0]));
    for (long m = 1; m <= mmax; ++m) {
        PxMatrix r = mk[static_cast<std::size_t>(m)];
        for (long i = 1; i < m; ++i) {
            const PxMatrix& ti = tk[static_cast<std::size_t>(i)];
            if (ti.is_zero()) continue;
            r = r + mk[static_cast<std::size_t>(m - i)] * ti - ti * dk[static_cast<std::size_t>(m - i)];
        }
        if (m - h >= 1) r = r - derive(tk[static_cast<std::size_t>(m - h)]);
        dk.push_back(diag_part(r));
        PxMatrix x(n, n);
        for (std::size_t a = 0; a < nb; ++a)
            for (std::size_t bb = 0; bb < nb; ++bb) {
                if (a == bb) continue;
                PxMatrix rhs = shift(-r.block(off[a], off[bb], size[a], size[bb]), -c);
                x.set_block(off[a], off[bb],
                            sylvester_series(lead.block(off[a], off[a], size[a], size[a]),
                                             lead.block(off[bb], off[bb], size[bb], size[bb]), rhs, budget.x_terms));
            }
        tk.push_back(std::move(x));
    }

    BiMatrix te(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            if (block_of[i] == block_of[j]) {
                if (i == j) te(i, j) = BiSeries(px_one());
                continue;
            }
            std::map<long, PuiseuxSeries> terms;
            for (long m = 1; m <= mmax; ++m)
                if (!tk[static_cast<std::size_t>(m)](i, j).exact_zero())
                    terms.emplace(m, tk[static_cast<std::size_t>(m)](i, j));
            te(i, j) = BiSeries::from_terms(std::move(terms), mmax, tail);
        }
    SplitResult res;
    res.T = t_total * te;
    res.blocks = make_blocks(s2, [&](std::size_t i, std::size_t j) {
        std::map<long, PuiseuxSeries> terms;
        for (long m = 0; m <= mmax; ++m)
            if (!dk[static_cast<std::size_t>(m)](i, j).exact_zero())
                terms.emplace(nu + m, dk[static_cast<std::size_t>(m)](i, j));
        return BiSeries::from_terms(std::move(terms), kmax, tail);
    });
    return res;
}

/* ------------------------------------------------------- eigen shift */

ShiftResult eigen_shift(const PerturbedSystem& sys, const AlgebraicNumber& gamma, const Budget& budget) {
    ShiftResult out{sys, ExpTerm{}};
    if (gamma.is_zero()) return out;
    const SystemShape sh = sys.shape(budget.certainty);
    if (sh.zero) throw PreconditionError("eigenvalue shift of the zero system");
    const Rational e = -sh.sigma * sh.h - sh.p;
    BiMatrix m = sys.M();
    for (std::size_t i = 0; i < sys.n(); ++i) m(i, i) -= BiSeries::monomial(gamma, e, -sh.h);
    out.sys = PerturbedSystem(std::move(m), sys.s(), sys.d());
    out.term.eps_exp = ratio(-sh.h, sys.d());
    if (e == -1) {
        out.term.coeff = gamma;
        out.term.log = true;
    } else {
        out.term.coeff = gamma / AlgebraicNumber(Rational(e + 1));
        out.term.x_exp = e + 1;
    }
    return out;
}

/* ---------------------------------------------------- turning points */

TurningPointResult resolve_turning_point(const PerturbedSystem& sys, const Budget& budget) {
    const SystemShape sh = sys.shape(budget.certainty);
    if (sh.zero) throw PreconditionError("turning point of the zero system");
    const PxMatrix a0 = sys.coefficient(0, sh);
    if (!nilpotent(constant_term(a0))) throw PreconditionError("A_{0,0} is not nilpotent");
    PuiseuxExponents np;
    try {
        np = newton_puiseux_exponents(a0, budget.certainty);
    } catch (const AllNilpotent&) {
        throw PreconditionError("A_0(x) is nilpotent");
    }
    const int s = std::lcm(ram_of(a0), static_cast<int>(np.minimal.get_den().get_si()));
    XTarget t(a0, s);
    std::vector<std::pair<long, std::size_t>> hist;
    moser_reduce(t, budget, hist);
    TurningPointResult out;
    out.sys = gauge_apply(sys, gauge_of(t.T, t.Tinv), budget);
    out.sys.set_ramification(std::lcm(sys.s(), s), sys.d());
    if (leading_nilpotent(out.sys, out.sys.shape(budget.certainty)))
        throw Error("turning point resolution left a nilpotent leading matrix");
    out.s = s;
    out.exponent = np.minimal;
    out.T = std::move(t.T);
    return out;
}

/* ------------------------------------------------ eps-rank reduction */

PerturbedSystem ramify_eps(const PerturbedSystem& sys, long d) {
    return PerturbedSystem(ramified(sys.M(), d), sys.s(), sys.d() * d);
}

std::size_t leading_rank(const PerturbedSystem& sys, const Budget& budget) {
    const SystemShape sh = sys.shape(budget.certainty);
    if (sh.zero) return 0;
    return rank(sys.coefficient(0, sh), budget.certainty, budget.x_terms);
}

RankReductionResult eps_rank_reduce(const PerturbedSystem& sys, const Budget& budget) {
    const SystemShape sh = sys.shape(budget.certainty);
    if (sh.zero || sh.h <= 0) return {bi_identity(sys.n()), sys, {}, 1};
    if (sh.h > 1 && !vanishes(theta(sys, sh, budget), budget.certainty))
        return {bi_identity(sys.n()), sys, {{sh.h, leading_rank(sys, budget)}}, 1};
    EpsTarget t(sys, budget, bi_identity(sys.n()));
    std::vector<std::pair<long, std::size_t>> hist;
    if (moser_reduce(t, budget, hist) != Stop::StalledH1) return {t.R, t.sys, hist, 1};

    const ExpOrderResult eo = exp_order_system(t.sys, budget);
    const long dc = eo.omega.get_den().get_si();
    if (dc > 1) {
        EpsTarget t2(ramify_eps(t.sys, dc), budget, ramified(t.R, dc));
        auto hist2 = hist;
        Stop st = moser_reduce(t2, budget, hist2);
        if (st != Stop::StalledH1 && t2.h() > 0 && !leading_nilpotent(t2.sys, t2.sh))
            return {t2.R, t2.sys, hist2, dc};
    }
    const long d = static_cast<long>(sys.n()) + 1;
    EpsTarget t3(ramify_eps(t.sys, d), budget, ramified(t.R, d));
    auto hist3 = hist;
    Stop st = moser_reduce(t3, budget, hist3);
    if (st == Stop::StalledH1 || t3.h() == 1)
        throw StalledH1("the true eps-rank is 0 and an Arnold-Wasow normal form is needed to reach it");
    return {t3.R, t3.sys, hist3, d};
}

/* --------------------------------------------------- exponential order */

ExpOrderResult exp_order_system(const PerturbedSystem& sys, const Budget& budget) {
    const SystemShape sh = sys.shape(budget.certainty);
    if (sh.zero) throw PreconditionError("exponential order of the zero system");
    const long n = static_cast<long>(sys.n());
    const std::vector<BiSeries> alpha = char_poly(sys);
    ExpOrderResult out;
    out.omega = 0;
    for (long i = 0; i <= n; ++i) {
        NormalData nd = normalize(alpha[static_cast<std::size_t>(i)], budget.certainty);
        out.vals.push_back(nd.zero ? std::nullopt : std::optional<long>(nd.nu));
    }
    for (long i = 0; i < n; ++i) {
        const auto& v = out.vals[static_cast<std::size_t>(i)];
        if (v && ratio(-*v, n - i) > out.omega) out.omega = ratio(-*v, n - i);
    }
    for (long i = 0; i <= n; ++i) {
        const auto& v = out.vals[static_cast<std::size_t>(i)];
        if (v && Rational(-*v) == out.omega * (n - i)) out.support.push_back(i);
    }
    const long i0 = out.support.front();
    for (long i : out.support) {
        const BiSeries& a = alpha[static_cast<std::size_t>(i)];
        out.E += LambdaPoly::monomial(a.coeff(*out.vals[static_cast<std::size_t>(i)]), static_cast<int>(i - i0));
    }
    out.guard = sh.h > n - static_cast<long>(leading_rank(sys, budget));
    return out;
}

long katz_degree(long n, long h, std::size_t r) {
    const long rr = static_cast<long>(r);
    if (h + rr > n) return 1;
    const long den = n * (h - 1) + rr;
    if (den <= 0) throw PreconditionError("ramification lemma needs h - 1 + r/n > 0");
    return (n * n + den - 1) / den;
}

KatzResult katz_ramify(const PerturbedSystem& sys, const Budget& budget, std::optional<long> d) {
    const SystemShape sh = sys.shape(budget.certainty);
    if (sh.zero || sh.h <= 0) throw PreconditionError("ramification lemma needs h > 0");
    const long n = static_cast<long>(sys.n());
    const std::size_t r = leading_rank(sys, budget);
    KatzResult out;
    if (!d && sh.h + static_cast<long>(r) > n) {
        out.d = 1;
        out.reduced = {bi_identity(sys.n()), sys, {{sh.h, r}}, 1};
        out.guard = true;
        return out;
    }
    out.d = d ? *d : katz_degree(n, sh.h, r);
    if (out.d < 1) throw PreconditionError("ramification degree must be positive");
    out.reduced = eps_rank_reduce(ramify_eps(sys, out.d), budget);
    out.reduced.ramification *= out.d;
    const SystemShape rs = out.reduced.sys.shape(budget.certainty);
    out.guard = rs.h + static_cast<long>(leading_rank(out.reduced.sys, budget)) > n;
    return out;
}

}  // namespace formred
