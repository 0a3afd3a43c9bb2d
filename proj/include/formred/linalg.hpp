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

#ifndef FORMRED_LINALG_HPP
#define FORMRED_LINALG_HPP

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "formred/coeff.hpp"
#include "formred/poly.hpp"
#include "formred/series.hpp"

namespace formred {

/* Dense row-major matrix over a commutative ring with zero R(). */
template <class R>
class Matrix {
  public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols) : r_(rows), c_(cols), a_(rows * cols) {}

    static Matrix identity(std::size_t n, const R& one) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = one;
        return m;
    }

    std::size_t rows() const { return r_; }
    std::size_t cols() const { return c_; }
    bool is_square() const { return r_ == c_; }

    R& operator()(std::size_t i, std::size_t j) { return a_[i * c_ + j]; }
    const R& operator()(std::size_t i, std::size_t j) const { return a_[i * c_ + j]; }

    Matrix block(std::size_t i0, std::size_t j0, std::size_t nr, std::size_t nc) const {
        if (i0 + nr > r_ || j0 + nc > c_) throw DimensionMismatch("block outside the matrix");
        Matrix b(nr, nc);
        for (std::size_t i = 0; i < nr; ++i)
            for (std::size_t j = 0; j < nc; ++j) b(i, j) = (*this)(i0 + i, j0 + j);
        return b;
    }
    void set_block(std::size_t i0, std::size_t j0, const Matrix& b) {
        if (i0 + b.r_ > r_ || j0 + b.c_ > c_) throw DimensionMismatch("block outside the matrix");
        for (std::size_t i = 0; i < b.r_; ++i)
            for (std::size_t j = 0; j < b.c_; ++j) (*this)(i0 + i, j0 + j) = b(i, j);
    }
    /* Rows and columns picked by index lists. */
    Matrix select(const std::vector<std::size_t>& rows, const std::vector<std::size_t>& cols) const {
        Matrix b(rows.size(), cols.size());
        for (std::size_t i = 0; i < rows.size(); ++i)
            for (std::size_t j = 0; j < cols.size(); ++j) b(i, j) = (*this)(rows[i], cols[j]);
        return b;
    }

    Matrix transpose() const {
        Matrix t(c_, r_);
        for (std::size_t i = 0; i < r_; ++i)
            for (std::size_t j = 0; j < c_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    template <class F>
    auto map(F f) const {
        using S = decltype(f(std::declval<const R&>()));
        Matrix<S> m(r_, c_);
        for (std::size_t i = 0; i < r_; ++i)
            for (std::size_t j = 0; j < c_; ++j) m(i, j) = f((*this)(i, j));
        return m;
    }

    bool is_zero() const {
        for (const auto& x : a_)
            if (!exactly_zero(x)) return false;
        return true;
    }

    Matrix operator-() const {
        Matrix m(r_, c_);
        for (std::size_t k = 0; k < a_.size(); ++k) m.a_[k] = -a_[k];
        return m;
    }
    friend Matrix operator+(const Matrix& a, const Matrix& b) {
        a.same_shape(b);
        Matrix m = a;
        for (std::size_t k = 0; k < m.a_.size(); ++k) m.a_[k] = a.a_[k] + b.a_[k];
        return m;
    }
    friend Matrix operator-(const Matrix& a, const Matrix& b) {
        a.same_shape(b);
        Matrix m = a;
        for (std::size_t k = 0; k < m.a_.size(); ++k) m.a_[k] = a.a_[k] - b.a_[k];
        return m;
    }
    friend Matrix operator*(const Matrix& a, const Matrix& b) {
        if (a.c_ != b.r_) throw DimensionMismatch("product of incompatible matrices");
        Matrix m(a.r_, b.c_);
        for (std::size_t i = 0; i < a.r_; ++i)
            for (std::size_t k = 0; k < a.c_; ++k) {
                const R& x = a(i, k);
                if (exactly_zero(x)) continue;
                for (std::size_t j = 0; j < b.c_; ++j) {
                    const R& y = b(k, j);
                    if (exactly_zero(y)) continue;
                    m(i, j) = m(i, j) + x * y;
                }
            }
        return m;
    }
    friend bool operator==(const Matrix& a, const Matrix& b) {
        return a.r_ == b.r_ && a.c_ == b.c_ && a.a_ == b.a_;
    }
    friend bool operator!=(const Matrix& a, const Matrix& b) { return !(a == b); }

  private:
    void same_shape(const Matrix& b) const {
        if (r_ != b.r_ || c_ != b.c_) throw DimensionMismatch("sum of matrices of different shapes");
    }
    std::size_t r_ = 0, c_ = 0;
    std::vector<R> a_;
};

template <class R>
bool exactly_zero(const Matrix<R>& m) {
    return m.is_zero();
}

using QMatrix = Matrix<AlgebraicNumber>;
using PxMatrix = Matrix<PuiseuxSeries>;
using BiMatrix = Matrix<BiSeries>;

/*
   Berkowitz: coefficients of det(lambda I - A), lowest degree first, with
   ring operations only.
*/
template <class R>
std::vector<R> berkowitz(const Matrix<R>& a, const R& one) {
    if (!a.is_square()) throw DimensionMismatch("characteristic polynomial of a non-square matrix");
    const std::size_t n = a.rows();
    std::vector<R> v{one};  // highest degree first
    for (std::size_t k = 0; k < n; ++k) {
        std::vector<R> t;
        t.reserve(k + 2);
        t.push_back(one);
        t.push_back(-a(k, k));
        std::vector<R> s(k);
        for (std::size_t i = 0; i < k; ++i) s[i] = a(i, k);
        for (std::size_t step = 0; step < k; ++step) {
            R acc{};
            for (std::size_t j = 0; j < k; ++j)
                if (!exactly_zero(a(k, j)) && !exactly_zero(s[j])) acc = acc + a(k, j) * s[j];
            t.push_back(-acc);
            std::vector<R> ns(k);
            for (std::size_t i = 0; i < k; ++i)
                for (std::size_t j = 0; j < k; ++j)
                    if (!exactly_zero(a(i, j)) && !exactly_zero(s[j])) ns[i] = ns[i] + a(i, j) * s[j];
            s = std::move(ns);
        }
        std::vector<R> nv(k + 2);
        for (std::size_t i = 0; i < k + 2; ++i)
            for (std::size_t j = 0; j <= i && j < v.size(); ++j)
                if (!exactly_zero(t[i - j]) && !exactly_zero(v[j])) nv[i] = nv[i] + t[i - j] * v[j];
        v = std::move(nv);
    }
    return std::vector<R>(v.rbegin(), v.rend());
}

template <class R>
R determinant(const Matrix<R>& a, const R& one) {
    std::vector<R> c = berkowitz(a, one);
    return a.rows() % 2 == 0 ? c.front() : -c.front();
}

template <class R>
std::string to_string(const Matrix<R>& m) {
    std::string s = "[";
    for (std::size_t i = 0; i < m.rows(); ++i) {
        s += i ? ", [" : "[";
        for (std::size_t j = 0; j < m.cols(); ++j) {
            if (j) s += ", ";
            s += m(i, j).to_string();
        }
        s += "]";
    }
    return s + "]";
}

/* ------------------------------------------------------------ constants */

QMatrix q_identity(std::size_t n);
/* P with (A P) column j = A column perm[j]. */
QMatrix permutation_matrix(const std::vector<std::size_t>& perm);
PxMatrix to_px(const QMatrix& a);
BiMatrix to_bi(const PxMatrix& a);
BiMatrix to_bi(const QMatrix& a);

struct Rref {
    QMatrix r;
    std::vector<std::size_t> pivots;
};
Rref rref(const QMatrix& a);
std::size_t rank(const QMatrix& a);
/* Columns spanning the right kernel, one per free column of the RREF. */
QMatrix nullspace(const QMatrix& a);
QMatrix inverse(const QMatrix& a);
/* Monic det(lambda I - A). */
APoly char_poly(const QMatrix& a);

/* Solves P X - X Q = C for constant matrices with disjoint spectra. */
QMatrix sylvester_solve(const QMatrix& p, const QMatrix& q, const QMatrix& c);

/* The Sylvester operator X -> P X - X Q, inverted once for repeated solves. */
class SylvesterOperator {
  public:
    SylvesterOperator(const QMatrix& p, const QMatrix& q);
    QMatrix solve(const QMatrix& c) const;

  private:
    std::size_t m_ = 0, k_ = 0;
    QMatrix inv_;
};

/* ------------------------------------------------------- Puiseux matrices */

/* Known to vanish up to at least x^threshold. */
bool certified_zero(const PuiseuxSeries& f, const Rational& threshold);

PxMatrix px_identity(std::size_t n);
/* Constant term of each entry; entries must have nonnegative valuation. */
QMatrix constant_term(const PxMatrix& a);
PxMatrix derive(const PxMatrix& a);
PxMatrix shift(const PxMatrix& a, const Rational& e);
/* Minimal valuation over known nonzero entries, nullopt if none. */
std::optional<Rational> valuation(const PxMatrix& a);
/* Gauss-Jordan over C((x^(1/s))) with pivots of least valuation. */
PxMatrix inverse(const PxMatrix& a, long x_terms);

/*
   U in GL_n(C[[x]]) with A0 U = [B | 0] where B has r columns of full rank;
   the last n - r columns of U span ker A0.
*/
struct ColumnReduction {
    PxMatrix U;
    PxMatrix Uinv;
    std::size_t r = 0;
};
ColumnReduction smith_column_reduce(const PxMatrix& a0, long certainty, long x_terms);
std::size_t rank(const PxMatrix& a, long certainty, long x_terms);

/* Basis of row vectors w over C[[x]] with w M = 0, each with w(0) != 0. */
std::vector<std::vector<PuiseuxSeries>> left_nullspace(const PxMatrix& m, long certainty, long x_terms);
std::vector<PuiseuxSeries> left_nullvector(const PxMatrix& m, long certainty, long x_terms);

/* Solves P X - X Q = C over C((x^(1/s))) when P(0), Q(0) have disjoint spectra. */
PxMatrix sylvester_series(const PxMatrix& p, const PxMatrix& q, const PxMatrix& c, long x_terms);

/* Leading exponents of the nonzero eigenvalues of A0(x). */
struct EigenExponent {
    Rational exponent;
    AlgebraicNumber coeff;
    int multiplicity = 0;
};
struct PuiseuxExponents {
    std::vector<EigenExponent> exponents;  // ascending exponent
    Rational minimal;
    int s = 1;
};
PuiseuxExponents newton_puiseux_exponents(const PxMatrix& a0, long certainty);
/* Coefficients of det(lambda I - A0(x)), lowest degree first. */
std::vector<PuiseuxSeries> char_poly(const PxMatrix& a0);

/* -------------------------------------------------------- bivariate */

BiMatrix bi_identity(std::size_t n);
PxMatrix eps_coeff(const BiMatrix& a, long k);
BiMatrix derive(const BiMatrix& a);
BiMatrix inverse(const BiMatrix& a, const Budget& budget);

/* (h, p, sigma) of xi^h x^p dF = A(x, xi) F, derived from the raw matrix. */
struct SystemShape {
    long h = 0;
    Rational p;
    Rational sigma;
    long nu = 0;
    bool zero = true;
};

/*
   dF = M(x, eps) F stored raw.  The normal form A = xi^h x^p M with
   xi = x^sigma eps has coefficients A_j = x^(-sigma (nu + j) - p_M) M_(nu + j).
*/
class PerturbedSystem {
  public:
    PerturbedSystem() = default;
    explicit PerturbedSystem(BiMatrix m, int s = 1, long d = 1);
    /* Builds M from the normal-form data A(x, xi) = sum_j A_j xi^j. */
    static PerturbedSystem from_normal(long h, const Rational& p, const Rational& sigma, const BiMatrix& a_xi,
                                       int s = 1, long d = 1);

    std::size_t n() const { return m_.rows(); }
    const BiMatrix& M() const { return m_; }
    int s() const { return s_; }
    long d() const { return d_; }
    void set_ramification(int s, long d) {
        s_ = s;
        d_ = d;
    }

    SystemShape shape(long certainty) const;
    /* A_j(x) for the given shape. */
    PxMatrix coefficient(long j, const SystemShape& sh) const;
    /* A(x, xi) as a matrix of bivariate series in (x, xi). */
    BiMatrix normal_matrix(const SystemShape& sh) const;

  private:
    BiMatrix m_;
    int s_ = 1;
    long d_ = 1;
};

/* Gauge change F = T G with T^{-1} supplied by the caller. */
struct Gauge {
    BiMatrix T;
    BiMatrix Tinv;
};
Gauge gauge_of(const QMatrix& t);
Gauge gauge_of(const PxMatrix& t, const PxMatrix& tinv);
Gauge compose(const Gauge& a, const Gauge& b);

/* M~ = T^{-1} M T - T^{-1} dT, truncated to the budget around its normal form. */
PerturbedSystem gauge_apply(const PerturbedSystem& sys, const Gauge& g, const Budget& budget);
PerturbedSystem truncate(const PerturbedSystem& sys, const Budget& budget);

/* Leverrier-Faddeev: det(lambda I - M) = sum alpha_i lambda^i, alpha_n = 1. */
std::vector<BiSeries> char_poly(const PerturbedSystem& sys);

}  // namespace formred

#endif
