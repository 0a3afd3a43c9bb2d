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

#ifndef FORMRED_POLY_HPP
#define FORMRED_POLY_HPP

#include <algorithm>
#include <cstddef>
#include <utility>
#include <vector>

namespace formred {

/*
   Dense univariate polynomial over a commutative ring R.  R needs a default
   constructor producing zero, +, -, * and a free function exactly_zero(R).
   Coefficients are stored low degree first; trailing exact zeros are trimmed.
*/
template <class R>
class Poly {
  public:
    Poly() = default;
    explicit Poly(std::vector<R> c) : c_(std::move(c)) { trim(); }

    static Poly constant(const R& a) { return Poly(std::vector<R>{a}); }
    static Poly monomial(const R& a, int degree) {
        std::vector<R> c(static_cast<std::size_t>(degree) + 1);
        c.back() = a;
        return Poly(std::move(c));
    }

    int degree() const { return static_cast<int>(c_.size()) - 1; }
    bool is_zero() const { return c_.empty(); }
    R coeff(int i) const {
        if (i < 0 || i > degree()) return R();
        return c_[static_cast<std::size_t>(i)];
    }
    const R& leading() const { return c_.back(); }
    const std::vector<R>& coeffs() const { return c_; }

    void set(int i, const R& a) {
        if (i > degree()) c_.resize(static_cast<std::size_t>(i) + 1);
        c_[static_cast<std::size_t>(i)] = a;
        trim();
    }

    Poly operator-() const {
        std::vector<R> c;
        c.reserve(c_.size());
        for (const auto& a : c_) c.push_back(-a);
        return Poly(std::move(c));
    }
    friend Poly operator+(const Poly& a, const Poly& b) {
        std::vector<R> c(std::max(a.c_.size(), b.c_.size()));
        for (std::size_t i = 0; i < c.size(); ++i) {
            if (i < a.c_.size() && i < b.c_.size())
                c[i] = a.c_[i] + b.c_[i];
            else if (i < a.c_.size())
                c[i] = a.c_[i];
            else
                c[i] = b.c_[i];
        }
        return Poly(std::move(c));
    }
    friend Poly operator-(const Poly& a, const Poly& b) { return a + (-b); }
    friend Poly operator*(const Poly& a, const Poly& b) {
        if (a.c_.empty() || b.c_.empty()) return Poly();
        std::vector<R> c(a.c_.size() + b.c_.size() - 1);
        for (std::size_t i = 0; i < a.c_.size(); ++i) {
            if (exactly_zero(a.c_[i])) continue;
            for (std::size_t j = 0; j < b.c_.size(); ++j) c[i + j] = c[i + j] + a.c_[i] * b.c_[j];
        }
        return Poly(std::move(c));
    }
    friend Poly operator*(const R& s, const Poly& b) {
        std::vector<R> c;
        c.reserve(b.c_.size());
        for (const auto& a : b.c_) c.push_back(s * a);
        return Poly(std::move(c));
    }
    Poly& operator+=(const Poly& o) { return *this = *this + o; }
    Poly& operator-=(const Poly& o) { return *this = *this - o; }
    Poly& operator*=(const Poly& o) { return *this = *this * o; }

    friend bool operator==(const Poly& a, const Poly& b) {
        if (a.c_.size() != b.c_.size()) return false;
        for (std::size_t i = 0; i < a.c_.size(); ++i)
            if (!(a.c_[i] == b.c_[i])) return false;
        return true;
    }

    /* Horner evaluation. */
    R operator()(const R& x) const {
        R acc;
        for (std::size_t i = c_.size(); i-- > 0;) acc = acc * x + c_[i];
        return acc;
    }

    Poly derivative() const {
        std::vector<R> c;
        for (std::size_t i = 1; i < c_.size(); ++i) c.push_back(c_[i] * R(static_cast<long>(i)));
        return Poly(std::move(c));
    }

    template <class F>
    auto map(F f) const {
        using S = decltype(f(std::declval<R>()));
        std::vector<S> c;
        c.reserve(c_.size());
        for (const auto& a : c_) c.push_back(f(a));
        return Poly<S>(std::move(c));
    }

  private:
    void trim() {
        while (!c_.empty() && exactly_zero(c_.back())) c_.pop_back();
    }
    std::vector<R> c_;
};

template <class R>
bool exactly_zero(const Poly<R>& p) {
    return p.is_zero();
}

}  // namespace formred

#endif
