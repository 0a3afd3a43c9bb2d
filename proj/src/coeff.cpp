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

#include "formred/coeff.hpp"

#include <algorithm>
#include <cstdlib>
#include <sstream>

namespace formred {

namespace {

bool contains(const ExtensionTower& outer, const ExtensionTower& inner) {
    if (!inner) return true;
    for (const TowerLevel* t = outer.get(); t; t = t->parent.get())
        if (t == inner.get()) return true;
    return false;
}

std::string paren(const std::string& s) {
    bool composite = s.find_first_of("+*^/", 1) != std::string::npos ||
                     (s.find('-', 1) != std::string::npos);
    return composite ? "(" + s + ")" : s;
}

std::vector<mpz_class> divisors(mpz_class n) {
    std::vector<mpz_class> out;
    n = abs(n);
    if (n == 0 || n > mpz_class("1000000000000")) return out;
    for (mpz_class d = 1; d * d <= n; ++d) {
        if (n % d == 0) {
            out.push_back(d);
            if (d * d != n) out.push_back(n / d);
        }
    }
    return out;
}

bool all_rational(const APoly& p) {
    for (const auto& c : p.coeffs())
        if (!c.is_rational()) return false;
    return true;
}

std::vector<AlgebraicNumber> rational_roots(const APoly& p) {
    std::vector<AlgebraicNumber> roots;
    mpz_class l = 1;
    for (const auto& c : p.coeffs()) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), c.rational().get_den_mpz_t());
    std::vector<mpz_class> ic;
    for (const auto& c : p.coeffs()) {
        mpq_class v = c.rational() * l;
        ic.push_back(v.get_num());
    }
    if (ic.front() == 0) roots.emplace_back(0L);
    std::size_t lo = 0;
    while (lo < ic.size() && ic[lo] == 0) ++lo;
    if (lo + 1 >= ic.size()) return roots;
    auto num = divisors(ic[lo]);
    auto den = divisors(ic.back());
    std::vector<mpq_class> cand;
    for (const auto& a : num)
        for (const auto& b : den) {
            mpq_class r(a, b);
            r.canonicalize();
            cand.push_back(r);
            cand.push_back(-r);
        }
    std::sort(cand.begin(), cand.end());
    cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
    for (const auto& r : cand) {
        mpq_class acc = 0;
        for (std::size_t i = ic.size(); i-- > 0;) acc = acc * r + mpq_class(ic[i]);
        if (acc == 0) roots.emplace_back(r);
    }
    return roots;
}

}  // namespace

struct TowerOps {
    static std::vector<AlgebraicNumber> coords_at(const AlgebraicNumber& a, const ExtensionTower& top) {
        if (a.node_ == top) return a.c_;
        return {a};
    }

    static void reduce(std::vector<AlgebraicNumber>& c, const ExtensionTower& top) {
        const auto& m = top->minpoly.coeffs();
        const std::size_t d = m.size() - 1;
        for (std::size_t k = c.size(); k-- > d;) {
            if (c[k].is_zero()) continue;
            AlgebraicNumber lead = c[k];
            for (std::size_t j = 0; j < d; ++j)
                if (!m[j].is_zero()) c[k - d + j] -= lead * m[j];
            c[k] = AlgebraicNumber();
        }
        if (c.size() > d) c.resize(d);
    }
};

AlgebraicNumber AlgebraicNumber::make(ExtensionTower node, std::vector<AlgebraicNumber> c) {
    while (!c.empty() && c.back().is_zero()) c.pop_back();
    if (c.empty()) return AlgebraicNumber();
    if (c.size() == 1) return c[0];
    AlgebraicNumber r;
    r.node_ = std::move(node);
    r.c_ = std::move(c);
    return r;
}

AlgebraicNumber AlgebraicNumber::generator(const ExtensionTower& t) {
    if (!t) throw PreconditionError("the rationals have no generator");
    return make(t, {AlgebraicNumber(), AlgebraicNumber(1L)});
}

const mpq_class& AlgebraicNumber::rational() const {
    if (node_) throw PreconditionError("algebraic number is not rational");
    return q_;
}

AlgebraicNumber AlgebraicNumber::operator-() const {
    if (!node_) return AlgebraicNumber(mpq_class(-q_));
    std::vector<AlgebraicNumber> c;
    for (const auto& x : c_) c.push_back(-x);
    return make(node_, std::move(c));
}

AlgebraicNumber operator+(const AlgebraicNumber& a, const AlgebraicNumber& b) {
    if (!a.node_ && !b.node_) return AlgebraicNumber(mpq_class(a.q_ + b.q_));
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    ExtensionTower top = join(a.node_, b.node_);
    auto ca = TowerOps::coords_at(a, top);
    auto cb = TowerOps::coords_at(b, top);
    if (ca.size() < cb.size()) ca.resize(cb.size());
    for (std::size_t i = 0; i < cb.size(); ++i) ca[i] += cb[i];
    return AlgebraicNumber::make(top, std::move(ca));
}

AlgebraicNumber operator-(const AlgebraicNumber& a, const AlgebraicNumber& b) { return a + (-b); }

AlgebraicNumber operator*(const AlgebraicNumber& a, const AlgebraicNumber& b) {
    if (!a.node_ && !b.node_) return AlgebraicNumber(mpq_class(a.q_ * b.q_));
    if (a.is_zero() || b.is_zero()) return AlgebraicNumber();
    ExtensionTower top = join(a.node_, b.node_);
    if (a.node_ != top || b.node_ != top) {
        const AlgebraicNumber& s = a.node_ == top ? b : a;
        const AlgebraicNumber& v = a.node_ == top ? a : b;
        std::vector<AlgebraicNumber> c;
        for (const auto& x : v.c_) c.push_back(s * x);
        return AlgebraicNumber::make(top, std::move(c));
    }
    std::vector<AlgebraicNumber> c(a.c_.size() + b.c_.size() - 1);
    for (std::size_t i = 0; i < a.c_.size(); ++i) {
        if (a.c_[i].is_zero()) continue;
        for (std::size_t j = 0; j < b.c_.size(); ++j) c[i + j] += a.c_[i] * b.c_[j];
    }
    TowerOps::reduce(c, top);
    return AlgebraicNumber::make(top, std::move(c));
}

AlgebraicNumber AlgebraicNumber::inverse() const {
    if (is_zero()) throw DivisionByZero();
    if (!node_) return AlgebraicNumber(mpq_class(1 / q_));
    // extended Euclid on (this, minpoly) over the parent field
    APoly r0 = node_->minpoly, r1(c_);
    APoly s0, s1 = APoly::constant(AlgebraicNumber(1L));
    while (!r1.is_zero()) {
        auto [q, r] = divmod(r0, r1);
        APoly s2 = s0 - q * s1;
        r0 = std::move(r1);
        r1 = std::move(r);
        s0 = std::move(s1);
        s1 = std::move(s2);
    }
    if (r0.degree() > 0) throw ZeroDivisor(node_, monic(r0));
    AlgebraicNumber g = r0.coeff(0).inverse();
    std::vector<AlgebraicNumber> c;
    for (const auto& x : s0.coeffs()) c.push_back(x * g);
    TowerOps::reduce(c, node_);
    return make(node_, std::move(c));
}

AlgebraicNumber operator/(const AlgebraicNumber& a, const AlgebraicNumber& b) {
    if (b.is_zero()) throw DivisionByZero();
    return a * b.inverse();
}

AlgebraicNumber AlgebraicNumber::pow(long e) const {
    if (e < 0) return inverse().pow(-e);
    AlgebraicNumber r(1L), base = *this;
    while (e > 0) {
        if (e & 1) r *= base;
        base *= base;
        e >>= 1;
    }
    return r;
}

bool operator==(const AlgebraicNumber& a, const AlgebraicNumber& b) {
    if (a.node_ != b.node_) return false;
    if (!a.node_) return a.q_ == b.q_;
    return a.c_ == b.c_;
}

bool canonical_less(const AlgebraicNumber& a, const AlgebraicNumber& b) {
    int da = depth(a.node_), db = depth(b.node_);
    if (da != db) return da < db;
    if (!a.node_) return a.q_ < b.q_;
    if (a.c_.size() != b.c_.size()) return a.c_.size() < b.c_.size();
    for (std::size_t i = a.c_.size(); i-- > 0;) {
        if (canonical_less(a.c_[i], b.c_[i])) return true;
        if (canonical_less(b.c_[i], a.c_[i])) return false;
    }
    return false;
}

std::string AlgebraicNumber::to_string() const {
    if (!node_) return q_.get_str();
    std::string out;
    for (std::size_t i = c_.size(); i-- > 0;) {
        if (c_[i].is_zero()) continue;
        std::string mono = i == 0 ? "" : (i == 1 ? node_->name : node_->name + "^" + std::to_string(i));
        std::string coef = c_[i].to_string();
        std::string term;
        if (mono.empty())
            term = coef;
        else if (coef == "1")
            term = mono;
        else if (coef == "-1")
            term = "-" + mono;
        else
            term = paren(coef) + "*" + mono;
        if (out.empty())
            out = term;
        else if (term[0] == '-')
            out += " - " + term.substr(1);
        else
            out += " + " + term;
    }
    return out;
}

ExtensionTower join(const ExtensionTower& a, const ExtensionTower& b) {
    if (contains(a, b)) return a;
    if (contains(b, a)) return b;
    throw IncompatibleTowers();
}

int depth(const ExtensionTower& t) { return t ? t->depth : 0; }

std::vector<std::pair<std::string, std::string>> describe(const ExtensionTower& t) {
    std::vector<std::pair<std::string, std::string>> out;
    for (const TowerLevel* l = t.get(); l; l = l->parent.get())
        out.emplace_back(l->name, "RootOf(" + to_string(l->minpoly) + ", index=" + std::to_string(l->depth) + ")");
    std::reverse(out.begin(), out.end());
    return out;
}

ZeroDivisor::ZeroDivisor(ExtensionTower level, APoly factor)
    : Error("zero divisor: defining polynomial of " + level->name + " has factor " + to_string(factor)),
      level(std::move(level)),
      factor(std::move(factor)) {}

NotSquarefree::NotSquarefree(APoly g) : Error("not squarefree: repeated factor " + to_string(g)), gcd(std::move(g)) {}

APoly monic(const APoly& p) {
    if (p.is_zero()) return p;
    AlgebraicNumber li = p.leading().inverse();
    return li * p;
}

std::pair<APoly, APoly> divmod(const APoly& a, const APoly& b) {
    if (b.is_zero()) throw DivisionByZero();
    const int db = b.degree();
    AlgebraicNumber li = b.leading().inverse();
    std::vector<AlgebraicNumber> r = a.coeffs();
    std::vector<AlgebraicNumber> q(std::max(0, a.degree() - db + 1));
    for (int k = a.degree(); k >= db; --k) {
        AlgebraicNumber c = r[static_cast<std::size_t>(k)] * li;
        if (c.is_zero()) continue;
        q[static_cast<std::size_t>(k - db)] = c;
        for (int j = 0; j <= db; ++j) r[static_cast<std::size_t>(k - db + j)] -= c * b.coeff(j);
    }
    if (static_cast<int>(r.size()) > db) r.resize(static_cast<std::size_t>(std::max(db, 0)));
    return {APoly(std::move(q)), APoly(std::move(r))};
}

APoly gcd(const APoly& a, const APoly& b) {
    APoly r0 = a, r1 = b;
    while (!r1.is_zero()) {
        APoly r = divmod(r0, r1).second;
        r0 = std::move(r1);
        r1 = std::move(r);
    }
    return monic(r0);
}

std::vector<std::pair<APoly, int>> squarefree_decomposition(const APoly& p) {
    std::vector<std::pair<APoly, int>> out;
    if (p.degree() < 1) return out;
    APoly f = monic(p);
    APoly df = f.derivative();
    APoly a = gcd(f, df);
    APoly b = divmod(f, a).first;
    APoly c = divmod(df, a).first;
    APoly d = c - b.derivative();
    for (int i = 1; b.degree() > 0; ++i) {
        APoly g = gcd(b, d);
        if (g.degree() > 0) out.emplace_back(g, i);
        APoly bn = divmod(b, g).first;
        c = divmod(d, g).first;
        b = std::move(bn);
        d = c - b.derivative();
    }
    return out;
}

std::string to_string(const APoly& p, const std::string& var) {
    if (p.is_zero()) return "0";
    std::string out;
    for (int i = p.degree(); i >= 0; --i) {
        const AlgebraicNumber& c = p.coeffs()[static_cast<std::size_t>(i)];
        if (c.is_zero()) continue;
        std::string mono = i == 0 ? "" : (i == 1 ? var : var + "^" + std::to_string(i));
        std::string cs = c.to_string();
        std::string term;
        if (mono.empty())
            term = cs;
        else if (cs == "1")
            term = mono;
        else if (cs == "-1")
            term = "-" + mono;
        else
            term = paren(cs) + "*" + mono;
        if (out.empty())
            out = term;
        else if (term[0] == '-')
            out += "-" + term.substr(1);
        else
            out += "+" + term;
    }
    return out;
}

std::pair<ExtensionTower, AlgebraicNumber> adjoin_root(const ExtensionTower& tower, const APoly& poly) {
    if (poly.degree() < 2) throw PreconditionError("adjoined polynomial must have degree >= 2");
    if (!poly.leading().is_one()) throw PreconditionError("adjoined polynomial must be monic");
    APoly g = gcd(poly, poly.derivative());
    if (g.degree() > 0) throw NotSquarefree(g);
    ExtensionTower parent = tower;
    for (const auto& c : poly.coeffs()) parent = join(parent, c.level());
    auto level = std::make_shared<TowerLevel>();
    level->parent = parent;
    level->depth = depth(parent) + 1;
    level->name = "r" + std::to_string(level->depth);
    level->minpoly = poly;
    ExtensionTower t = level;
    return {t, AlgebraicNumber::generator(t)};
}

std::vector<std::pair<AlgebraicNumber, int>> distinct_root_partition(const APoly& poly, const FactorHints* hints) {
    if (poly.degree() < 0) throw PreconditionError("zero polynomial has no root partition");
    std::vector<std::pair<AlgebraicNumber, int>> rational, adjoined;
    for (auto [g, mult] : squarefree_decomposition(poly)) {
        while (g.degree() >= 1) {
            if (g.degree() == 1) {
                AlgebraicNumber r = -g.coeff(0);
                (r.is_rational() ? rational : adjoined).emplace_back(r, mult);
                break;
            }
            if (all_rational(g)) {
                auto roots = rational_roots(g);
                if (!roots.empty()) {
                    for (const auto& r : roots) {
                        rational.emplace_back(r, mult);
                        g = divmod(g, APoly({-r, AlgebraicNumber(1L)})).first;
                    }
                    continue;
                }
            }
            APoly target = g;
            if (hints) {
                for (const auto& h : *hints) {
                    if (h.degree() >= 2 && h.degree() < target.degree()) {
                        bool ok = true;
                        try {
                            ok = divmod(target, h).second.is_zero();
                        } catch (const IncompatibleTowers&) {
                            ok = false;
                        }
                        if (ok) target = h;
                    }
                }
            }
            ExtensionTower base;
            for (const auto& c : target.coeffs()) base = join(base, c.level());
            auto [t, theta] = adjoin_root(base, target);
            adjoined.emplace_back(theta, mult);
            g = divmod(g, APoly({-theta, AlgebraicNumber(1L)})).first;
        }
    }
    std::sort(rational.begin(), rational.end(),
              [](const auto& a, const auto& b) { return a.first.rational() < b.first.rational(); });
    rational.insert(rational.end(), adjoined.begin(), adjoined.end());
    return rational;
}

}  // namespace formred
