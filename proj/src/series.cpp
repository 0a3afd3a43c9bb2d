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

#include "formred/series.hpp"

#include <algorithm>
#include <numeric>

namespace formred {

namespace {

long add_inf(long a, long b) {
    if (a == PuiseuxSeries::kInf || b == PuiseuxSeries::kInf) return PuiseuxSeries::kInf;
    return a + b;
}

long lcm_l(long a, long b) { return std::lcm(a, b); }

std::string paren_coeff(const AlgebraicNumber& c) {
    std::string s = c.to_string();
    if (s.find_first_of("+* ", 1) != std::string::npos || s.find('-', 1) != std::string::npos ||
        (!c.is_rational() && s.find('/') != std::string::npos))
        return "(" + s + ")";
    return s;
}

std::string power(const std::string& var, const Rational& e) {
    if (e == 1) return var;
    if (e.get_den() == 1 && e > 0) return var + "^" + e.get_str();
    return var + "^(" + e.get_str() + ")";
}

std::string join_terms(const std::vector<std::string>& terms) {
    if (terms.empty()) return "0";
    std::string out = terms.front();
    for (std::size_t i = 1; i < terms.size(); ++i) {
        if (terms[i][0] == '-')
            out += " - " + terms[i].substr(1);
        else
            out += " + " + terms[i];
    }
    return out;
}

}  // namespace

Rational floor_q(const Rational& q) {
    mpz_class f;
    mpz_fdiv_q(f.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
    return Rational(f);
}

Rational ceil_q(const Rational& q) {
    mpz_class c;
    mpz_cdiv_q(c.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
    return Rational(c);
}

long to_long(const Rational& q) {
    if (q.get_den() != 1) throw PreconditionError("expected an integer, got " + q.get_str());
    if (!q.get_num().fits_slong_p()) throw PreconditionError("integer out of range");
    return q.get_num().get_si();
}

std::string to_string(const Rational& q) { return q.get_str(); }

// ---------------------------------------------------------------- Puiseux

PuiseuxSeries::PuiseuxSeries(const AlgebraicNumber& c) {
    if (!c.is_zero()) c_.push_back(c);
}

PuiseuxSeries PuiseuxSeries::monomial(const AlgebraicNumber& c, const Rational& e0) {
    Rational e = e0;
    e.canonicalize();
    PuiseuxSeries r;
    if (c.is_zero()) return r;
    r.ram_ = static_cast<int>(e.get_den().get_si());
    r.vlo_ = e.get_num().get_si();
    r.c_.push_back(c);
    return r;
}

PuiseuxSeries PuiseuxSeries::big_o(const Rational& e0) {
    Rational e = e0;
    e.canonicalize();
    PuiseuxSeries r;
    r.ram_ = static_cast<int>(e.get_den().get_si());
    r.prec_ = e.get_num().get_si();
    return r;
}

PuiseuxSeries PuiseuxSeries::from_coeffs(int ram, long vlo, std::vector<AlgebraicNumber> c, long prec) {
    PuiseuxSeries r;
    r.ram_ = ram;
    r.vlo_ = vlo;
    r.prec_ = prec;
    if (prec != kInf && vlo + static_cast<long>(c.size()) > prec) c.resize(static_cast<std::size_t>(std::max(0L, prec - vlo)));
    r.c_ = std::move(c);
    r.trim();
    return r;
}

void PuiseuxSeries::trim() {
    while (!c_.empty() && c_.back().is_zero()) c_.pop_back();
    std::size_t lead = 0;
    while (lead < c_.size() && c_[lead].is_zero()) ++lead;
    if (lead > 0) {
        c_.erase(c_.begin(), c_.begin() + static_cast<long>(lead));
        vlo_ += static_cast<long>(lead);
    }
    if (c_.empty()) vlo_ = 0;
}

bool PuiseuxSeries::is_monomial() const { return exact() && c_.size() == 1; }

std::optional<Rational> PuiseuxSeries::precision() const {
    if (exact()) return std::nullopt;
    return ratio(prec_, ram_);
}

std::optional<Rational> PuiseuxSeries::valuation() const {
    if (c_.empty()) return std::nullopt;
    Rational v(vlo_, ram_);
    v.canonicalize();
    return v;
}

std::optional<Rational> PuiseuxSeries::lower_bound() const {
    if (!c_.empty()) return valuation();
    auto p = precision();
    if (p) p->canonicalize();
    return p;
}

const AlgebraicNumber& PuiseuxSeries::leading() const {
    if (c_.empty()) throw InsufficientOrder("leading coefficient of a series with no known term");
    return c_.front();
}

AlgebraicNumber PuiseuxSeries::coeff(const Rational& e) const {
    Rational u = e * ram_;
    if (!exact() && u >= prec_) throw InsufficientOrder("coefficient of x^" + e.get_str() + " is beyond the precision");
    if (u.get_den() != 1) return AlgebraicNumber();
    long i = u.get_num().get_si() - vlo_;
    if (i < 0 || i >= static_cast<long>(c_.size())) return AlgebraicNumber();
    return c_[static_cast<std::size_t>(i)];
}

PuiseuxSeries PuiseuxSeries::lifted(int ram) const {
    if (ram % ram_ != 0) throw PreconditionError("ramification must be a multiple");
    if (ram == ram_) return *this;
    const long f = ram / ram_;
    PuiseuxSeries r;
    r.ram_ = ram;
    r.prec_ = exact() ? kInf : prec_ * f;
    r.vlo_ = vlo_ * f;
    if (!c_.empty()) {
        r.c_.resize((c_.size() - 1) * static_cast<std::size_t>(f) + 1);
        for (std::size_t i = 0; i < c_.size(); ++i) r.c_[i * static_cast<std::size_t>(f)] = c_[i];
    }
    return r;
}

PuiseuxSeries PuiseuxSeries::operator-() const {
    PuiseuxSeries r = *this;
    for (auto& c : r.c_) c = -c;
    return r;
}

PuiseuxSeries operator+(const PuiseuxSeries& a0, const PuiseuxSeries& b0) {
    if (a0.exact_zero()) return b0;
    if (b0.exact_zero()) return a0;
    const int ram = static_cast<int>(lcm_l(a0.ram_, b0.ram_));
    PuiseuxSeries a = a0.lifted(ram), b = b0.lifted(ram);
    PuiseuxSeries r;
    r.ram_ = ram;
    r.prec_ = std::min(a.prec_, b.prec_);
    long lo = PuiseuxSeries::kInf, hi = -PuiseuxSeries::kInf;
    for (const auto* s : {&a, &b}) {
        if (s->c_.empty()) continue;
        lo = std::min(lo, s->vlo_);
        hi = std::max(hi, s->vlo_ + static_cast<long>(s->c_.size()));
    }
    hi = std::min(hi, r.prec_);
    if (lo < hi) {
        r.vlo_ = lo;
        r.c_.resize(static_cast<std::size_t>(hi - lo));
        for (const auto* s : {&a, &b})
            for (std::size_t i = 0; i < s->c_.size(); ++i) {
                long idx = s->vlo_ + static_cast<long>(i);
                if (idx < hi) r.c_[static_cast<std::size_t>(idx - lo)] += s->c_[i];
            }
    }
    r.trim();
    return r;
}

PuiseuxSeries operator-(const PuiseuxSeries& a, const PuiseuxSeries& b) { return a + (-b); }

PuiseuxSeries operator*(const PuiseuxSeries& a0, const PuiseuxSeries& b0) {
    if (a0.exact_zero() || b0.exact_zero()) return PuiseuxSeries();
    const int ram = static_cast<int>(lcm_l(a0.ram_, b0.ram_));
    PuiseuxSeries a = a0.lifted(ram), b = b0.lifted(ram);
    const long la = a.c_.empty() ? a.prec_ : a.vlo_;
    const long lb = b.c_.empty() ? b.prec_ : b.vlo_;
    PuiseuxSeries r;
    r.ram_ = ram;
    r.prec_ = std::min(add_inf(a.prec_, lb), add_inf(b.prec_, la));
    if (a.c_.empty() || b.c_.empty()) return r;
    r.vlo_ = a.vlo_ + b.vlo_;
    long end = r.vlo_ + static_cast<long>(a.c_.size() + b.c_.size()) - 1;
    end = std::min(end, r.prec_);
    if (end <= r.vlo_) {
        r.c_.clear();
        r.trim();
        return r;
    }
    r.c_.resize(static_cast<std::size_t>(end - r.vlo_));
    for (std::size_t i = 0; i < a.c_.size(); ++i) {
        if (a.c_[i].is_zero()) continue;
        for (std::size_t j = 0; j < b.c_.size() && i + j < r.c_.size(); ++j) {
            if (b.c_[j].is_zero()) continue;
            r.c_[i + j] += a.c_[i] * b.c_[j];
        }
    }
    r.trim();
    return r;
}

PuiseuxSeries PuiseuxSeries::scaled(const AlgebraicNumber& c) const {
    if (c.is_zero()) return PuiseuxSeries();
    PuiseuxSeries r = *this;
    for (auto& x : r.c_) x *= c;
    return r;
}

PuiseuxSeries PuiseuxSeries::shift(const Rational& e0) const {
    if (exact_zero()) return *this;
    Rational e = e0;
    e.canonicalize();
    const int ram = static_cast<int>(lcm_l(ram_, e.get_den().get_si()));
    PuiseuxSeries r = lifted(ram);
    const long u = Rational(e * ram).get_num().get_si();
    if (!r.c_.empty()) r.vlo_ += u;
    r.prec_ = add_inf(r.prec_, u);
    return r;
}

PuiseuxSeries PuiseuxSeries::derive() const {
    PuiseuxSeries r;
    r.ram_ = ram_;
    r.prec_ = add_inf(prec_, -ram_);
    if (!c_.empty()) {
        r.vlo_ = vlo_ - ram_;
        r.c_.resize(c_.size());
        for (std::size_t i = 0; i < c_.size(); ++i) {
            long idx = vlo_ + static_cast<long>(i);
            r.c_[i] = c_[i] * AlgebraicNumber(idx, ram_);
        }
    }
    r.trim();
    return r;
}

PuiseuxSeries PuiseuxSeries::inverse(const Rational& rel) const {
    if (exact_zero()) throw DivisionByZero();
    if (c_.empty()) throw InsufficientOrder("inverting a series with no known nonzero term");
    if (is_monomial()) return monomial(c_.front().inverse(), -*valuation());
    long n = std::max(1L, ceil_q(rel * ram_).get_num().get_si());
    if (!exact()) n = std::min(n, prec_ - vlo_);
    std::vector<AlgebraicNumber> w(static_cast<std::size_t>(n));
    const AlgebraicNumber w0 = c_.front().inverse();
    w[0] = w0;
    for (long m = 1; m < n; ++m) {
        AlgebraicNumber s;
        for (long i = 1; i <= m && i < static_cast<long>(c_.size()); ++i)
            if (!c_[static_cast<std::size_t>(i)].is_zero())
                s += c_[static_cast<std::size_t>(i)] * w[static_cast<std::size_t>(m - i)];
        w[static_cast<std::size_t>(m)] = -(w0 * s);
    }
    return from_coeffs(ram_, -vlo_, std::move(w), -vlo_ + n);
}

PuiseuxSeries PuiseuxSeries::truncate(const Rational& e) const {
    const long u = ceil_q(e * ram_).get_num().get_si();
    if (u >= prec_) return *this;
    if (exact() && (c_.empty() || vlo_ + static_cast<long>(c_.size()) <= u)) return *this;
    PuiseuxSeries r = *this;
    r.prec_ = u;
    if (!r.c_.empty()) {
        long keep = std::max(0L, u - r.vlo_);
        if (keep < static_cast<long>(r.c_.size())) r.c_.resize(static_cast<std::size_t>(keep));
    }
    r.trim();
    return r;
}

PuiseuxSeries PuiseuxSeries::normalized() const {
    long g = ram_;
    for (std::size_t i = 0; i < c_.size(); ++i)
        if (!c_[i].is_zero()) g = std::gcd(g, vlo_ + static_cast<long>(i));
    if (!exact()) g = std::gcd(g, prec_);
    if (g <= 1) return *this;
    PuiseuxSeries r;
    r.ram_ = static_cast<int>(ram_ / g);
    r.prec_ = exact() ? kInf : prec_ / g;
    if (!c_.empty()) {
        r.vlo_ = vlo_ / g;
        for (std::size_t i = 0; i < c_.size(); i += static_cast<std::size_t>(g)) r.c_.push_back(c_[i]);
    }
    r.trim();
    return r;
}

bool operator==(const PuiseuxSeries& a0, const PuiseuxSeries& b0) {
    PuiseuxSeries a = a0.normalized(), b = b0.normalized();
    return a.ram_ == b.ram_ && a.prec_ == b.prec_ && a.vlo_ == b.vlo_ && a.c_ == b.c_;
}

bool agree(const PuiseuxSeries& a0, const PuiseuxSeries& b0) {
    const int ram = static_cast<int>(lcm_l(a0.ram(), b0.ram()));
    PuiseuxSeries a = a0.lifted(ram), b = b0.lifted(ram);
    const long top = std::min(a.prec_units(), b.prec_units());
    PuiseuxSeries d = (a - b);
    if (d.known_zero()) return true;
    return d.vlo() >= top;
}

std::string PuiseuxSeries::to_string(const std::string& var) const {
    std::vector<std::string> terms;
    for (std::size_t i = 0; i < c_.size(); ++i) {
        if (c_[i].is_zero()) continue;
        Rational e(vlo_ + static_cast<long>(i), ram_);
        e.canonicalize();
        if (e == 0) {
            terms.push_back(c_[i].to_string());
            continue;
        }
        std::string cs = paren_coeff(c_[i]);
        std::string mono = power(var, e);
        if (cs == "1")
            terms.push_back(mono);
        else if (cs == "-1")
            terms.push_back("-" + mono);
        else
            terms.push_back(cs + "*" + mono);
    }
    if (!exact()) {
        Rational p(prec_, ram_);
        p.canonicalize();
        terms.push_back("O(" + (p == 0 ? std::string("1") : power(var, p)) + ")");
    }
    return join_terms(terms);
}

// ---------------------------------------------------------------- BiSeries

BiSeries::BiSeries(const PuiseuxSeries& c) {
    if (!c.exact_zero()) t_.emplace(0, c);
}

BiSeries BiSeries::term(const PuiseuxSeries& f, long k) {
    BiSeries r;
    if (!f.exact_zero()) r.t_.emplace(k, f);
    return r;
}

BiSeries BiSeries::monomial(const AlgebraicNumber& c, const Rational& xe, long k) {
    return term(PuiseuxSeries::monomial(c, xe), k);
}

BiSeries BiSeries::big_o(long k, const Rational& tail_slope) {
    BiSeries r;
    r.last_ = k - 1;
    r.slope_ = tail_slope;
    return r;
}

BiSeries BiSeries::from_terms(std::map<long, PuiseuxSeries> terms, std::optional<long> last_known,
                              const Rational& tail_slope) {
    BiSeries r;
    r.t_ = std::move(terms);
    r.last_ = last_known;
    r.slope_ = last_known ? tail_slope : Rational(0);
    r.clean();
    return r;
}

void BiSeries::clean() {
    for (auto it = t_.begin(); it != t_.end();) {
        if (it->second.exact_zero() || (last_ && it->first > *last_))
            it = t_.erase(it);
        else
            ++it;
    }
}

long BiSeries::last_known() const { return last_ ? *last_ : PuiseuxSeries::kInf; }

bool BiSeries::exact() const {
    if (last_) return false;
    for (const auto& [k, f] : t_)
        if (!f.exact()) return false;
    return true;
}

PuiseuxSeries BiSeries::coeff(long k) const {
    if (last_ && k > *last_) throw InsufficientOrder("eps-coefficient " + std::to_string(k) + " is beyond the order");
    auto it = t_.find(k);
    return it == t_.end() ? PuiseuxSeries() : it->second;
}

std::optional<long> BiSeries::first_index() const {
    std::optional<long> r;
    if (!t_.empty()) r = t_.begin()->first;
    if (last_ && (!r || *last_ + 1 < *r)) r = *last_ + 1;
    return r;
}

BiSeries BiSeries::operator-() const {
    BiSeries r = *this;
    for (auto& [k, f] : r.t_) f = -f;
    return r;
}

BiSeries operator+(const BiSeries& a, const BiSeries& b) {
    if (a.exact_zero()) return b;
    if (b.exact_zero()) return a;
    BiSeries r;
    if (a.last_ || b.last_) {
        r.last_ = std::min(a.last_known(), b.last_known());
        if (a.last_ && b.last_)
            r.slope_ = std::min(a.slope_, b.slope_);
        else
            r.slope_ = a.last_ ? a.slope_ : b.slope_;
    }
    for (const auto* s : {&a, &b})
        for (const auto& [k, f] : s->t_) {
            if (r.last_ && k > *r.last_) break;
            auto it = r.t_.find(k);
            if (it == r.t_.end())
                r.t_.emplace(k, f);
            else
                it->second += f;
        }
    r.clean();
    return r;
}

BiSeries operator-(const BiSeries& a, const BiSeries& b) { return a + (-b); }

BiSeries operator*(const BiSeries& a, const BiSeries& b) {
    if (a.exact_zero() || b.exact_zero()) return BiSeries();
    const long fa = *a.first_index(), fb = *b.first_index();
    long kout = PuiseuxSeries::kInf;
    if (a.last_) kout = std::min(kout, *a.last_ + fb);
    if (b.last_) kout = std::min(kout, *b.last_ + fa);
    BiSeries r;
    if (kout != PuiseuxSeries::kInf) {
        r.last_ = kout;
        if (a.last_ && b.last_)
            r.slope_ = std::min(a.slope_, b.slope_);
        else
            r.slope_ = a.last_ ? a.slope_ : b.slope_;
    }
    for (const auto& [i, f] : a.t_) {
        if (i + fb > kout) break;
        for (const auto& [j, g] : b.t_) {
            if (i + j > kout) break;
            auto it = r.t_.find(i + j);
            if (it == r.t_.end())
                r.t_.emplace(i + j, f * g);
            else
                it->second += f * g;
        }
    }
    r.clean();
    return r;
}

BiSeries BiSeries::scaled(const PuiseuxSeries& c) const {
    if (c.exact_zero()) return BiSeries();
    BiSeries r = *this;
    for (auto& [k, f] : r.t_) f = f * c;
    r.clean();
    return r;
}

BiSeries BiSeries::shift(const Rational& xe, long k) const {
    BiSeries r;
    for (const auto& [i, f] : t_) r.t_.emplace(i + k, f.shift(xe));
    if (last_) r.last_ = *last_ + k;
    r.slope_ = slope_;
    return r;
}

BiSeries BiSeries::derive() const {
    BiSeries r;
    r.last_ = last_;
    r.slope_ = slope_;
    for (const auto& [k, f] : t_) r.t_.emplace(k, f.derive());
    r.clean();
    return r;
}

BiSeries BiSeries::ramify_eps(long d) const {
    if (d < 1) throw PreconditionError("ramification index must be positive");
    BiSeries r;
    for (const auto& [k, f] : t_) r.t_.emplace(k * d, f);
    if (last_) r.last_ = (*last_ + 1) * d - 1;
    r.slope_ = slope_ / d;
    return r;
}

BiSeries BiSeries::ramify_x(int s) const {
    BiSeries r = *this;
    for (auto& [k, f] : r.t_) f = f.lifted(static_cast<int>(lcm_l(f.ram(), s)));
    return r;
}

BiSeries BiSeries::inverse(const Budget& budget) const {
    if (exact_zero()) throw DivisionByZero();
    NormalData nd = normalize(*this, budget.certainty);
    const long nu = nd.nu;
    const PuiseuxSeries lead = coeff(nu);
    if (!last_ && t_.size() == 1) {
        PuiseuxSeries inv = lead.inverse(budget.x_terms);
        return term(inv, -nu);
    }
    const PuiseuxSeries inv0 = lead.inverse(budget.x_terms);
    long m_max = budget.xi_terms;
    if (last_) m_max = std::min(m_max, *last_ - nu);
    std::map<long, PuiseuxSeries> g;
    g.emplace(-nu, inv0);
    for (long m = 1; m <= m_max; ++m) {
        PuiseuxSeries s;
        for (const auto& [k, f] : t_) {
            long i = k - nu;
            if (i < 1) continue;
            if (i > m) break;
            auto it = g.find(-nu + m - i);
            if (it != g.end()) s += f * it->second;
        }
        PuiseuxSeries gm = -(inv0 * s);
        const long j = -nu + m;
        gm = gm.truncate(nd.sigma * j - nd.p + budget.x_terms);
        if (!gm.exact_zero()) g.emplace(j, gm);
    }
    Rational slope = last_ ? std::min(nd.sigma, slope_) : nd.sigma;
    return from_terms(std::move(g), -nu + m_max, slope);
}

BiSeries BiSeries::truncate(const Rational& sigma, const Rational& p, long kmax, long n) const {
    BiSeries r;
    bool dropped = last_ && *last_ > kmax;
    for (const auto& [k, f] : t_) {
        if (k > kmax) {
            dropped = true;
            break;
        }
        r.t_.emplace(k, f.truncate(sigma * k + p + n));
    }
    if (dropped || last_) {
        r.last_ = std::min(last_known(), kmax);
        r.slope_ = last_ ? std::min(slope_, sigma) : sigma;
    }
    r.clean();
    return r;
}

bool operator==(const BiSeries& a, const BiSeries& b) {
    if (a.last_ != b.last_) return false;
    if (a.t_.size() != b.t_.size()) return false;
    for (auto ia = a.t_.begin(), ib = b.t_.begin(); ia != a.t_.end(); ++ia, ++ib)
        if (ia->first != ib->first || ia->second != ib->second) return false;
    return true;
}

bool agree(const BiSeries& a, const BiSeries& b) {
    const long top = std::min(a.last_known(), b.last_known());
    std::vector<long> keys;
    for (const auto& [k, f] : a.terms()) keys.push_back(k);
    for (const auto& [k, f] : b.terms()) keys.push_back(k);
    for (long k : keys) {
        if (k > top) continue;
        if (!agree(a.coeff(k), b.coeff(k))) return false;
    }
    return true;
}

std::string BiSeries::to_string(long d, const std::string& var) const {
    std::vector<std::string> out;
    for (const auto& [k, f] : t_) {
        Rational e(k, d);
        e.canonicalize();
        std::string eps = e == 0 ? "" : power("eps", e);
        if (f.is_monomial()) {
            const AlgebraicNumber& c = f.leading();
            Rational xe = *f.valuation();
            std::string mono;
            if (xe != 0) mono = power(var, xe);
            if (!eps.empty()) mono = mono.empty() ? eps : mono + "*" + eps;
            std::string cs = paren_coeff(c);
            if (mono.empty())
                out.push_back(c.to_string());
            else if (cs == "1")
                out.push_back(mono);
            else if (cs == "-1")
                out.push_back("-" + mono);
            else
                out.push_back(cs + "*" + mono);
        } else {
            std::string fs = f.to_string(var);
            out.push_back(eps.empty() ? fs : "(" + fs + ")*" + eps);
        }
    }
    if (last_) {
        Rational e(*last_ + 1, d);
        e.canonicalize();
        out.push_back("O(" + (e == 0 ? std::string("1") : power("eps", e)) + ")");
    }
    return join_terms(out);
}

// ---------------------------------------------------------------- geometry

NormalData normalize(const std::vector<const BiSeries*>& entries, long certainty) {
    std::map<long, Rational> vmin, zmin;
    std::optional<long> tail_start;
    std::optional<Rational> tail_slope;
    for (const BiSeries* e : entries) {
        for (const auto& [k, f] : e->terms()) {
            if (!f.known_zero()) {
                Rational v = *f.valuation();
                auto it = vmin.find(k);
                if (it == vmin.end() || v < it->second) vmin[k] = v;
            } else if (!f.exact()) {
                Rational z = *f.precision();
                auto it = zmin.find(k);
                if (it == zmin.end() || z < it->second) zmin[k] = z;
            }
        }
        if (e->has_tail()) {
            long ts = e->last_known() + 1;
            if (!tail_start || ts < *tail_start) tail_start = ts;
            if (!tail_slope || e->tail_slope() < *tail_slope) tail_slope = e->tail_slope();
        }
    }
    NormalData nd;
    if (vmin.empty()) {
        if (zmin.empty() && !tail_start) return nd;
        throw InsufficientOrder("cannot certify a truncated element as zero");
    }
    nd.zero = false;
    nd.nu = vmin.begin()->first;
    const Rational vnu = vmin.begin()->second;
    if (tail_start && *tail_start <= nd.nu) throw InsufficientOrder("eps tail starts at or before the leading index");
    for (const auto& [k, v] : vmin) {
        if (k == nd.nu) continue;
        Rational s = (v - vnu) / (k - nd.nu);
        if (s < nd.sigma) nd.sigma = s;
    }
    if (tail_slope && *tail_slope < nd.sigma) nd.sigma = *tail_slope;
    nd.p = vnu - nd.sigma * nd.nu;
    for (const auto& [k, z] : zmin) {
        Rational line = nd.sigma * k + nd.p;
        if (k >= nd.nu) {
            if (z < line) throw InsufficientOrder("truncated coefficient may cross the half-plane line");
        } else if (z - line < certainty) {
            throw InsufficientOrder("cannot certify a vanishing eps-coefficient below the leading index");
        }
    }
    return nd;
}

NormalData normalize(const BiSeries& f, long certainty) { return normalize(std::vector<const BiSeries*>{&f}, certainty); }

PuiseuxSeries xi_coeff(const BiSeries& f, long k, const Rational& sigma, const Rational& p) {
    return f.coeff(k).shift(-sigma * k - p);
}

NewtonPolygonK newton_polygon(const BiSeries& f, long certainty) {
    NewtonPolygonK np;
    NormalData nd = normalize(f, certainty);
    np.sigma = nd.sigma;
    np.p = nd.p;
    for (const auto& [k, g] : f.terms())
        if (!g.known_zero()) np.points.emplace_back(k, *g.valuation());
    return np;
}

RegularRescale rescale_to_regular(const BiSeries& f, long certainty) {
    NormalData nd = normalize(f, certainty);
    if (nd.zero) throw PreconditionError("rescale_to_regular needs a nonzero element");
    RegularRescale r;
    r.e = floor_q(nd.sigma).get_num().get_si();
    r.nu = nd.nu;
    r.mu = *f.coeff(nd.nu).valuation();
    long top = f.has_tail() ? f.last_known() : f.terms().rbegin()->first;
    for (long k = nd.nu; k <= top; ++k) r.g.push_back(f.coeff(k).shift(-Rational(r.e * (k - nd.nu)) - r.mu));
    return r;
}

}  // namespace formred
