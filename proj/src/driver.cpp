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

#include "formred/driver.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <tuple>

namespace formred {

namespace {

long den_of(const Rational& q) { return q.get_den().get_si(); }

bool term_less(const ExpTerm& a, const ExpTerm& b) {
    if (a.eps_exp != b.eps_exp) return a.eps_exp < b.eps_exp;
    if (a.log != b.log) return !a.log;
    return a.x_exp < b.x_exp;
}

bool same_monomial(const ExpTerm& a, const ExpTerm& b) {
    return a.eps_exp == b.eps_exp && a.log == b.log && a.x_exp == b.x_exp;
}

std::string rank_note(std::size_t r) { return "rank A0 = " + std::to_string(r); }

class Driver {
  public:
    Driver(const ReduceConfig& cfg, const Budget& b, FactorHints& hints) : cfg_(cfg), b_(b), hints_(hints) {}

    void run(PerturbedSystem sys, std::vector<ExpTerm> q, TraceBranch& node, ExpPart& out) {
        const long c = b_.certainty;
        for (;;) {
            if (++steps_ > cfg_.max_steps) throw RecursionLimit("more than " + std::to_string(cfg_.max_steps) + " steps");
            if (sys.d() > cfg_.max_ramification)
                throw RecursionLimit("eps-ramification " + std::to_string(sys.d()) + " exceeds the bound");
            const SystemShape sh = sys.shape(c);
            const ShapeSummary before = summarize(sys, c);

            if (sh.zero || sh.h <= 0) {
                finish(node, LeafKind::Regular, sys, before);
                if (cfg_.keep_residuals) node.residual = sys;
                emit(out, static_cast<int>(sys.n()), std::move(q), {}, sys, false);
                return;
            }
            if (sys.n() == 1) {
                std::vector<OpenOrder> open;
                std::vector<ExpTerm> t = integrate_rank1(sys, b_, &open);
                q.insert(q.end(), t.begin(), t.end());
                finish(node, LeafKind::Integrated, sys, before);
                emit(out, 1, std::move(q), std::move(open), sys, false);
                return;
            }

            const QMatrix a00 = constant_term(sys.coefficient(0, sh));
            const auto roots = distinct_root_partition(char_poly(a00), &hints_);
            if (roots.size() >= 2) {
                SplitResult sr = split(sys, b_, &hints_);
                std::string detail = "eigenvalues";
                for (const auto& blk : sr.blocks) detail += " " + blk.eigenvalue.to_string();
                node.steps.push_back({StepKind::Split, before, before, detail});
                for (auto& blk : sr.blocks) {
                    node.children.emplace_back();
                    run(std::move(blk.sys), q, node.children.back(), out);
                }
                return;
            }
            if (!roots.front().first.is_zero()) {
                ShiftResult r = eigen_shift(sys, roots.front().first, b_);
                q.push_back(r.term);
                sys = std::move(r.sys);
                node.steps.push_back({StepKind::Shift, before, summarize(sys, c), "gamma = " + r.term.coeff.to_string()});
                continue;
            }

            std::optional<TurningPointResult> tp;
            try {
                tp = resolve_turning_point(sys, b_);
            } catch (const PreconditionError&) {
                tp.reset();
            }
            if (tp) {
                sys = std::move(tp->sys);
                node.steps.push_back({StepKind::Turning, before, summarize(sys, c),
                                      "s = " + std::to_string(tp->s) + ", exponent " + to_string(tp->exponent)});
                continue;
            }

            const std::size_t r0 = leading_rank(sys, b_);
            RankReductionResult rr;
            try {
                rr = eps_rank_reduce(sys, b_);
            } catch (const StalledH1& e) {
                finish(node, LeafKind::Stalled, sys, before);
                node.note = e.what();
                node.residual = sys;
                emit(out, static_cast<int>(sys.n()), std::move(q), {}, sys, true);
                return;
            }
            const SystemShape rs = rr.sys.shape(c);
            const std::size_t r1 = leading_rank(rr.sys, b_);
            const bool progress = rr.ramification > 1 || rs.zero || rs.h < sh.h || (rs.h == sh.h && r1 < r0);
            if (progress) {
                sys = std::move(rr.sys);
                std::string detail = rank_note(r0) + " -> " + std::to_string(r1);
                if (rr.ramification > 1) detail += ", eps = eps~^" + std::to_string(rr.ramification);
                node.steps.push_back({StepKind::RankReduce, before, summarize(sys, c), detail});
                continue;
            }

            const ExpOrderResult eo = exp_order_system(sys, b_);
            const long dd = den_of(eo.omega);
            if (dd == 1)
                throw Error("eps-irreducible system with nilpotent leading matrix has integral exponential order");
            sys = ramify_eps(sys, dd);
            node.steps.push_back({StepKind::Ramify, before, summarize(sys, c),
                                  "omega = " + to_string(eo.omega) + ", eps = eps~^" + std::to_string(dd)});
        }
    }

  private:
    void finish(TraceBranch& node, LeafKind kind, const PerturbedSystem& sys, const ShapeSummary& shape) {
        node.leaf = true;
        node.leaf_kind = kind;
        node.final_shape = shape;
        node.sigma_final = shape.zero ? Rational(0) : certified_sigma(sys, b_.certainty);
    }

    void emit(ExpPart& out, int mult, std::vector<ExpTerm> q, std::vector<OpenOrder> open, const PerturbedSystem& sys,
              bool stalled) {
        ExpBranch br;
        br.multiplicity = mult;
        br.terms = canonical_terms(std::move(q));
        std::sort(open.begin(), open.end(), [](const OpenOrder& a, const OpenOrder& b) { return a.eps_exp < b.eps_exp; });
        br.open = std::move(open);
        br.s = sys.s();
        br.d = sys.d();
        br.stalled = stalled;
        out.branches.push_back(std::move(br));
    }

    const ReduceConfig& cfg_;
    Budget b_;
    FactorHints& hints_;
    int steps_ = 0;
};

void assign_rho(TraceBranch& node, const Rational& stretch) {
    if (node.leaf) {
        const ShapeSummary& f = node.final_shape;
        if (node.leaf_kind != LeafKind::Integrated || f.zero || node.sigma_final == 0)
            node.rho.reset();
        else
            node.rho = stretch - 1 / (Rational(f.d) * node.sigma_final);
    }
    for (auto& ch : node.children) assign_rho(ch, stretch);
}

void collect_rho(const TraceBranch& node, std::vector<Rational>& out) {
    if (node.leaf && node.rho) out.push_back(*node.rho);
    for (const auto& ch : node.children) collect_rho(ch, out);
}

bool has_settled_leaf(const TraceBranch& node) {
    if (node.leaf && node.leaf_kind != LeafKind::Stalled && node.sigma_final == 0) return true;
    return std::any_of(node.children.begin(), node.children.end(), has_settled_leaf);
}

ReduceResult reduce_impl(const PerturbedSystem& sys, const ReduceConfig& cfg, const Rational& stretch_rho) {
    Budget b = cfg.budget ? *cfg.budget : initial_budget(sys);
    FactorHints hints;
    int restarts = 0;
    int hint_restarts = 0;
    for (;;) {
        try {
            ReduceResult res;
            Driver drv(cfg, b, hints);
            drv.run(sys, {}, res.trace.root, res.exp);
            res.trace.stretch = stretch_rho;
            res.trace.budget = b;
            res.trace.restarts = restarts + hint_restarts;
            res.trace.hints = hints;
            assign_rho(res.trace.root, stretch_rho);
            for (const auto& br : res.exp.branches) {
                res.exp.s = std::lcm(res.exp.s, br.s);
                res.exp.d = std::lcm(res.exp.d, br.d);
            }
            return res;
        } catch (const InsufficientOrder&) {
            if (restarts >= cfg.max_restarts) throw;
            ++restarts;
            b.xi_terms *= 2;
            b.x_terms *= 2;
        } catch (const ZeroDivisor& z) {
            const bool rational = std::all_of(z.factor.coeffs().begin(), z.factor.coeffs().end(),
                                              [](const AlgebraicNumber& a) { return a.is_rational(); });
            const APoly f = monic(z.factor);
            if (!rational || hint_restarts >= 16 || std::find(hints.begin(), hints.end(), f) != hints.end()) throw;
            hints.push_back(f);
            ++hint_restarts;
        }
    }
}

}  // namespace

std::string to_string(StepKind k) {
    switch (k) {
        case StepKind::Split: return "split";
        case StepKind::Shift: return "shift";
        case StepKind::Turning: return "turning";
        case StepKind::RankReduce: return "rank_reduce";
        case StepKind::Ramify: return "ramify";
        case StepKind::Stretch: return "stretch";
    }
    return "unknown";
}

std::string to_string(LeafKind k) {
    switch (k) {
        case LeafKind::Integrated: return "integrated";
        case LeafKind::Regular: return "regular";
        case LeafKind::Stalled: return "stalled";
    }
    return "unknown";
}

ShapeSummary summarize(const PerturbedSystem& sys, long certainty) {
    ShapeSummary out;
    const SystemShape sh = sys.shape(certainty);
    out.n = sys.n();
    out.h = sh.h;
    out.p = sh.p;
    out.sigma = sh.sigma;
    out.zero = sh.zero;
    out.s = sys.s();
    out.d = sys.d();
    return out;
}

Rational certified_sigma(const PerturbedSystem& sys, long certainty) {
    const std::size_t n = sys.n();
    BiMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            std::map<long, PuiseuxSeries> known;
            for (const auto& [k, f] : sys.M()(i, j).terms()) {
                PuiseuxSeries g = PuiseuxSeries::from_coeffs(f.ram(), f.vlo(), f.coeffs());
                if (!g.exact_zero()) known.emplace(k, std::move(g));
            }
            m(i, j) = BiSeries::from_terms(std::move(known), std::nullopt);
        }
    const SystemShape sh = PerturbedSystem(std::move(m), sys.s(), sys.d()).shape(certainty);
    return sh.zero ? Rational(0) : sh.sigma;
}

std::vector<ExpTerm> canonical_terms(std::vector<ExpTerm> terms) {
    std::stable_sort(terms.begin(), terms.end(), term_less);
    std::vector<ExpTerm> out;
    for (auto& t : terms) {
        if (!out.empty() && same_monomial(out.back(), t)) {
            out.back().coeff += t.coeff;
            if (out.back().coeff.is_zero()) out.pop_back();
            continue;
        }
        if (!t.coeff.is_zero()) out.push_back(std::move(t));
    }
    return out;
}

Budget initial_budget(const PerturbedSystem& sys, long certainty) {
    const SystemShape sh = sys.shape(certainty);
    const long n = static_cast<long>(sys.n());
    const long h = sh.zero ? 1 : std::max(sh.h, 1L);
    Budget b;
    b.certainty = certainty;
    b.xi_terms = 2 * n * (h + 1) * sys.d();
    b.x_terms = 4 * n * sys.s();
    return b;
}

ReduceResult formal_reduce(const PerturbedSystem& sys, const ReduceConfig& config) {
    return reduce_impl(sys, config, Rational(0));
}

std::vector<ExpTerm> integrate_rank1(const PerturbedSystem& sys, const Budget&, std::vector<OpenOrder>* open) {
    if (sys.n() != 1) throw PreconditionError("integration needs a scalar system");
    const BiSeries& m = sys.M()(0, 0);
    if (m.has_tail() && m.last_known() < -1) throw InsufficientOrder("pole part of the scalar entry is not known");
    std::vector<ExpTerm> out;
    for (const auto& [k, f] : m.terms()) {
        if (k >= 0) break;
        const Rational eps = ratio(k, sys.d());
        const auto& cs = f.coeffs();
        for (std::size_t i = 0; i < cs.size(); ++i) {
            if (cs[i].is_zero()) continue;
            const Rational qx = ratio(f.vlo() + static_cast<long>(i), f.ram());
            ExpTerm t;
            t.eps_exp = eps;
            if (qx == -1) {
                t.coeff = cs[i];
                t.log = true;
            } else {
                t.coeff = cs[i] / AlgebraicNumber(Rational(qx + 1));
                t.x_exp = qx + 1;
            }
            out.push_back(std::move(t));
        }
        if (!f.exact() && open) open->push_back({eps, *f.precision() + 1});
    }
    return canonical_terms(std::move(out));
}

PerturbedSystem stretch(const PerturbedSystem& sys, const Rational& rho) {
    if (rho == 0) return sys;
    if (rho < 0) throw PreconditionError("stretching needs rho > 0");
    const std::size_t n = sys.n();
    long ram = sys.s();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const BiSeries& e = sys.M()(i, j);
            if (e.has_tail()) throw PreconditionError("stretching needs entries without an eps-tail");
            for (const auto& [k, f] : e.terms()) {
                if (!f.exact()) throw PreconditionError("stretching needs exact entries");
                ram = std::lcm(ram, static_cast<long>(f.ram()));
            }
        }
    const long d = sys.d();
    Rational step = rho / Rational(ram);
    step.canonicalize();
    const long dn = std::lcm(d, den_of(step));
    BiMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            std::map<long, PuiseuxSeries> acc;
            for (const auto& [k, f] : sys.M()(i, j).terms()) {
                const auto& cs = f.coeffs();
                for (std::size_t t = 0; t < cs.size(); ++t) {
                    if (cs[t].is_zero()) continue;
                    const Rational qx = ratio(f.vlo() + static_cast<long>(t), f.ram());
                    const Rational idx = (qx + 1) * rho * dn + ratio(k * dn, d);
                    PuiseuxSeries& slot = acc[to_long(idx)];
                    slot += PuiseuxSeries::monomial(cs[t], qx);
                }
            }
            std::map<long, PuiseuxSeries> clean;
            for (auto& [k, f] : acc)
                if (!f.exact_zero()) clean.emplace(k, std::move(f));
            m(i, j) = BiSeries::from_terms(std::move(clean), std::nullopt);
        }
    return PerturbedSystem(std::move(m), sys.s(), dn);
}

std::vector<Rational> restraining_indices(const ReductionTrace& trace) {
    std::vector<Rational> out;
    collect_rho(trace.root, out);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

RhoExploration explore_restraining_indices(const PerturbedSystem& sys, const ReduceConfig& config, int max_rounds) {
    RhoExploration out;
    ReduceResult first = reduce_impl(sys, config, Rational(0));
    out.rhos = restraining_indices(first.trace);
    out.rounds.push_back(std::move(first.trace));
    Rational current = 0;
    for (int round = 0; round < max_rounds; ++round) {
        auto it = std::upper_bound(out.rhos.begin(), out.rhos.end(), current);
        if (it == out.rhos.end()) break;
        const Rational rho = *it;
        ReduceResult r = reduce_impl(stretch(sys, rho), config, rho);
        std::vector<Rational> found;
        for (const Rational& x : restraining_indices(r.trace))
            if (x > rho) found.push_back(x);
        const bool settled = found.empty() && has_settled_leaf(r.trace.root);
        out.rounds.push_back(std::move(r.trace));
        out.rhos.insert(out.rhos.end(), found.begin(), found.end());
        std::sort(out.rhos.begin(), out.rhos.end());
        out.rhos.erase(std::unique(out.rhos.begin(), out.rhos.end()), out.rhos.end());
        current = rho;
        if (settled) {
            out.settled = true;
            break;
        }
    }
    return out;
}

}  // namespace formred
