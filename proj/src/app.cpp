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

#include "formred/app.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "formred/driver.hpp"
#include "formred/errors.hpp"
#include "formred/io.hpp"
#include "formred/scalar.hpp"

namespace formred {

namespace {

using Json = nlohmann::ordered_json;

struct Options {
    std::string command;
    std::string file;
    std::string expr;
    std::optional<long> order;
    long max_ram = 64;
    int max_restarts = 4;
    std::string format = "json";
    bool trace = false;
    bool explore = false;
    std::string rho;
};

/* Input as read from the file, either a system or an equation. */
struct Input {
    std::optional<PerturbedSystem> sys;
    std::optional<ScalarEquation> eq;

    PerturbedSystem system() const { return sys ? *sys : companion_system(*eq); }
};

/* What a subcommand produced: JSON and its text rendering. */
struct Output {
    Json json;
    std::string text;
    int status = kExitOk;
};

std::string kind_of(const std::exception& e) {
    if (dynamic_cast<const ParseError*>(&e)) return "parse";
    if (dynamic_cast<const DimensionMismatch*>(&e)) return "dimension";
    if (dynamic_cast<const PreconditionError*>(&e)) return "precondition";
    if (dynamic_cast<const StalledH1*>(&e)) return "stalled";
    if (dynamic_cast<const InsufficientOrder*>(&e)) return "insufficient_order";
    if (dynamic_cast<const RecursionLimit*>(&e)) return "recursion_limit";
    if (dynamic_cast<const ZeroDivisor*>(&e)) return "zero_divisor";
    if (dynamic_cast<const Error*>(&e)) return "engine";
    return "internal";
}

int report(std::ostream& err, const std::string& kind, const std::string& message, int code,
           const ParseError* where = nullptr) {
    Json j;
    j["error"]["kind"] = kind;
    j["error"]["message"] = message;
    if (where) {
        j["error"]["line"] = where->line;
        j["error"]["column"] = where->column;
    }
    err << j.dump() << "\n";
    return code;
}

Json rational(const Rational& q) { return format_rational(q); }

Json shape_json(const ShapeSummary& s) {
    Json j;
    j["n"] = s.n;
    j["h"] = s.h;
    j["p"] = rational(s.p);
    j["sigma"] = rational(s.sigma);
    j["s"] = s.s;
    j["d"] = s.d;
    j["zero"] = s.zero;
    return j;
}

std::string shape_text(const ShapeSummary& s) {
    if (s.zero) return "[n=" + std::to_string(s.n) + " zero]";
    return "[n=" + std::to_string(s.n) + " h=" + std::to_string(s.h) + " p=" + format_rational(s.p) +
           " sigma=" + format_rational(s.sigma) + " s=" + std::to_string(s.s) + " d=" + std::to_string(s.d) + "]";
}

Json roots_json(const std::vector<AlgebraicNumber>& numbers) {
    Json j = Json::array();
    for (const auto& [name, def] : generators(numbers)) j.push_back({{"name", name}, {"definition", def}});
    return j;
}

std::string roots_text(const std::vector<AlgebraicNumber>& numbers, const std::string& indent) {
    std::string s;
    for (const auto& [name, def] : generators(numbers)) s += indent + name + " = " + def + "\n";
    return s;
}

Json system_json(const PerturbedSystem& sys, long certainty) {
    Json j;
    j["shape"] = shape_json(summarize(sys, certainty));
    j["M"] = format_system(sys);
    j["roots"] = roots_json(coefficients(sys.M()));
    return j;
}

std::string system_text(const PerturbedSystem& sys, long certainty, const std::string& indent) {
    return indent + shape_text(summarize(sys, certainty)) + "\n" + indent + format_system(sys) + "\n" +
           roots_text(coefficients(sys.M()), indent);
}

std::string px_text(const PxMatrix& m) {
    std::string s = "[";
    for (std::size_t i = 0; i < m.rows(); ++i) {
        s += i ? ", [" : "[";
        for (std::size_t j = 0; j < m.cols(); ++j) s += (j ? ", " : "") + m(i, j).to_string();
        s += "]";
    }
    return s + "]";
}

std::vector<AlgebraicNumber> px_coefficients(const PxMatrix& m) {
    std::vector<AlgebraicNumber> out;
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j)
            for (const auto& c : m(i, j).coeffs())
                if (!c.is_zero()) out.push_back(c);
    return out;
}

Json rho_json(const std::vector<Rational>& rhos) {
    Json j = Json::array();
    for (const auto& r : rhos) j.push_back(rational(r));
    return j;
}

std::string rho_text(const std::vector<Rational>& rhos) {
    if (rhos.empty()) return "none";
    std::string s;
    for (const auto& r : rhos) s += (s.empty() ? "" : ", ") + format_rational(r);
    return s;
}

Json trace_json(const TraceBranch& b, bool residuals) {
    Json j;
    j["steps"] = Json::array();
    for (const auto& st : b.steps)
        j["steps"].push_back({{"kind", to_string(st.kind)},
                              {"before", shape_json(st.before)},
                              {"after", shape_json(st.after)},
                              {"detail", st.detail}});
    if (b.leaf) {
        j["leaf"] = to_string(b.leaf_kind);
        j["final_shape"] = shape_json(b.final_shape);
        j["sigma_final"] = rational(b.sigma_final);
        if (b.leaf_kind == LeafKind::Integrated) j["rho"] = b.rho ? rational(*b.rho) : Json("infinity");
        if (!b.note.empty()) j["note"] = b.note;
        if (residuals && b.residual) j["residual"] = format_system(*b.residual);
    }
    if (!b.children.empty()) {
        j["children"] = Json::array();
        for (const auto& c : b.children) j["children"].push_back(trace_json(c, residuals));
    }
    return j;
}

void trace_text(const TraceBranch& b, const std::string& indent, std::string& out) {
    for (const auto& st : b.steps)
        out += indent + to_string(st.kind) + ": " + st.detail + "  " + shape_text(st.before) + " -> " +
               shape_text(st.after) + "\n";
    if (b.leaf) {
        out += indent + "leaf " + to_string(b.leaf_kind) + " " + shape_text(b.final_shape) +
               " sigma_final=" + format_rational(b.sigma_final);
        if (b.leaf_kind == LeafKind::Integrated) out += " rho=" + (b.rho ? format_rational(*b.rho) : "infinity");
        if (!b.note.empty()) out += " (" + b.note + ")";
        out += "\n";
    }
    for (std::size_t i = 0; i < b.children.size(); ++i) {
        out += indent + "block " + std::to_string(i + 1) + ":\n";
        trace_text(b.children[i], indent + "  ", out);
    }
}

Json branch_json(const ExpBranch& b) {
    Json j;
    j["multiplicity"] = b.multiplicity;
    j["s"] = b.s;
    j["d"] = b.d;
    j["stalled"] = b.stalled;
    j["text"] = format_terms(b.terms);
    j["terms"] = Json::array();
    for (const auto& t : b.terms)
        j["terms"].push_back({{"coeff", t.coeff.to_string()},
                              {"x_exp", rational(t.x_exp)},
                              {"eps_exp", rational(t.eps_exp)},
                              {"log", t.log},
                              {"text", format_term(t)}});
    j["open"] = Json::array();
    for (const auto& o : b.open) j["open"].push_back({{"eps_exp", rational(o.eps_exp)}, {"x_bound", rational(o.x_bound)}});
    j["roots"] = roots_json(coefficients(b.terms));
    return j;
}

std::string branch_text(const ExpBranch& b, std::size_t index) {
    std::string s = "branch " + std::to_string(index) + " (multiplicity " + std::to_string(b.multiplicity) +
                    ", s=" + std::to_string(b.s) + ", d=" + std::to_string(b.d) + (b.stalled ? ", stalled" : "") +
                    "): " + format_terms(b.terms) + "\n";
    for (const auto& o : b.open)
        s += "  eps^(" + format_rational(o.eps_exp) + ") term known only below x^(" + format_rational(o.x_bound) +
             ")\n";
    return s + roots_text(coefficients(b.terms), "  ");
}

/* Runs f with the budget, doubling it on InsufficientOrder like the driver does. */
template <class F>
auto with_restarts(Budget& budget, int max_restarts, F f) {
    for (int attempt = 0;; ++attempt) {
        try {
            return f(budget);
        } catch (const InsufficientOrder&) {
            if (attempt >= max_restarts) throw;
            budget.xi_terms *= 2;
            budget.x_terms *= 2;
        }
    }
}

Budget budget_for(const PerturbedSystem& sys, const Options& o) {
    Budget b = initial_budget(sys);
    if (o.order) b.xi_terms = b.x_terms = *o.order;
    return b;
}

Json budget_json(const Budget& b) { return {{"xi_terms", b.xi_terms}, {"x_terms", b.x_terms}}; }

/* ------------------------------------------------------------ commands */

Output cmd_reduce(const Input& in, const Options& o) {
    const PerturbedSystem sys = in.system();
    ReduceConfig cfg;
    if (o.order) cfg.budget = Budget{*o.order, *o.order, 3};
    cfg.max_ramification = o.max_ram;
    cfg.max_restarts = o.max_restarts;
    cfg.keep_residuals = o.trace;
    const ReduceResult r = formal_reduce(sys, cfg);
    const std::vector<Rational> rhos = restraining_indices(r.trace);

    Output out;
    Json& j = out.json;
    j["command"] = "reduce";
    j["input"] = system_json(sys, r.trace.budget.certainty);
    j["budget"] = budget_json(r.trace.budget);
    j["restarts"] = r.trace.restarts;
    j["s"] = r.exp.s;
    j["d"] = r.exp.d;
    j["branches"] = Json::array();
    std::string& t = out.text;
    t += "exponential part (s=" + std::to_string(r.exp.s) + ", d=" + std::to_string(r.exp.d) + ")\n";
    for (std::size_t i = 0; i < r.exp.branches.size(); ++i) {
        const ExpBranch& b = r.exp.branches[i];
        j["branches"].push_back(branch_json(b));
        t += branch_text(b, i + 1);
        if (b.stalled) out.status = kExitStalled;
    }
    j["rho"] = rho_json(rhos);
    t += "rho: " + rho_text(rhos) + "\n";
    if (o.explore) {
        const RhoExploration ex = explore_restraining_indices(sys, cfg);
        Json rounds = Json::array();
        std::string rt;
        for (const auto& tr : ex.rounds) {
            rounds.push_back(rational(tr.stretch));
            rt += (rt.empty() ? "" : ", ") + format_rational(tr.stretch);
        }
        j["exploration"] = {{"rho", rho_json(ex.rhos)}, {"settled", ex.settled}, {"stretches", rounds}};
        t += "explored rho: " + rho_text(ex.rhos) + (ex.settled ? " (settled)" : " (not settled)") +
             ", stretches " + rt + "\n";
    }
    if (o.trace) {
        j["trace"] = trace_json(r.trace.root, true);
        t += "trace:\n";
        trace_text(r.trace.root, "  ", t);
    }
    return out;
}

Output cmd_polygon(const Input& in, const Options&) {
    if (!in.eq) throw PreconditionError("polygon needs a scalar equation");
    const ScalarEquation& eq = *in.eq;
    const EpsPolygonScalar pg = eps_polygon(eq);
    const ScalarMoser sm = scalar_moser(eq);
    const Rational omega = exp_order_scalar(eq);

    Output out;
    Json& j = out.json;
    std::string& t = out.text;
    j["command"] = "polygon";
    j["n"] = eq.n();
    j["sigma"] = rational(eq.sigma);
    j["points"] = Json::array();
    t += "points:";
    for (const auto& [i, v] : pg.points) {
        j["points"].push_back({i, v});
        t += " (" + std::to_string(i) + ", " + std::to_string(v) + ")";
    }
    t += "\n";
    j["slopes"] = Json::array();
    j["edges"] = Json::array();
    for (const auto& e : pg.edges) {
        j["slopes"].push_back(rational(e.slope));
        std::vector<AlgebraicNumber> cs;
        for (const auto& c : e.E.coeffs()) cs.insert(cs.end(), c.coeffs().begin(), c.coeffs().end());
        j["edges"].push_back(
            {{"slope", rational(e.slope)}, {"support", e.support}, {"E", to_string(e.E)}, {"roots", roots_json(cs)}});
        t += "slope " + format_rational(e.slope) + ": E = " + to_string(e.E) + "\n";
    }
    j["omega"] = rational(omega);
    j["kappa"] = sm.kappa;
    j["nu"] = sm.nu;
    j["mu"] = rational(sm.mu);
    j["gamma"] = sm.gamma;
    t += "omega = " + format_rational(omega) + ", kappa = " + std::to_string(sm.kappa) +
         ", nu = " + std::to_string(sm.nu) + ", mu = " + format_rational(sm.mu) + "\n";
    return out;
}

Output cmd_moser(const Input& in, const Options& o) {
    Output out;
    Json& j = out.json;
    std::string& t = out.text;
    j["command"] = "moser";
    if (in.eq) {
        const ScalarMoser sm = scalar_moser(*in.eq);
        j["kappa"] = sm.kappa;
        j["nu"] = sm.nu;
        j["mu"] = rational(sm.mu);
        j["gamma"] = sm.gamma;
        t += "kappa = " + std::to_string(sm.kappa) + ", nu = " + std::to_string(sm.nu) +
             ", mu = " + format_rational(sm.mu) + "\ngamma =";
        for (long g : sm.gamma) t += " " + std::to_string(g);
        t += "\n";
        return out;
    }
    const PerturbedSystem& sys = *in.sys;
    Budget b = budget_for(sys, o);
    const RankReductionResult r = with_restarts(b, o.max_restarts, [&](const Budget& bb) { return eps_rank_reduce(sys, bb); });
    j["budget"] = budget_json(b);
    j["ramification"] = r.ramification;
    j["h_history"] = Json::array();
    t += "h, rank A0:";
    for (const auto& [h, rank] : r.h_history) {
        j["h_history"].push_back({h, rank});
        t += " (" + std::to_string(h) + ", " + std::to_string(rank) + ")";
    }
    t += "\nramification eps = eps~^" + std::to_string(r.ramification) + "\n";
    j["transformation"] = format_matrix(r.R, r.sys.d());
    j["transformation_roots"] = roots_json(coefficients(r.R));
    j["system"] = system_json(r.sys, b.certainty);
    t += "T = " + format_matrix(r.R, r.sys.d()) + "\n" + roots_text(coefficients(r.R), "") + "system:\n" +
         system_text(r.sys, b.certainty, "  ");
    return out;
}

Output cmd_split(const Input& in, const Options& o) {
    const PerturbedSystem sys = in.system();
    Budget b = budget_for(sys, o);
    const SplitResult r = with_restarts(b, o.max_restarts, [&](const Budget& bb) {
        try {
            return split(sys, bb);
        } catch (const SpectraOverlap&) {
            throw PreconditionError("split needs at least two distinct eigenvalues of A_{0,0}");
        }
    });
    Output out;
    Json& j = out.json;
    std::string& t = out.text;
    j["command"] = "split";
    j["budget"] = budget_json(b);
    j["transformation"] = format_matrix(r.T, sys.d());
    j["transformation_roots"] = roots_json(coefficients(r.T));
    t += "T = " + format_matrix(r.T, sys.d()) + "\n" + roots_text(coefficients(r.T), "");
    j["blocks"] = Json::array();
    for (std::size_t i = 0; i < r.blocks.size(); ++i) {
        const SplitBlock& blk = r.blocks[i];
        Json bj;
        bj["eigenvalue"] = blk.eigenvalue.to_string();
        bj["eigenvalue_roots"] = roots_json({blk.eigenvalue});
        bj["columns"] = blk.columns;
        bj["system"] = system_json(blk.sys, b.certainty);
        j["blocks"].push_back(bj);
        t += "block " + std::to_string(i + 1) + ", eigenvalue " + blk.eigenvalue.to_string() + ":\n" +
             roots_text({blk.eigenvalue}, "  ") + system_text(blk.sys, b.certainty, "  ");
    }
    return out;
}

Output cmd_turning(const Input& in, const Options& o) {
    const PerturbedSystem sys = in.system();
    Budget b = budget_for(sys, o);
    const TurningPointResult r = with_restarts(b, o.max_restarts, [&](const Budget& bb) { return resolve_turning_point(sys, bb); });
    Output out;
    Json& j = out.json;
    j["command"] = "turning";
    j["budget"] = budget_json(b);
    j["s"] = r.s;
    j["exponent"] = rational(r.exponent);
    j["transformation"] = px_text(r.T);
    j["transformation_roots"] = roots_json(px_coefficients(r.T));
    j["system"] = system_json(r.sys, b.certainty);
    out.text = "x = t^" + std::to_string(r.s) + ", exponent " + format_rational(r.exponent) + "\nT = " +
               px_text(r.T) + "\n" + roots_text(px_coefficients(r.T), "") + "system:\n" +
               system_text(r.sys, b.certainty, "  ");
    return out;
}

Output cmd_omega(const Input& in, const Options& o) {
    const PerturbedSystem sys = in.system();
    Budget b = budget_for(sys, o);
    const SystemShape sh = sys.shape(b.certainty);
    if (sh.zero || sh.h <= 0) throw PreconditionError("h > 0");
    const ExpOrderResult r = with_restarts(b, o.max_restarts, [&](const Budget& bb) { return exp_order_system(sys, bb); });
    Output out;
    Json& j = out.json;
    j["command"] = "omega";
    j["budget"] = budget_json(b);
    j["omega"] = rational(r.omega);
    j["E"] = to_string(r.E);
    j["support"] = r.support;
    Json vals = Json::array();
    for (const auto& v : r.vals) vals.push_back(v ? Json(*v) : Json(nullptr));
    j["valuations"] = vals;
    j["guard"] = r.guard;
    out.text = "omega = " + format_rational(r.omega) + "\nE = " + to_string(r.E) + "\n";
    return out;
}

Output cmd_stretch(const Input& in, const Options& o) {
    Rational rho;
    if (o.rho.empty() || rho.set_str(o.rho, 10) != 0 || rho.get_den() == 0)
        throw PreconditionError("--rho needs a rational number");
    rho.canonicalize();
    const PerturbedSystem sys = in.system();
    const PerturbedSystem st = stretch(sys, rho);
    const long certainty = budget_for(sys, o).certainty;
    Output out;
    out.json["command"] = "stretch";
    out.json["rho"] = rational(rho);
    out.json["system"] = system_json(st, certainty);
    out.text = "x = tau eps^(" + format_rational(rho) + "), tau written as x\n" + system_text(st, certainty, "");
    return out;
}

std::string read_all(std::istream& s) {
    std::ostringstream ss;
    ss << s.rdbuf();
    return ss.str();
}

void add_common(CLI::App* sc, Options& o) {
    sc->add_option("file", o.file, "input file, - for standard input");
    sc->add_option("-e,--expr", o.expr, "input given inline");
    sc->add_option("--order", o.order, "xi- and x-terms kept by truncations")->check(CLI::PositiveNumber);
    sc->add_option("--max-ram", o.max_ram, "largest eps-ramification the driver may introduce")
        ->check(CLI::PositiveNumber);
    sc->add_option("--max-restarts", o.max_restarts, "order doublings allowed after InsufficientOrder")
        ->check(CLI::NonNegativeNumber);
    sc->add_option("--format", o.format, "json or text")->check(CLI::IsMember({"json", "text"}));
    sc->add_flag("--trace", o.trace, "include the reduction trace");
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, std::istream& in) {
    Options o;
    CLI::App app{"Exponential parts and restraining indices of eps-perturbed linear ODE systems", "formred"};
    app.require_subcommand(1);
    const std::vector<std::pair<const char*, const char*>> commands = {
        {"reduce", "exponential parts and restraining indices"},
        {"polygon", "eps-polygon of a scalar equation"},
        {"moser", "eps-rank reduction (scalar Moser invariants for an equation)"},
        {"split", "block diagonalization along the eigenvalues of A_{0,0}"},
        {"turning", "resolution of a nilpotent leading constant term"},
        {"omega", "eps-exponential order"},
        {"stretch", "stretching x = tau eps^rho"},
    };
    for (const auto& [name, help] : commands) {
        CLI::App* sc = app.add_subcommand(name, help);
        add_common(sc, o);
        sc->callback([&o, n = std::string(name)] { o.command = n; });
        if (std::string(name) == "reduce")
            sc->add_flag("--explore", o.explore, "search further restraining indices by stretching");
        if (std::string(name) == "stretch") sc->add_option("--rho", o.rho, "stretching exponent")->required();
    }

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            app.exit(e, out, err);
            return kExitOk;
        }
        return report(err, "usage", e.what(), kExitParse);
    }

    std::string text;
    if (!o.expr.empty()) {
        if (!o.file.empty()) return report(err, "usage", "give either a file or -e, not both", kExitParse);
        text = o.expr;
    } else if (o.file.empty()) {
        return report(err, "usage", "no input: give a file, - or -e TEXT", kExitParse);
    } else if (o.file == "-") {
        text = read_all(in);
    } else {
        std::ifstream f(o.file);
        if (!f) return report(err, "io", "cannot read " + o.file, kExitParse);
        text = read_all(f);
    }

    Input input;
    try {
        const InputFile file = parse_input(text);
        if (is_equation(file))
            input.eq = to_equation(file);
        else
            input.sys = to_system(file);
    } catch (const ParseError& e) {
        return report(err, "parse", e.what(), kExitParse, &e);
    } catch (const std::exception& e) {
        return report(err, kind_of(e), e.what(), kExitParse);
    }

    Output result;
    try {
        if (o.command == "reduce") result = cmd_reduce(input, o);
        if (o.command == "polygon") result = cmd_polygon(input, o);
        if (o.command == "moser") result = cmd_moser(input, o);
        if (o.command == "split") result = cmd_split(input, o);
        if (o.command == "turning") result = cmd_turning(input, o);
        if (o.command == "omega") result = cmd_omega(input, o);
        if (o.command == "stretch") result = cmd_stretch(input, o);
    } catch (const StalledH1& e) {
        return report(err, kind_of(e), e.what(), kExitStalled);
    } catch (const InsufficientOrder& e) {
        return report(err, kind_of(e), e.what(), kExitInsufficientOrder);
    } catch (const std::exception& e) {
        return report(err, kind_of(e), e.what(), kExitEngine);
    }

    if (o.format == "text")
        out << result.text;
    else
        out << result.json.dump(2) << "\n";
    return result.status;
}

}  // namespace formred
