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

#ifndef FORMRED_DRIVER_HPP
#define FORMRED_DRIVER_HPP

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "formred/linalg.hpp"
#include "formred/reduce.hpp"

namespace formred {

/* ------------------------------------------------------ exponential part */

/* Pole order eps_exp whose x-expansion is only known below x_bound. */
struct OpenOrder {
    Rational eps_exp;
    Rational x_bound;
};

struct ExpBranch {
    int multiplicity = 1;
    /* Descending pole order, then ascending x exponent, logs last. */
    std::vector<ExpTerm> terms;
    std::vector<OpenOrder> open;
    int s = 1;
    long d = 1;
    bool stalled = false;
};

struct ExpPart {
    std::vector<ExpBranch> branches;
    /* lcm of the branch ramifications. */
    int s = 1;
    long d = 1;
};

/* Sorts and merges like terms, dropping those that cancel. */
std::vector<ExpTerm> canonical_terms(std::vector<ExpTerm> terms);

/* ---------------------------------------------------------------- trace */

enum class StepKind { Split, Shift, Turning, RankReduce, Ramify, Stretch };
enum class LeafKind { Integrated, Regular, Stalled };

std::string to_string(StepKind k);
std::string to_string(LeafKind k);

struct ShapeSummary {
    std::size_t n = 0;
    long h = 0;
    Rational p, sigma;
    int s = 1;
    long d = 1;
    bool zero = true;
};
ShapeSummary summarize(const PerturbedSystem& sys, long certainty);
/* sigma of the system with every truncated part and eps-tail dropped. */
Rational certified_sigma(const PerturbedSystem& sys, long certainty);

struct TraceStep {
    StepKind kind{};
    ShapeSummary before, after;
    std::string detail;
};

/* One branch: a chain of steps ending in a split or in a leaf. */
struct TraceBranch {
    std::vector<TraceStep> steps;
    std::vector<TraceBranch> children;

    bool leaf = false;
    LeafKind leaf_kind = LeafKind::Regular;
    ShapeSummary final_shape;
    /* sigma of the leaf read from its certified nonzero terms only. */
    Rational sigma_final;
    /* Restraining index of the leaf in the original variables, nullopt for infinity. */
    std::optional<Rational> rho;
    /* Residual system of a regular or stalled leaf. */
    std::optional<PerturbedSystem> residual;
    std::string note;
};

struct ReductionTrace {
    TraceBranch root;
    /* The input was stretched by tau = x eps^(-stretch) before reduction. */
    Rational stretch = 0;
    Budget budget;
    int restarts = 0;
    FactorHints hints;
};

/* --------------------------------------------------------------- driver */

struct ReduceConfig {
    /* Unset: derived from the input as xi_terms = 2n(h+1)d, x_terms = 4ns. */
    std::optional<Budget> budget;
    int max_restarts = 4;
    long max_ramification = 64;
    int max_steps = 256;
    /* Keep residual systems of regular leaves in the trace. */
    bool keep_residuals = true;
};

struct ReduceResult {
    ExpPart exp;
    ReductionTrace trace;
};

Budget initial_budget(const PerturbedSystem& sys, long certainty = 3);

/* Throws StalledH1 only through leaves; InsufficientOrder after the last restart. */
ReduceResult formal_reduce(const PerturbedSystem& sys, const ReduceConfig& config = {});

/* Pole part of the integral of the single entry; x^-1 integrands become logs. */
std::vector<ExpTerm> integrate_rank1(const PerturbedSystem& sys, const Budget& budget,
                                     std::vector<OpenOrder>* open = nullptr);

/* d/dtau with x = tau eps^rho; needs exact entries without an eps-tail. */
PerturbedSystem stretch(const PerturbedSystem& sys, const Rational& rho);

/* Indices -1/sigma_final of integrated leaves with sigma_final < 0, ascending and deduplicated. */
std::vector<Rational> restraining_indices(const ReductionTrace& trace);

/* Stretch-and-reduce rounds on the original system; heuristic. */
struct RhoExploration {
    std::vector<Rational> rhos;
    std::vector<ReductionTrace> rounds;
    /* A round ended with every leaf at sigma = 0. */
    bool settled = false;
};
RhoExploration explore_restraining_indices(const PerturbedSystem& sys, const ReduceConfig& config = {},
                                           int max_rounds = 8);

}  // namespace formred

#endif
