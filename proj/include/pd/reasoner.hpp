#pragma once
// Deductions, arguments, attacks, probabilities, and AA labelling.

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "pd/builder.hpp"
#include "pd/parser.hpp"
#include "pd/solver.hpp"

namespace pd {

// A deduction, canonicalized per literal: each support literal is either a
// leaf or expanded by exactly one rule whose body joins the support. A
// recurring literal re-uses its expansion, so rule cycles stay finite.
struct Deduction {
    Literal claim;
    std::vector<Literal> support;   // sorted, includes the claim
    std::map<Literal, int> choice;  // rule index per literal, -1 for a leaf
};

struct Argument {
    Literal claim;
    std::vector<Literal> support;  // sorted
    double probability = -1.0;     // filled once a distribution is solved
};

std::vector<Deduction> enumerate_deductions(const Framework& fw,
                                            Literal claim);
std::vector<Deduction> maximal_deductions(const Framework& fw, Literal claim);

// Leaf conditions: every leaf literal has a rule for its negation in the
// framework, and a deduction with leaves needs more than its claim in the
// support. Deductions whose literals are all grounded by rules pass as-is.
bool is_argument(const Framework& fw, const Deduction& d);

// All arguments over every literal of the language, deduplicated by
// (claim, support) and sorted the same way.
std::vector<Argument> enumerate_arguments(const Framework& fw);

// Ordered pairs (attacker, attackee) where the attacker's claim negates a
// support literal of the attackee. Self-attacks included.
std::vector<std::pair<int, int>> compute_attacks(
    const std::vector<Argument>& args);

// Worlds that satisfy some rule head without satisfying any of its maximal
// deduction supports (the closed-world zero set, deduction view).
std::set<std::uint64_t> global_pcwa_zero_set(const Framework& fw);
// Same, but from the per-head local rows actually emitted by the builder.
std::set<std::uint64_t> local_pcwa_zero_set(const Framework& fw);

// One atom per AA argument; each argument gets the rule
// <arg <- ~attacker1, ..., ~attackerm> : 1, attackers in declaration order.
Framework aa_to_pd(const AaGraph& g);

enum class ArgLabel { In, Out, Undec };
const char* label_name(ArgLabel l);

// in when Pr >= 1-epsilon, out when Pr <= epsilon, undec otherwise.
std::vector<ArgLabel> probabilistic_labelling(const std::vector<double>& probs,
                                              double epsilon);

// Checks the usual legality conditions: in needs all attackers out, out
// needs an attacking in, undec needs no attacking in and not all attackers
// out (so unattacked arguments are never legally undec).
bool verify_complete_labelling(const AaGraph& g,
                               const std::vector<ArgLabel>& labels);

struct RuleCheck {
    int rule = 0;
    std::string status;  // pass | fail | vacuous-body
    double residual = 0.0;
};

struct ConsistencyReport {
    std::vector<RuleCheck> rules;
    double normalization_residual = 0.0;
    double box_violation = 0.0;
    bool verdict = false;
};

// Substitutes pi into every rule's conditional-probability reading. Rules
// whose body probability falls below tol are flagged vacuous instead of
// pass/fail.
ConsistencyReport check_consistency_by_substitution(const Framework& fw,
                                                    const Vector& pi,
                                                    double tol);

}  // namespace pd
