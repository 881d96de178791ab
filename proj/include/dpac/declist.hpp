#pragma once
#include <cstddef>
#include <set>
#include <vector>

#include "dpac/protocol.hpp"

namespace dpac::declist {

// Every (j, b, c): 4n variable rules plus the two else-rules, in (j, b, c)
// order. Else-rules carry b = 0.
std::vector<Rule> all_triplets(std::size_t n);

// (j, b, c) is kept iff every alive example with x_j = b has label c; the
// else-rule (0, ., c) iff every alive example has label c. Vacuous rules are
// kept. alive may be empty, meaning "all alive".
std::set<Rule> consistent_triplets(const Sample& sample, const std::vector<bool>& alive = {});

// Centralized greedy learner: repeatedly appends the first triplet (in
// all_triplets order, else-rules only once one label remains) that is
// consistent with the alive examples and fires on at least one of them.
// Throws RealizabilityViolation when no triplet makes progress.
DecisionList learn_consistent(const Sample& sample);

// ceil(c * (1/eps) * (n ln(1/eps) + ln(k/delta)))
std::size_t declist_sample_size(std::size_t n, double epsilon, double delta, std::size_t k, double c);

struct DecisionListParams {
    double epsilon = 0.1;
    double delta = 0.05;
    double c = 1.0;
    std::size_t sample_size = 0;  // 0: declist_sample_size(...)
};

/**
 * Triplet-broadcast protocol with a center.
 *
 * Each round every player announces the triplets that became consistent with
 * its still-alive examples since its last announcement, the center broadcasts
 * the triplets that entered the intersection (sorted by (j, b, c), else-rules
 * last), and players retire every example a broadcast rule fires on. The run
 * ends in the round an else-rule is broadcast; the output list is the
 * broadcast order. A round that broadcasts nothing before that point throws
 * RealizabilityViolation.
 *
 * stats: "upstream_bits" (players to center), "consistent" (1 when the output
 * labels every drawn example correctly).
 */
ProtocolResult run_decision_list(const std::vector<DistributionSpec>& players, const TargetFunction& f,
                                 const DecisionListParams& params, const RunOptions& opts);

} // namespace dpac::declist
