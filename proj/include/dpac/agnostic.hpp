#pragma once
#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "dpac/protocol.hpp"

namespace dpac::agnostic {

// All thresholds x >= i/(points-1) with both signs: 2*points hypotheses.
std::vector<Hypothesis> threshold_class(std::size_t points);

struct HalvingParams {
    double epsilon = 0.05;
    double delta = 0.05;
    double opt_guess = 0.0;
    double label_noise = 0.0;
    double c_s = 1.0;
    double c_N = 1.0;
    std::size_t n_min = 9;
    double c_L = 10.0;
    bool shared_randomness = false;
};

// s = ceil(c_s / (opt_guess + eps)), N = max(n_min, ceil(c_N log2 log2 |H|)).
std::size_t halving_set_size(double opt_guess, double epsilon, double c_s);
std::size_t halving_set_count(std::size_t class_size, double c_N, std::size_t n_min);

/**
 * Robust generalized halving, no center. Player 0 draws, for each of N sets,
 * how many of its s points come from each player and sends every other player
 * its column (Count messages, skipped with shared randomness). Players draw
 * their portions, and for each set holding a mistake of maj(H) the lowest
 * player id broadcasts its first one. At most N/3 bad sets halts with maj(H);
 * otherwise every h erring on more than N/9 broadcast examples is dropped.
 *
 * Throws HalvingCollapse when nothing survives and NonConvergence past
 * c_L log2|H| loops. stats: "loops", "survivors", "best_eliminated" (loops
 * in which an h of minimum cumulative empirical error was dropped), "N", "s",
 * and "survivors_after_<l>" for every eliminating loop l.
 */
ProtocolResult run_robust_halving(const std::vector<DistributionSpec>& players, const TargetFunction& f,
                                  const std::vector<Hypothesis>& H, const HalvingParams& params,
                                  const RunOptions& opts);

struct OptSearchParams {
    HalvingParams halving;  // opt_guess is overwritten
    double c_v = 1.0;       // validation sample ceil(c_v / eps^2)
    double C = 8.0;
};

/**
 * Tries opt_guess = eps * 2^j for j = 0, 1, ... while the guess is <= 1/2 and
 * accepts the first run that halts and whose validation error (players report
 * mistake counts on a fresh sample) is <= C (guess + eps). The ledger is the
 * sum over all guesses tried. stats add "guesses" and "accepted_j". Throws
 * SearchFailure when no guess is accepted.
 */
ProtocolResult opt_search(const std::vector<DistributionSpec>& players, const TargetFunction& f,
                          const std::vector<Hypothesis>& H, const OptSearchParams& params, const RunOptions& opts);

struct IntervalDpResult {
    double cost = 0.0;
    std::vector<std::pair<std::size_t, std::size_t>> runs;  // inclusive segment ranges labeled +1
};

// Labels segments so that at most d maximal runs are +1, minimizing
// sum(neg over + segments) + sum(pos over - segments).
IntervalDpResult interval_dp(const std::vector<double>& pos, const std::vector<double>& neg, std::size_t d);

// Rounded to the nearest of 2^bits levels on [0, 1], ties down.
std::uint64_t quantize_fraction(double f, unsigned bits);

// What one player sends: B border points (right ends of equal-mass segments,
// ascending) and each segment's quantized positive fraction.
struct PlayerSummary {
    std::vector<double> borders;
    std::vector<std::uint64_t> fractions;
};

PlayerSummary summarize(const Sample& sample, std::size_t B, unsigned bits);

// Merged segment g is (right[g-1], right[g]] with the first starting at the
// smallest left edge. Each player segment carries mass 1/(k B), spread
// uniformly over the merged pieces it covers; the first segment of a player
// starts at 0.
struct MergedSegments {
    std::vector<double> right;
    std::vector<double> pos;
    std::vector<double> neg;
};

MergedSegments merge_summaries(const std::vector<PlayerSummary>& summaries, unsigned bits);

struct IntervalParams {
    std::size_t d = 3;
    double epsilon = 0.05;
    double delta = 0.05;
    double label_noise = 0.0;
    std::size_t sample_size = 0;  // 0: ceil(B / eps)
};

/**
 * One round, no examples. Each player sends B = ceil(d/eps) equal-mass border
 * points and the quantized positive fraction of each segment; the center
 * merges borders, spreads each segment's mass uniformly over the merged
 * pieces it covers, and picks at most d intervals with interval_dp.
 * stats: "borders", "fractions", "merged_segments", "dp_cost".
 */
ProtocolResult run_interval_summary(const std::vector<DistributionSpec>& players, const TargetFunction& f,
                                    const IntervalParams& params, const RunOptions& opts);

} // namespace dpac::agnostic
