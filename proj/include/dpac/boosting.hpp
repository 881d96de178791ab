#pragma once
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "dpac/protocol.hpp"

namespace dpac::boosting {

// Multinomial draw of m_weak trials over cells weighted by w, via sequential
// binomials on stream "boost_counts". A single cell takes everything without
// drawing. All-zero weights throw DegenerateDistribution.
std::vector<std::uint64_t> presample_counts(const std::vector<double>& weights, std::uint64_t m_weak, Rng& rng);

// alpha = ln((1 - beta) / beta) / 2
double fixed_alpha(double beta);

// Multiplies weights[i] by exp(-alpha * label_i * h(x_i)) with the fixed
// alpha of beta; returns the new exact sum.
double adaboost_reweight(const Sample& sample, std::vector<double>& weights, const Hypothesis& h, double beta);

// Significand truncated to q fraction bits (implicit leading 1), exponent
// kept. nullopt means no quantization. Relative error < 2^-q.
double quantize(double w, std::optional<unsigned> q);

// Bits for one quantized sum: q + 11, or 64 unquantized.
std::size_t quantized_bits(std::optional<unsigned> q);

// Total-variation distance between the normalized exact and quantized sums.
double tv_distance(const std::vector<double>& exact, const std::vector<double>& quantized);

// Draws count indices with replacement in proportion to weights.
std::vector<std::size_t> draw_weighted_indices(const std::vector<double>& weights, std::uint64_t count, Rng& rng);

struct WeakLearner {
    std::string name;
    // Complexity d_class of the class the learner outputs.
    std::size_t complexity = 1;
    std::function<Hypothesis(const Sample&)> fit;
};

// Best decision stump (or constant) by weighted error over n boolean
// variables. Candidates in order: Constant -1, Constant +1, then for
// j = 0..n-1, b = 0, 1, label = +1, -1; the first strict minimum wins.
// complexity = ceil(log2(4n + 2)).
WeakLearner stump_learner(std::size_t n);

// ceil(c_w * (d_class / beta) * ln(1/beta))
std::uint64_t weak_sample_size(std::size_t d_class, double beta, double c_w);

// ceil(ln(1/eps) / (2 (1/2 - beta)^2))
std::size_t boosting_rounds(double epsilon, double beta);

struct BoostingParams {
    double epsilon = 0.05;
    double delta = 0.05;
    double beta = 0.25;
    std::optional<unsigned> q = 8;  // nullopt: exact sums
    double c_w = 4.0;
    double c_local = 1.0;
    std::size_t local_sample_size = 0;  // 0: ceil(c_local * (n / eps) * ln(1/eps))
    bool early_stop = true;
};

struct RoundTelemetry {
    std::size_t round = 0;
    double eps_t = 0.0;        // exact weighted error of h_t on the union
    double weight_total = 0.0; // quantized W_t the center used
    double tv = 0.0;
    double training_error = 0.0;  // weighted majority on the union of samples
    double bound = 1.0;           // prod_s 2 sqrt(eps_s (1 - eps_s))
    std::vector<std::uint64_t> counts;
    std::uint64_t examples = 0;   // shipped this round
    std::uint64_t bits = 0;       // ledger bits so far
};

struct BoostingRun {
    ProtocolResult result;
    std::vector<RoundTelemetry> rounds;
    std::vector<Hypothesis> weak_hypotheses;
};

/**
 * Distributed AdaBoost with a fixed vote weight.
 *
 * Each round: players send quantized weight sums (Count q + Count 11), the
 * center sends per-player counts (Count of width for m_weak), players ship
 * that many examples drawn from their local weights, the center broadcasts
 * h_t, and players reweight. With early_stop every player also reports its
 * local mistake count so the run can end once the union training error is
 * <= eps. stats: "training_error", "m_weak", "T", "rounds_run".
 */
BoostingRun run_distributed_boosting(const std::vector<DistributionSpec>& players, const TargetFunction& f,
                                     const WeakLearner& learner, const BoostingParams& params,
                                     const RunOptions& opts);

// CSV with one line per round: round,eps_t,W_t,tv,training_error,bound,examples,bits
void write_telemetry_csv(std::ostream& out, const std::vector<RoundTelemetry>& rounds);

} // namespace dpac::boosting
