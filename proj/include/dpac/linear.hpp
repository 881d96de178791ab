#pragma once
#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <vector>

#include "dpac/protocol.hpp"

namespace dpac::linear {

struct AveragingParams {
    double epsilon = 0.1;
    double c = 1.0;
    std::size_t sample_size = 0;  // 0: ceil(c * d / eps^2)
};

// Each player sends the mean of label * x / |x| over its sample; the center
// normalizes the sum of the k vectors. A zero resultant throws DegenerateEstimate.
ProtocolResult averaging_protocol(const std::vector<DistributionSpec>& players, const TargetFunction& f,
                                  const AveragingParams& params, const RunOptions& opts);

enum class PassMode { UntilConsistent, UntilEpsFraction };

struct PerceptronState {
    std::vector<double> w;
    std::uint64_t updates = 0;
    std::uint64_t update_cap = 0;  // 0: unlimited
    // Called after every update with the example index and the new w.
    std::function<void(std::size_t, const LabeledExample&, const std::vector<double>&)> on_update;
};

// label * (w . x) < 1, up to rounding.
bool violates(const std::vector<double>& w, const LabeledExample& ex);

// Fraction (by weight) of the sample violating margin 1.
double violating_fraction(const std::vector<double>& w, const Sample& s);

/**
 * One local margin-perceptron phase. Examples are scanned cyclically starting
 * at cursor, which is left where the phase stopped.
 *
 * UntilConsistent ends after a full sweep without updates. UntilEpsFraction
 * checks the violating fraction before each sweep and ends once it is below
 * epsilon. Returns the number of updates; exceeding update_cap throws
 * NonSeparableData.
 */
std::size_t margin_perceptron_pass(PerceptronState& state, const Sample& s, std::size_t& cursor, PassMode mode,
                                   double epsilon = 0.0);

enum class StopRule {
    WellSpread,       // player 0 stops once the previous meta-round made < 1/alpha updates
    NonConcentrated,  // stop after a meta-round with no updates and local error <= eps everywhere
    UntilConsistent,  // stop after k-1 quiet passes following any pass
};

struct RoundRobinParams {
    StopRule rule = StopRule::WellSpread;
    double epsilon = 0.1;
    double alpha = 0.05;
    // NonConcentrated: alpha = sqrt(c_prime * ln(2dk/eps) / d).
    double c_prime = 4.0;
    std::size_t sample_size = 1000;  // per player, spec-driven runs only
    std::uint64_t update_cap = 0;     // 0: 10 * 3 / gamma^2 with gamma measured on the data
    std::size_t max_meta_rounds = 100000;
};

struct UpdateRecord {
    std::uint64_t round = 0;  // pass index
    std::size_t player = 0;
    std::size_t example = 0;
    LabeledExample ex;
    std::vector<double> w;  // after the update
};

// Smallest label * (f . x) / (|f| |x|) over the data.
double measured_margin(const std::vector<Sample>& data, const Linear& f);

// Largest |cos(x, y)| over cross-player pairs; exhaustive up to max_pairs
// pairs, otherwise max_pairs random pairs.
double max_cross_cosine(const std::vector<Sample>& data, std::size_t max_pairs, Rng& rng);

/**
 * Hypothesis-passing perceptron around the ring 0 -> 1 -> ... -> k-1 -> 0.
 *
 * Every pass is one round and carries the hypothesis plus a 32-bit update
 * count to the next player. ledger.meta_rounds counts ring cycles started.
 * Exceeding max_meta_rounds throws NonConvergence. stats: "updates",
 * "passes", "gamma", "alpha", "last_meta_updates".
 */
ProtocolResult round_robin_perceptron(const std::vector<Sample>& data, const Linear& f,
                                      const RoundRobinParams& params, const RunOptions& opts,
                                      std::vector<UpdateRecord>* trace = nullptr);

// Draws params.sample_size points per player and runs the ring; errors are
// measured on the distributions.
ProtocolResult round_robin_perceptron(const std::vector<DistributionSpec>& players, const TargetFunction& f,
                                      const RoundRobinParams& params, const RunOptions& opts);

// k players, per_player unit vectors each, dimension k*per_player + 1:
// x = l*g*e0 + sqrt(1-g^2)*(+-e_i), a fresh axis e_i per point and g drawn in
// [gamma, min(1.1 gamma, 0.999 sqrt(alpha))]. Target is e0. Needs gamma^2 < alpha.
std::vector<Sample> well_spread_dataset(std::size_t k, std::size_t per_player, double alpha, double gamma,
                                        std::uint64_t seed);

// Player 0: 100 positives ordered C, (A, B) x 49, C with A = (1,g,3g),
// B = (1,g,-g), C = (1,g,g). Player 1: 100 negatives (P, Q) x 50 with
// P = (1,-g,-3g), Q = (1,-g,g). Target (0,1,0).
std::vector<DistributionSpec> appendix_c_players(double gamma);

struct AppendixCRun {
    std::uint64_t rounds = 0;
    std::vector<UpdateRecord> trace;
    ProtocolResult result;
};

// UntilConsistent ring on the two-player lower-bound data; NonConvergence past max_rounds passes.
AppendixCRun appendix_c_lower_bound(double gamma, std::uint64_t max_rounds);

// Header: round,player,example,label,x_0..,w_0..
void write_trace_csv(std::ostream& out, const std::vector<UpdateRecord>& trace);

} // namespace dpac::linear
