#pragma once
#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "dpac/channel.hpp"
#include "dpac/hypothesis.hpp"
#include "dpac/sample.hpp"

namespace dpac {

// Knobs every protocol run shares.
struct RunOptions {
    std::uint64_t seed = 0;
    // Monte-Carlo evaluation budget, split evenly over the k players.
    std::size_t m_eval = 20000;
    unsigned precision_bits = 32;
    bool record_trace = false;
};

struct ErrorReport {
    // Error of the output on each D_i (worst receiver when several).
    std::vector<double> per_player;
    // Error on the uniform mixture D (worst receiver when several).
    double mixture = 0.0;
};

struct ProtocolResult {
    std::map<PartyId, Hypothesis> hypotheses;
    CostLedger ledger;
    ErrorReport errors;
    // Protocol-specific counters (updates, loops, guesses, ...).
    std::map<std::string, double> stats;
    std::vector<TraceEntry> trace;

    // The center's hypothesis when there is one, otherwise player 0's.
    const Hypothesis& output() const;
};

// Weighted fraction of sample points whose label h gets wrong.
double error_rate(const Hypothesis& h, const Sample& sample);

// Monte-Carlo disagreement with f under one distribution.
double error_rate(const Hypothesis& h, const TargetFunction& f, const DistributionSpec& spec,
                  std::size_t m_eval, std::uint64_t seed);

// Monte-Carlo disagreement with f under D = (1/k) sum D_i, m_eval/k draws per player.
double mixture_error(const Hypothesis& h, const TargetFunction& f,
                     const std::vector<DistributionSpec>& players, std::size_t m_eval, std::uint64_t seed);

// Fills per-player and mixture errors for every receiver. With label noise
// rate eta the reported error is against noisy labels: eta + (1 - 2 eta) * disagreement.
ErrorReport measure_errors(const std::map<PartyId, Hypothesis>& receivers, const TargetFunction& f,
                           const std::vector<DistributionSpec>& players, std::size_t m_eval,
                           std::uint64_t seed, double label_noise = 0.0);

// k >= 1, every spec valid and matching f's dimension.
void check_players(const std::vector<DistributionSpec>& players, const TargetFunction& f);

// Shared argument checks: k >= 1, eps in (0,1), delta in (0,1), dimensions match f.
void check_run(const std::vector<DistributionSpec>& players, const TargetFunction& f, double epsilon,
               double delta);

} // namespace dpac
