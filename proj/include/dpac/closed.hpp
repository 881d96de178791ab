#pragma once
#include <cstddef>
#include <vector>

#include "dpac/protocol.hpp"

namespace dpac::closed {

enum class ClassKind { Conjunction, Box };

// Smallest hypothesis of the class containing every positive-weight positive
// example: the bitwise-and of positives (all-variables conjunction when there
// are none) or the coordinate-wise [min, max] of positives (empty box when
// none). Throws RealizabilityViolation if a negative falls inside it.
Hypothesis smallest_consistent(const Sample& sample, ClassKind kind);

// Minimal h with h ⊇ parts[i] for all i. dim is n (conjunction) or d (box).
Hypothesis closure(const std::vector<Hypothesis>& parts, ClassKind kind, std::size_t dim);

// ceil(c * (1/eps) * (d ln(1/eps) + ln(k/delta))) with d = n for conjunctions
// and 2d for boxes.
std::size_t closed_sample_size(std::size_t vc_dim, double epsilon, double delta, std::size_t k, double c);

struct ClosedParams {
    double epsilon = 0.1;
    double delta = 0.05;
    ClassKind kind = ClassKind::Conjunction;
    double c = 1.0;
    std::size_t sample_size = 0;  // 0: closed_sample_size(...)
};

// One round, k hypotheses: each player sends its smallest consistent
// hypothesis; the center outputs their closure.
ProtocolResult run_intersection_closed(const std::vector<DistributionSpec>& players, const TargetFunction& f,
                                       const ClosedParams& params, const RunOptions& opts);

} // namespace dpac::closed
