#pragma once
#include <cstddef>
#include <vector>

#include "dpac/gf2.hpp"
#include "dpac/protocol.hpp"

namespace dpac::parity {

// Row-reduces the sample's feature vectors (label +1 <-> bit 1). The basis
// answers exactly the queries in the span of the sample and abstains
// elsewhere. Inconsistent samples throw RealizabilityViolation.
GF2Basis gf2_reduce(const Sample& sample);

// A parity consistent with the sample, free variables set to 0.
Parity parity_proper_learn(const Sample& sample);

struct ParityParams {
    double epsilon = 0.1;
    double delta = 0.05;
    double c = 8.0;
    std::size_t sample_size = 0;  // 0: ceil(c * n / eps)
};

// k = 2, no center. Each player sends its proper parity (n bits) to the other
// and keeps "my span answers, else your parity" as its final hypothesis.
ProtocolResult run_parity_two_player(const std::vector<DistributionSpec>& players, const TargetFunction& f,
                                     const ParityParams& params, const RunOptions& opts);

} // namespace dpac::parity
