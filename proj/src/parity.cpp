#include "dpac/parity.hpp"

#include <cmath>
#include <memory>

#include "dpac/errors.hpp"

namespace dpac::parity {

GF2Basis gf2_reduce(const Sample& sample) {
    GF2Basis basis(sample.dim());
    for (std::size_t i = 0; i < sample.size(); ++i) {
        if (sample.weights()[i] <= 0.0) continue;
        basis.insert(BitVec::from_features(sample[i].x), to_bit(sample[i].label));
    }
    return basis;
}

Parity parity_proper_learn(const Sample& sample) { return Parity{gf2_reduce(sample).particular_solution()}; }

ProtocolResult run_parity_two_player(const std::vector<DistributionSpec>& players, const TargetFunction& f,
                                     const ParityParams& params, const RunOptions& opts) {
    if (players.size() != 2) throw ConfigurationError("the two-player parity protocol needs exactly k = 2");
    check_run(players, f, params.epsilon, params.delta);
    if (!std::holds_alternative<Parity>(f)) throw ConfigurationError("parity protocol needs a parity target");
    const std::size_t n = dimension(f);
    const std::size_t m = params.sample_size != 0
                              ? params.sample_size
                              : static_cast<std::size_t>(std::ceil(params.c * static_cast<double>(n) / params.epsilon));

    Channel ch(2, false, Encoding{true, opts.precision_bits}, SyncModel::Asynchronous, opts.record_trace);
    GF2Basis basis[2];
    Parity proper[2];
    for (std::size_t i = 0; i < 2; ++i) {
        Rng rng = Rng::stream(opts.seed, "sample", i);
        const Sample s = draw_sample(players[i], f, m, rng);
        basis[i] = gf2_reduce(s);
        proper[i] = Parity{basis[i].particular_solution()};
    }
    for (std::size_t i = 0; i < 2; ++i) {
        ch.send(PartyId::player(i), PartyId::player(1 - i), msg::HypothesisMsg{proper[i]});
    }
    ch.advance_round();

    ProtocolResult result;
    for (std::size_t i = 0; i < 2; ++i) {
        result.hypotheses.emplace(
            PartyId::player(i),
            ParityNonProper{basis[i], std::make_shared<const Hypothesis>(proper[1 - i])});
        result.stats["rank_" + std::to_string(i)] = static_cast<double>(basis[i].rank());
    }
    result.ledger = ch.ledger();
    result.trace = ch.trace();
    result.stats["per_player_sample"] = static_cast<double>(m);
    result.errors = measure_errors(result.hypotheses, f, players, opts.m_eval, opts.seed);
    return result;
}

} // namespace dpac::parity
