#include "dpac/closed.hpp"

#include <algorithm>
#include <cmath>

#include "dpac/errors.hpp"

namespace dpac::closed {

Hypothesis smallest_consistent(const Sample& sample, ClassKind kind) {
    const std::size_t dim = sample.dim();
    Hypothesis h;
    if (kind == ClassKind::Conjunction) {
        BitVec mask(dim, true);
        for (std::size_t i = 0; i < sample.size(); ++i) {
            if (sample.weights()[i] > 0.0 && sample[i].label == 1) mask &= BitVec::from_features(sample[i].x);
        }
        h = Conjunction{std::move(mask)};
    } else {
        Box box{Features(dim, 0.0), Features(dim, 0.0), true};
        for (std::size_t i = 0; i < sample.size(); ++i) {
            if (sample.weights()[i] <= 0.0 || sample[i].label != 1) continue;
            const auto& x = sample[i].x;
            if (box.empty) {
                box.lo = x;
                box.hi = x;
                box.empty = false;
            } else {
                for (std::size_t t = 0; t < dim; ++t) {
                    box.lo[t] = std::min(box.lo[t], x[t]);
                    box.hi[t] = std::max(box.hi[t], x[t]);
                }
            }
        }
        h = std::move(box);
    }
    for (std::size_t i = 0; i < sample.size(); ++i) {
        if (sample.weights()[i] > 0.0 && sample[i].label == -1 && classify(h, sample[i].x) == 1) {
            throw RealizabilityViolation("negative example inside the smallest consistent hypothesis");
        }
    }
    return h;
}

Hypothesis closure(const std::vector<Hypothesis>& parts, ClassKind kind, std::size_t dim) {
    if (kind == ClassKind::Conjunction) {
        BitVec mask(dim, true);
        for (const auto& p : parts) mask &= p.as<Conjunction>().mask;
        return Conjunction{std::move(mask)};
    }
    Box out{Features(dim, 0.0), Features(dim, 0.0), true};
    for (const auto& p : parts) {
        const Box& b = p.as<Box>();
        if (b.empty) continue;
        if (out.empty) {
            out = b;
            continue;
        }
        for (std::size_t t = 0; t < dim; ++t) {
            out.lo[t] = std::min(out.lo[t], b.lo[t]);
            out.hi[t] = std::max(out.hi[t], b.hi[t]);
        }
    }
    return out;
}

std::size_t closed_sample_size(std::size_t vc_dim, double epsilon, double delta, std::size_t k, double c) {
    const double m = c * (1.0 / epsilon) *
                     (static_cast<double>(vc_dim) * std::log(1.0 / epsilon) +
                      std::log(static_cast<double>(k) / delta));
    return static_cast<std::size_t>(std::ceil(m));
}

ProtocolResult run_intersection_closed(const std::vector<DistributionSpec>& players, const TargetFunction& f,
                                       const ClosedParams& params, const RunOptions& opts) {
    check_run(players, f, params.epsilon, params.delta);
    const bool conj = params.kind == ClassKind::Conjunction;
    if (conj != std::holds_alternative<Conjunction>(f) || conj == std::holds_alternative<Box>(f)) {
        throw ConfigurationError("target does not belong to the declared intersection-closed class");
    }
    const std::size_t k = players.size();
    const std::size_t dim = dimension(f);
    const std::size_t m = params.sample_size != 0
                              ? params.sample_size
                              : closed_sample_size(conj ? dim : 2 * dim, params.epsilon, params.delta, k, params.c);

    Channel ch(k, true, Encoding{conj, opts.precision_bits}, SyncModel::Asynchronous, opts.record_trace);
    std::vector<Hypothesis> parts;
    for (std::size_t i = 0; i < k; ++i) {
        Rng rng = Rng::stream(opts.seed, "sample", i);
        const Sample s = draw_sample(players[i], f, m, rng);
        parts.push_back(smallest_consistent(s, params.kind));
        ch.send(PartyId::player(i), kCenter, msg::HypothesisMsg{parts.back()});
    }
    ch.advance_round();

    ProtocolResult result;
    result.hypotheses.emplace(kCenter, closure(parts, params.kind, dim));
    result.ledger = ch.ledger();
    result.trace = ch.trace();
    result.stats["per_player_sample"] = static_cast<double>(m);
    result.errors = measure_errors(result.hypotheses, f, players, opts.m_eval, opts.seed);
    return result;
}

} // namespace dpac::closed
