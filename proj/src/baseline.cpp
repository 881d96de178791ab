#include "dpac/baseline.hpp"

#include <cmath>
#include <set>
#include <string>

#include "dpac/errors.hpp"

namespace dpac::baseline {

BatchLearner finite_class_erm(std::vector<Hypothesis> hypotheses) {
    if (hypotheses.empty()) throw ConfigurationError("ERM over an empty class");
    return [hs = std::move(hypotheses)](const Sample& s) {
        std::size_t best = 0;
        double best_err = 2.0;
        for (std::size_t i = 0; i < hs.size(); ++i) {
            const double e = error_rate(hs[i], s);
            if (e < best_err) {
                best_err = e;
                best = i;
            }
        }
        return hs[best];
    };
}

std::size_t shipping_sample_size(std::size_t k, std::size_t d, double epsilon, double c, bool agnostic) {
    const double scale = agnostic ? epsilon * epsilon : epsilon;
    const double m = (c / static_cast<double>(k)) * (static_cast<double>(d) / scale) * std::log(1.0 / epsilon);
    return static_cast<std::size_t>(std::ceil(m));
}

ProtocolResult sample_shipping(const std::vector<DistributionSpec>& players, const TargetFunction& f,
                               const ShippingParams& params, const RunOptions& opts) {
    check_run(players, f, params.epsilon, params.delta);
    if (!params.learner) throw ConfigurationError("sample shipping needs a center learner");
    const std::size_t k = players.size();
    const std::size_t d = params.vc_dimension != 0 ? params.vc_dimension : dimension(f);
    const std::size_t m = shipping_sample_size(k, d, params.epsilon, params.c, params.agnostic);

    Channel ch(k, true, Encoding{is_boolean(players[0]), opts.precision_bits}, SyncModel::Asynchronous,
               opts.record_trace);
    Sample pooled(dimension(f));
    for (std::size_t i = 0; i < k; ++i) {
        Rng rng = Rng::stream(opts.seed, "sample", i);
        Sample local = draw_sample(players[i], f, m, rng);
        if (params.agnostic) apply_label_noise(local, params.label_noise, rng);
        for (const auto& ex : local.examples()) {
            ch.send(PartyId::player(i), kCenter, msg::Example{ex});
            pooled.add(ex);
        }
    }
    ch.advance_round();

    Hypothesis h = params.learner(pooled);
    const double training_error = error_rate(h, pooled);
    if (!params.agnostic && training_error != 0.0) {
        throw ProtocolError("center learner returned a hypothesis inconsistent with the shipped sample");
    }
    ProtocolResult result;
    result.hypotheses.emplace(kCenter, std::move(h));
    result.ledger = ch.ledger();
    result.trace = ch.trace();
    result.stats["per_player_sample"] = static_cast<double>(m);
    result.stats["training_error"] = training_error;
    result.errors = measure_errors(result.hypotheses, f, players, opts.m_eval, opts.seed,
                                   params.agnostic ? params.label_noise : 0.0);
    return result;
}

HalvingLearner::HalvingLearner(std::vector<Hypothesis> hypotheses)
    : alive_(std::move(hypotheses)), initial_size_(alive_.size()) {
    if (alive_.empty()) throw ConfigurationError("halving over an empty class");
}

Hypothesis HalvingLearner::current() const { return MajorityOfSet{alive_}; }

int HalvingLearner::predict(std::span<const double> x) const {
    long votes = 0;
    for (const auto& h : alive_) votes += classify(h, x);
    return votes >= 0 ? 1 : -1;
}

void HalvingLearner::update(const LabeledExample& ex) {
    std::vector<Hypothesis> keep;
    for (auto& h : alive_) {
        if (classify(h, ex.x) == ex.label) keep.push_back(std::move(h));
    }
    if (keep.empty()) throw RealizabilityViolation("halving: no hypothesis in the class is consistent");
    alive_ = std::move(keep);
}

std::size_t HalvingLearner::mistake_bound() const {
    return static_cast<std::size_t>(std::floor(std::log2(static_cast<double>(initial_size_))));
}

std::unique_ptr<OnlineLearner> HalvingLearner::clone() const { return std::make_unique<HalvingLearner>(*this); }

ConjunctionEliminationLearner::ConjunctionEliminationLearner(std::size_t n) : mask_(n, true) {}

Hypothesis ConjunctionEliminationLearner::current() const { return Conjunction{mask_}; }

int ConjunctionEliminationLearner::predict(std::span<const double> x) const {
    for (std::size_t j = 0; j < mask_.size(); ++j) {
        if (mask_.get(j) && x[j] != 1.0) return -1;
    }
    return 1;
}

void ConjunctionEliminationLearner::update(const LabeledExample& ex) {
    if (ex.label != 1) {
        throw RealizabilityViolation("conjunction elimination: false positive means the target is no conjunction");
    }
    mask_ &= BitVec::from_features(ex.x);
}

std::unique_ptr<OnlineLearner> ConjunctionEliminationLearner::clone() const {
    return std::make_unique<ConjunctionEliminationLearner>(*this);
}

ProtocolResult eq_mistake_bound(const std::vector<DistributionSpec>& players, const TargetFunction& f,
                                const OnlineLearner& prototype, const MistakeBoundParams& params,
                                const RunOptions& opts) {
    check_players(players, f);
    const std::size_t k = players.size();
    const std::size_t cap = params.mistake_cap != 0 ? params.mistake_cap : prototype.mistake_bound();

    std::vector<Sample> samples;
    for (std::size_t i = 0; i < k; ++i) {
        Rng rng = Rng::stream(opts.seed, "sample", i);
        samples.push_back(draw_sample(players[i], f, params.sample_size, rng));
    }

    auto learner = prototype.clone();
    Channel ch(k, true, Encoding{is_boolean(players[0]), opts.precision_bits}, SyncModel::LockSynchronous,
               opts.record_trace);
    std::set<std::string> seen{describe(learner->current())};
    bool repeated = false;
    for (;;) {
        const LabeledExample* counterexample = nullptr;
        std::size_t sender = 0;
        for (std::size_t i = 0; i < k && counterexample == nullptr; ++i) {
            for (const auto& ex : samples[i].examples()) {
                if (learner->predict(ex.x) != ex.label) {
                    counterexample = &ex;
                    sender = i;
                    break;
                }
            }
        }
        if (counterexample == nullptr) {
            ch.advance_round();
            break;
        }
        ch.send(PartyId::player(sender), Broadcast{}, msg::Example{*counterexample});
        ch.advance_round();
        if (ch.ledger().examples > cap) {
            throw ProtocolError("mistake cap exceeded: online learner is not meeting its bound");
        }
        learner->update(*counterexample);
        repeated = repeated || !seen.insert(describe(learner->current())).second;
    }

    ProtocolResult result;
    const Hypothesis final_h = learner->current();
    result.hypotheses.emplace(kCenter, final_h);
    for (std::size_t i = 0; i < k; ++i) result.hypotheses.emplace(PartyId::player(i), final_h);
    result.ledger = ch.ledger();
    result.trace = ch.trace();
    result.stats["mistakes"] = static_cast<double>(ch.ledger().examples);
    result.stats["mistake_bound"] = static_cast<double>(prototype.mistake_bound());
    result.stats["hypothesis_repeated"] = repeated ? 1.0 : 0.0;
    // Shadow copies are identical, so evaluating one receiver is enough.
    result.errors = measure_errors({{kCenter, final_h}}, f, players, opts.m_eval, opts.seed);
    return result;
}

} // namespace dpac::baseline
