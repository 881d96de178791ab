#include "dpac/privacy.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "dpac/closed.hpp"
#include "dpac/declist.hpp"
#include "dpac/errors.hpp"

namespace dpac::privacy {

PrivacyBudget::PrivacyBudget(PrivacyMode mode, double alpha_total, double delta_total, std::size_t M)
    : mode_(mode), alpha_(alpha_total), delta_(delta_total), M_(M) {
    if (M == 0) throw ConfigurationError("privacy budget must declare at least one query");
    if (mode != PrivacyMode::None) {
        if (!(alpha_total > 0.0)) throw ConfigurationError("privacy alpha must be positive");
        if (!(delta_total > 0.0 && delta_total < 1.0)) throw ConfigurationError("privacy delta must be in (0,1)");
    }
}

double PrivacyBudget::alpha_prime() const noexcept {
    return static_cast<double>(static_cast<long double>(alpha_) / static_cast<long double>(M_));
}

double PrivacyBudget::delta_prime() const noexcept {
    const long double share = mode_ == PrivacyMode::Differential ? 2.0L * M_ : static_cast<long double>(M_);
    return static_cast<double>(static_cast<long double>(delta_) / share);
}

void PrivacyBudget::spend() {
    if (spent_ >= M_) throw BudgetExhausted("privacy budget exhausted after " + std::to_string(M_) + " queries");
    ++spent_;
}

double laplace_noise(double scale, Rng& rng) {
    // u in (0, 1), never 0, so the log stays finite.
    const double u = (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
    return u < 0.5 ? scale * std::log(2.0 * u) : -scale * std::log(2.0 * (1.0 - u));
}

double laplace_density(double x, double mu, double scale) {
    return std::exp(-std::abs(x - mu) / scale) / (2.0 * scale);
}

double distributional_sensitivity(double delta_prime, double size) {
    const long double b = std::sqrt(2.0L * std::log(4.0L / delta_prime) / static_cast<long double>(size));
    return static_cast<double>(b);
}

double noise_scale(const PrivacyBudget& budget, double size) {
    switch (budget.mode()) {
    case PrivacyMode::None:
        return 0.0;
    case PrivacyMode::Differential:
        return static_cast<double>(1.0L / (static_cast<long double>(budget.alpha_prime()) * size));
    case PrivacyMode::Distributional:
        return static_cast<double>(static_cast<long double>(distributional_sensitivity(budget.delta_prime(), size)) /
                                   budget.alpha_prime());
    }
    return 0.0;
}

double sq_answer(const Sample& sample, const SQQuery& q, PrivacyBudget& budget, Rng& rng,
                 const std::vector<bool>& alive) {
    if (!q.predicate) throw ConfigurationError("statistical query without a predicate");
    if (!(q.tau > 0.0 && q.tau < 1.0)) throw ConfigurationError("query tolerance must be in (0,1)");
    double total = 0.0;
    double hits = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        if (!alive.empty() && !alive[i]) continue;
        const double w = sample.weights()[i];
        if (w <= 0.0) continue;
        const LabeledExample& ex = sample[i];
        if (q.conditioning == Conditioning::PositivesOnly && ex.label != 1) continue;
        total += w;
        if (q.predicate(ex.x, ex.label)) hits += w;
    }
    if (total <= 0.0) throw DegenerateConditioning("query '" + q.descriptor + "' has an empty conditioned sample");
    budget.spend();
    const double mean = hits / total;
    if (budget.mode() == PrivacyMode::None) return mean;
    return mean + laplace_noise(noise_scale(budget, total), rng);
}

std::size_t private_sample_size(std::size_t M, double alpha, double tau, double delta, PrivacyMode mode,
                                double c_p) {
    if (M == 0 || !(alpha > 0.0) || !(tau > 0.0 && tau < 1.0) || !(delta > 0.0)) {
        throw ConfigurationError("private_sample_size needs positive parameters and tau < 1");
    }
    const long double m = M;
    const long double a = alpha;
    const long double t = tau;
    const long double lg = std::log(m / static_cast<long double>(delta));
    long double size = 0.0L;
    if (mode == PrivacyMode::Distributional) {
        const long double c = c_p > 0.0 ? c_p : 4.0L;
        size = c * m * m * lg * lg * lg / (a * a * t * t);
    } else {
        const long double c = c_p > 0.0 ? c_p : 1.0L;
        size = c * std::max(m / (a * t), m / (t * t)) * lg;
    }
    return static_cast<std::size_t>(std::ceil(size));
}

Conjunction sq_threshold_conjunction(const Sample& sample, double threshold) {
    const std::size_t n = sample.dim();
    std::vector<double> zeros(n, 0.0);
    double pos = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const double w = sample.weights()[i];
        if (w <= 0.0 || sample[i].label != 1) continue;
        pos += w;
        for (std::size_t j = 0; j < n; ++j) {
            if (sample[i].x[j] == 0.0) zeros[j] += w;
        }
    }
    BitVec mask(n, true);
    if (pos <= 0.0) return Conjunction{mask};
    for (std::size_t j = 0; j < n; ++j) mask.set(j, zeros[j] / pos <= threshold);
    return Conjunction{mask};
}

namespace {

bool is_product(const DistributionSpec& spec) {
    return std::holds_alternative<UniformBoolean>(spec) || std::holds_alternative<ProductBernoulli>(spec);
}

Sample draw_local(const DistributionSpec& spec, const TargetFunction& f, std::size_t m, std::uint64_t seed,
                  std::size_t i) {
    Rng rng = Rng::stream(seed, "sample", i);
    if (is_product(spec)) return draw_histogram_sample(spec, f, m, rng);
    return draw_sample(spec, f, m, rng);
}

SQQuery zero_query(std::size_t j, double tau) {
    return SQQuery{[j](const Features& x, int) { return x[j] == 0.0; }, "x" + std::to_string(j + 1) + "=0", tau,
                   Conditioning::PositivesOnly};
}

} // namespace

ProtocolResult private_conjunction_protocol(const std::vector<DistributionSpec>& players, const TargetFunction& f,
                                            const PrivateConjunctionParams& params, const RunOptions& opts) {
    check_run(players, f, params.epsilon, params.delta);
    if (!std::holds_alternative<Conjunction>(f)) throw ConfigurationError("private conjunction protocol needs a conjunction target");
    const std::size_t k = players.size();
    const std::size_t n = dimension(f);
    const double tau = params.epsilon / (2.0 * static_cast<double>(n));
    const double threshold = tau + tau;
    const std::size_t m = params.sample_size != 0
                              ? params.sample_size
                              : private_sample_size(n, params.alpha, tau, params.delta,
                                                    params.mode == PrivacyMode::None ? PrivacyMode::Differential
                                                                                     : params.mode,
                                                    params.c_p);

    Channel ch(k, true, Encoding{true, opts.precision_bits}, SyncModel::Asynchronous, opts.record_trace);
    std::vector<Hypothesis> parts;
    std::size_t degenerate = 0;
    for (std::size_t i = 0; i < k; ++i) {
        const Sample s = draw_local(players[i], f, m, opts.seed, i);
        PrivacyBudget budget(params.mode, params.alpha, params.delta, n);
        Rng noise = Rng::stream(opts.seed, "privacy_noise", i);
        BitVec mask(n, true);
        try {
            for (std::size_t j = 0; j < n; ++j) mask.set(j, sq_answer(s, zero_query(j, tau), budget, noise) <= threshold);
        } catch (const DegenerateConditioning&) {
            mask = BitVec(n, true);
            ++degenerate;
        }
        parts.push_back(Conjunction{std::move(mask)});
        ch.send(PartyId::player(i), kCenter, msg::HypothesisMsg{parts.back()});
    }
    ch.advance_round();

    ProtocolResult result;
    result.hypotheses.emplace(kCenter, closed::closure(parts, closed::ClassKind::Conjunction, n));
    result.ledger = ch.ledger();
    result.trace = ch.trace();
    result.stats["per_player_sample"] = static_cast<double>(m);
    result.stats["queries_per_player"] = static_cast<double>(n);
    result.stats["degenerate_players"] = static_cast<double>(degenerate);
    result.errors = measure_errors(result.hypotheses, f, players, opts.m_eval, opts.seed);
    return result;
}

bool sq_rule_consistency(const Sample& sample, const std::vector<bool>& alive, const Rule& rule, double theta,
                         PrivacyBudget& budget, Rng& rng) {
    if (!(theta > 0.0 && theta < 1.0)) throw ConfigurationError("rule threshold must be in (0,1)");
    const int c = rule.c == 1 ? 1 : -1;
    SQQuery q{[rule, c](const Features& x, int label) { return rule.fires(x) && label != c; },
              "rule(" + std::to_string(rule.j) + "," + std::to_string(rule.b) + "," + std::to_string(rule.c) + ")",
              theta / 2.0, Conditioning::All};
    try {
        return sq_answer(sample, q, budget, rng, alive) <= theta / 2.0;
    } catch (const DegenerateConditioning&) {
        return true;
    }
}

ProtocolResult run_private_decision_list(const std::vector<DistributionSpec>& players, const TargetFunction& f,
                                         const PrivateDecisionListParams& params, const RunOptions& opts) {
    check_run(players, f, params.epsilon, params.delta);
    if (!std::holds_alternative<DecisionList>(f)) throw ConfigurationError("decision-list protocol needs a decision-list target");
    const std::size_t k = players.size();
    const std::size_t n = dimension(f);
    const double theta = params.theta > 0.0 ? params.theta : params.epsilon / (8.0 * static_cast<double>(n));
    const std::size_t max_rounds = params.max_rounds != 0 ? params.max_rounds : 2 * n + 2;
    const std::size_t m = params.sample_size != 0
                              ? params.sample_size
                              : declist::declist_sample_size(n, params.epsilon, params.delta, k, 1.0);
    const std::vector<Rule> triplets = declist::all_triplets(n);

    std::vector<Sample> samples;
    std::vector<std::vector<bool>> alive;
    std::vector<PrivacyBudget> budgets;
    std::vector<Rng> noise;
    for (std::size_t i = 0; i < k; ++i) {
        samples.push_back(draw_local(players[i], f, m, opts.seed, i));
        alive.emplace_back(samples.back().size(), true);
        budgets.emplace_back(params.mode, params.alpha, params.delta, triplets.size() * max_rounds);
        noise.push_back(Rng::stream(opts.seed, "privacy_noise", i));
    }

    Channel ch(k, true, Encoding{true, opts.precision_bits}, SyncModel::Asynchronous, opts.record_trace);
    std::vector<std::set<Rule>> announced(k);
    std::set<Rule> broadcast;
    DecisionList output{n, {}};
    std::size_t round = 0;

    for (bool halted = false; !halted;) {
        if (++round > max_rounds) throw NonConvergence("private decision list did not reach an else-rule");
        for (std::size_t i = 0; i < k; ++i) {
            for (const Rule& r : triplets) {
                if (announced[i].count(r) != 0) continue;
                if (sq_rule_consistency(samples[i], alive[i], r, theta, budgets[i], noise[i])) {
                    announced[i].insert(r);
                    ch.send(PartyId::player(i), kCenter, msg::RuleMsg{r, n});
                }
            }
        }
        std::vector<Rule> fresh;
        for (const Rule& r : announced[0]) {
            if (broadcast.count(r) != 0) continue;
            const bool everywhere = std::all_of(announced.begin() + 1, announced.end(),
                                                [&](const std::set<Rule>& t) { return t.count(r) != 0; });
            if (everywhere) fresh.push_back(r);
        }
        std::stable_partition(fresh.begin(), fresh.end(), [](const Rule& r) { return !r.is_else(); });
        for (const Rule& r : fresh) {
            ch.send(kCenter, Broadcast{}, msg::RuleMsg{r, n});
            broadcast.insert(r);
            if (halted) continue;
            output.rules.push_back(r);
            halted = r.is_else();
        }
        for (std::size_t i = 0; i < k; ++i) {
            for (std::size_t e = 0; e < samples[i].size(); ++e) {
                if (!alive[i][e]) continue;
                for (const Rule& r : fresh) {
                    if (r.fires(samples[i][e].x)) {
                        alive[i][e] = false;
                        break;
                    }
                }
            }
        }
        ch.advance_round();
    }

    ProtocolResult result;
    std::size_t spent = 0;
    for (const auto& b : budgets) spent = std::max(spent, b.spent());
    result.stats["rules"] = static_cast<double>(output.rules.size());
    result.stats["theta"] = theta;
    result.stats["max_queries_spent"] = static_cast<double>(spent);
    result.stats["per_player_sample"] = static_cast<double>(m);
    result.hypotheses.emplace(kCenter, std::move(output));
    result.ledger = ch.ledger();
    result.trace = ch.trace();
    result.errors = measure_errors(result.hypotheses, f, players, opts.m_eval, opts.seed);
    return result;
}

} // namespace dpac::privacy
