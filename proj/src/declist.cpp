#include "dpac/declist.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "dpac/errors.hpp"

namespace dpac::declist {

std::vector<Rule> all_triplets(std::size_t n) {
    std::vector<Rule> out;
    out.reserve(4 * n + 2);
    out.push_back({0, 0, 0});
    out.push_back({0, 0, 1});
    for (std::size_t j = 1; j <= n; ++j) {
        for (int b = 0; b < 2; ++b) {
            for (int c = 0; c < 2; ++c) out.push_back({j, b, c});
        }
    }
    return out;
}

std::set<Rule> consistent_triplets(const Sample& sample, const std::vector<bool>& alive) {
    const std::size_t n = sample.dim();
    // seen[j][b][c]: some alive example has x_j = b and label bit c.
    std::vector<std::array<std::array<bool, 2>, 2>> seen(n, {{{false, false}, {false, false}}});
    std::array<bool, 2> any_label{false, false};
    for (std::size_t i = 0; i < sample.size(); ++i) {
        if ((!alive.empty() && !alive[i]) || sample.weights()[i] <= 0.0) continue;
        const int c = to_bit(sample[i].label) ? 1 : 0;
        any_label[static_cast<std::size_t>(c)] = true;
        for (std::size_t j = 0; j < n; ++j) {
            const std::size_t b = sample[i].x[j] == 1.0 ? 1 : 0;
            seen[j][b][static_cast<std::size_t>(c)] = true;
        }
    }
    std::set<Rule> out;
    for (int c = 0; c < 2; ++c) {
        if (!any_label[static_cast<std::size_t>(1 - c)]) out.insert({0, 0, c});
    }
    for (std::size_t j = 0; j < n; ++j) {
        for (int b = 0; b < 2; ++b) {
            for (int c = 0; c < 2; ++c) {
                if (!seen[j][static_cast<std::size_t>(b)][static_cast<std::size_t>(1 - c)]) out.insert({j + 1, b, c});
            }
        }
    }
    return out;
}

DecisionList learn_consistent(const Sample& sample) {
    const std::size_t n = sample.dim();
    std::vector<bool> alive(sample.size());
    for (std::size_t i = 0; i < sample.size(); ++i) alive[i] = sample.weights()[i] > 0.0;
    DecisionList out{n, {}};
    for (;;) {
        const std::set<Rule> ok = consistent_triplets(sample, alive);
        if (ok.count(Rule{0, 0, 0}) != 0 || ok.count(Rule{0, 0, 1}) != 0) {
            out.rules.push_back(ok.count(Rule{0, 0, 0}) != 0 ? Rule{0, 0, 0} : Rule{0, 0, 1});
            return out;
        }
        bool progressed = false;
        for (const Rule& r : ok) {
            if (r.is_else()) continue;
            bool fires = false;
            for (std::size_t i = 0; i < sample.size(); ++i) {
                if (alive[i] && r.fires(sample[i].x)) {
                    alive[i] = false;
                    fires = true;
                }
            }
            if (fires) {
                out.rules.push_back(r);
                progressed = true;
                break;
            }
        }
        if (!progressed) throw RealizabilityViolation("no decision list is consistent with the sample");
    }
}

std::size_t declist_sample_size(std::size_t n, double epsilon, double delta, std::size_t k, double c) {
    const double m = c * (1.0 / epsilon) *
                     (static_cast<double>(n) * std::log(1.0 / epsilon) + std::log(static_cast<double>(k) / delta));
    return static_cast<std::size_t>(std::ceil(m));
}

ProtocolResult run_decision_list(const std::vector<DistributionSpec>& players, const TargetFunction& f,
                                 const DecisionListParams& params, const RunOptions& opts) {
    check_run(players, f, params.epsilon, params.delta);
    if (!std::holds_alternative<DecisionList>(f)) throw ConfigurationError("decision-list protocol needs a decision-list target");
    const std::size_t k = players.size();
    const std::size_t n = dimension(f);
    const std::size_t m =
        params.sample_size != 0 ? params.sample_size : declist_sample_size(n, params.epsilon, params.delta, k, params.c);

    std::vector<Sample> samples;
    std::vector<std::vector<bool>> alive;
    for (std::size_t i = 0; i < k; ++i) {
        Rng rng = Rng::stream(opts.seed, "sample", i);
        samples.push_back(draw_sample(players[i], f, m, rng));
        alive.emplace_back(m, true);
    }

    Channel ch(k, true, Encoding{true, opts.precision_bits}, SyncModel::Asynchronous, opts.record_trace);
    std::vector<std::set<Rule>> announced(k);
    std::set<Rule> broadcast;
    DecisionList output{n, {}};

    for (;;) {
        for (std::size_t i = 0; i < k; ++i) {
            for (const Rule& r : consistent_triplets(samples[i], alive[i])) {
                if (announced[i].insert(r).second) ch.send(PartyId::player(i), kCenter, msg::RuleMsg{r, n});
            }
        }
        std::vector<Rule> fresh;
        for (const Rule& r : announced[0]) {
            if (broadcast.count(r) != 0) continue;
            const bool everywhere = std::all_of(announced.begin() + 1, announced.end(),
                                                [&](const std::set<Rule>& t) { return t.count(r) != 0; });
            if (everywhere) fresh.push_back(r);
        }
        if (fresh.empty()) {
            throw RealizabilityViolation("decision-list round made no progress before an else-rule arrived");
        }
        // std::set order is (j, b, c) with else-rules (j = 0) first; move them last.
        std::stable_partition(fresh.begin(), fresh.end(), [](const Rule& r) { return !r.is_else(); });
        bool halted = false;
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
        if (halted) break;
    }

    ProtocolResult result;
    std::uint64_t upstream = 0;
    for (const auto& [party, bits] : ch.ledger().per_player) {
        if (party >= 0) upstream += bits;
    }
    bool consistent = true;
    for (const auto& s : samples) consistent = consistent && error_rate(output, s) == 0.0;
    result.stats["upstream_bits"] = static_cast<double>(upstream);
    result.stats["consistent"] = consistent ? 1.0 : 0.0;
    result.stats["rules"] = static_cast<double>(output.rules.size());
    result.stats["alternations"] = static_cast<double>(alternations(std::get<DecisionList>(f)));
    result.stats["per_player_sample"] = static_cast<double>(m);
    result.hypotheses.emplace(kCenter, std::move(output));
    result.ledger = ch.ledger();
    result.trace = ch.trace();
    result.errors = measure_errors(result.hypotheses, f, players, opts.m_eval, opts.seed);
    return result;
}

} // namespace dpac::declist
