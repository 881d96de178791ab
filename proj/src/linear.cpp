#include "dpac/linear.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "dpac/errors.hpp"

namespace dpac::linear {

namespace {

constexpr double kMarginSlack = 1e-9;

double dot(const std::vector<double>& a, const Features& b) {
    double s = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) s += a[j] * b[j];
    return s;
}

double norm(const Features& x) { return std::sqrt(dot(x, x)); }

const Linear& linear_target(const TargetFunction& f) {
    if (!std::holds_alternative<Linear>(f)) throw ConfigurationError("linear protocols need a linear target");
    return std::get<Linear>(f);
}

} // namespace

ProtocolResult averaging_protocol(const std::vector<DistributionSpec>& players, const TargetFunction& f,
                                  const AveragingParams& params, const RunOptions& opts) {
    check_run(players, f, params.epsilon, 0.5);
    linear_target(f);
    const std::size_t k = players.size();
    const std::size_t d = dimension(f);
    const std::size_t m = params.sample_size != 0
                              ? params.sample_size
                              : static_cast<std::size_t>(
                                    std::ceil(params.c * static_cast<double>(d) / (params.epsilon * params.epsilon)));

    Channel ch(k, true, Encoding{false, opts.precision_bits}, SyncModel::Asynchronous, opts.record_trace);
    std::vector<double> sum(d, 0.0);
    for (std::size_t i = 0; i < k; ++i) {
        Rng rng = Rng::stream(opts.seed, "sample", i);
        const Sample s = draw_sample(players[i], f, m, rng);
        std::vector<double> mean(d, 0.0);
        for (const auto& ex : s.examples()) {
            const double r = norm(ex.x);
            if (r == 0.0) continue;
            for (std::size_t j = 0; j < d; ++j) mean[j] += ex.label * ex.x[j] / r;
        }
        for (auto& v : mean) v /= static_cast<double>(m);
        ch.send(PartyId::player(i), kCenter, msg::HypothesisMsg{Linear{mean}});
        for (std::size_t j = 0; j < d; ++j) sum[j] += mean[j];
    }
    ch.advance_round();
    const double r = std::sqrt(dot(sum, sum));
    if (r == 0.0 || !std::isfinite(r)) throw DegenerateEstimate("averaged direction is zero; retry with another seed");
    for (auto& v : sum) v /= r;

    ProtocolResult result;
    result.hypotheses.emplace(kCenter, Linear{sum});
    result.ledger = ch.ledger();
    result.trace = ch.trace();
    result.stats["per_player_sample"] = static_cast<double>(m);
    result.errors = measure_errors(result.hypotheses, f, players, opts.m_eval, opts.seed);
    return result;
}

bool violates(const std::vector<double>& w, const LabeledExample& ex) {
    return ex.label * dot(w, ex.x) < 1.0 - kMarginSlack;
}

double violating_fraction(const std::vector<double>& w, const Sample& s) {
    double bad = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (violates(w, s[i])) bad += s.weights()[i];
    }
    return s.total_weight() > 0.0 ? bad / s.total_weight() : 0.0;
}

std::size_t margin_perceptron_pass(PerceptronState& state, const Sample& s, std::size_t& cursor, PassMode mode,
                                   double epsilon) {
    const std::size_t n = s.size();
    if (n == 0) throw ConfigurationError("perceptron pass on an empty sample");
    if (state.w.size() != s.dim()) throw ConfigurationError("perceptron state and sample dimensions differ");
    std::size_t made = 0;
    auto visit = [&]() {
        const auto& ex = s[cursor];
        bool updated = false;
        if (s.weights()[cursor] > 0.0 && violates(state.w, ex)) {
            for (std::size_t j = 0; j < state.w.size(); ++j) state.w[j] += ex.label * ex.x[j];
            ++state.updates;
            ++made;
            if (state.update_cap != 0 && state.updates > state.update_cap) {
                throw NonSeparableData("perceptron update cap exceeded");
            }
            if (state.on_update) state.on_update(cursor, ex, state.w);
            updated = true;
        }
        cursor = (cursor + 1) % n;
        return updated;
    };
    if (mode == PassMode::UntilConsistent) {
        std::size_t clean = 0;
        while (clean < n) clean = visit() ? 0 : clean + 1;
    } else {
        while (violating_fraction(state.w, s) >= epsilon) {
            for (std::size_t t = 0; t < n; ++t) visit();
        }
    }
    return made;
}

double measured_margin(const std::vector<Sample>& data, const Linear& f) {
    const double fn = std::sqrt(dot(f.w, f.w));
    double g = std::numeric_limits<double>::infinity();
    for (const auto& s : data) {
        for (const auto& ex : s.examples()) {
            const double r = norm(ex.x);
            if (r == 0.0) continue;
            g = std::min(g, ex.label * dot(f.w, ex.x) / (fn * r));
        }
    }
    return g;
}

double max_cross_cosine(const std::vector<Sample>& data, std::size_t max_pairs, Rng& rng) {
    double pairs = 0.0;
    for (std::size_t a = 0; a < data.size(); ++a) {
        for (std::size_t b = a + 1; b < data.size(); ++b) {
            pairs += static_cast<double>(data[a].size()) * static_cast<double>(data[b].size());
        }
    }
    auto cosine = [](const Features& x, const Features& y) {
        const double r = norm(x) * norm(y);
        return r == 0.0 ? 0.0 : std::abs(dot(x, y)) / r;
    };
    double worst = 0.0;
    if (pairs <= static_cast<double>(max_pairs)) {
        for (std::size_t a = 0; a < data.size(); ++a) {
            for (std::size_t b = a + 1; b < data.size(); ++b) {
                for (const auto& x : data[a].examples()) {
                    for (const auto& y : data[b].examples()) worst = std::max(worst, cosine(x.x, y.x));
                }
            }
        }
        return worst;
    }
    const std::size_t k = data.size();
    for (std::size_t t = 0; t < max_pairs; ++t) {
        const std::size_t a = rng.below(k);
        std::size_t b = rng.below(k - 1);
        if (b >= a) ++b;
        if (data[a].empty() || data[b].empty()) continue;
        worst = std::max(worst, cosine(data[a][rng.below(data[a].size())].x, data[b][rng.below(data[b].size())].x));
    }
    return worst;
}

ProtocolResult round_robin_perceptron(const std::vector<Sample>& data, const Linear& f,
                                      const RoundRobinParams& params, const RunOptions& opts,
                                      std::vector<UpdateRecord>* trace) {
    const std::size_t k = data.size();
    if (k == 0) throw ConfigurationError("need at least one player");
    const std::size_t d = f.w.size();
    for (const auto& s : data) {
        if (s.dim() != d) throw ConfigurationError("player data dimension differs from the target");
        if (s.empty()) throw ConfigurationError("every player needs at least one example");
    }
    if (params.rule == StopRule::NonConcentrated && !(params.epsilon > 0.0 && params.epsilon < 1.0)) {
        throw ConfigurationError("epsilon must be in (0,1)");
    }
    const double gamma = measured_margin(data, f);
    if (!(gamma > 0.0)) throw NonSeparableData("target does not separate the data with positive margin");
    double alpha = params.alpha;
    if (params.rule == StopRule::NonConcentrated) {
        alpha = std::sqrt(params.c_prime * std::log(2.0 * static_cast<double>(d * k) / params.epsilon) /
                          static_cast<double>(d));
    }
    if (params.rule == StopRule::WellSpread && !(alpha > 0.0)) throw ConfigurationError("alpha must be positive");

    PerceptronState state;
    state.w.assign(d, 0.0);
    state.update_cap = params.update_cap != 0
                           ? params.update_cap
                           : static_cast<std::uint64_t>(std::min(1e15, std::ceil(30.0 / (gamma * gamma))));
    std::uint64_t passes = 0;
    std::size_t current = 0;
    if (trace != nullptr) {
        state.on_update = [&](std::size_t idx, const LabeledExample& ex, const std::vector<double>& w) {
            trace->push_back({passes, current, idx, ex, w});
        };
    }
    const PassMode mode = params.rule == StopRule::NonConcentrated ? PassMode::UntilEpsFraction : PassMode::UntilConsistent;

    Channel ch(k, false, Encoding{false, opts.precision_bits}, SyncModel::Asynchronous, opts.record_trace);
    std::vector<std::size_t> cursor(k, 0);
    std::size_t quiet_run = 0;
    std::uint64_t prev_meta = std::numeric_limits<std::uint64_t>::max();
    std::size_t holder = 0;
    for (std::size_t meta = 0;; ++meta) {
        if (params.rule == StopRule::WellSpread && meta > 0 && static_cast<double>(prev_meta) < 1.0 / alpha) break;
        if (meta >= params.max_meta_rounds) throw NonConvergence("round-robin perceptron hit the meta-round cap");
        ch.advance_meta_round();
        std::uint64_t meta_updates = 0;
        bool halted = false;
        for (current = 0; current < k; ++current) {
            const std::size_t u = margin_perceptron_pass(state, data[current], cursor[current], mode, params.epsilon);
            const PartyId next = PartyId::player((current + 1) % k);
            ch.send(PartyId::player(current), next, msg::HypothesisMsg{Linear{state.w}});
            ch.send(PartyId::player(current), next, msg::Count{u, 32});
            ch.advance_round();
            ++passes;
            meta_updates += u;
            if (params.rule == StopRule::UntilConsistent) {
                quiet_run = u == 0 ? quiet_run + 1 : 0;
                if (passes >= k && quiet_run + 1 >= k) {
                    holder = (current + 1) % k;
                    halted = true;
                    break;
                }
            }
        }
        prev_meta = meta_updates;
        if (params.rule == StopRule::NonConcentrated && meta_updates == 0) {
            bool all_ok = true;
            for (const auto& s : data) all_ok = all_ok && error_rate(Linear{state.w}, s) <= params.epsilon;
            halted = all_ok;
        }
        if (halted) break;
    }

    ProtocolResult result;
    result.hypotheses.emplace(PartyId::player(holder), Linear{state.w});
    result.ledger = ch.ledger();
    result.trace = ch.trace();
    result.stats["updates"] = static_cast<double>(state.updates);
    result.stats["passes"] = static_cast<double>(passes);
    result.stats["gamma"] = gamma;
    result.stats["alpha"] = alpha;
    result.stats["last_meta_updates"] = static_cast<double>(prev_meta);
    double total = 0.0;
    for (const auto& s : data) {
        const double e = error_rate(Linear{state.w}, s);
        result.errors.per_player.push_back(e);
        total += e;
    }
    result.errors.mixture = total / static_cast<double>(k);
    return result;
}

ProtocolResult round_robin_perceptron(const std::vector<DistributionSpec>& players, const TargetFunction& f,
                                      const RoundRobinParams& params, const RunOptions& opts) {
    check_players(players, f);
    const Linear& target = linear_target(f);
    std::vector<Sample> data;
    for (std::size_t i = 0; i < players.size(); ++i) {
        Rng rng = Rng::stream(opts.seed, "sample", i);
        data.push_back(draw_sample(players[i], f, params.sample_size, rng));
    }
    ProtocolResult result = round_robin_perceptron(data, target, params, opts);
    result.stats["per_player_sample"] = static_cast<double>(params.sample_size);
    result.errors = measure_errors(result.hypotheses, f, players, opts.m_eval, opts.seed);
    return result;
}

std::vector<Sample> well_spread_dataset(std::size_t k, std::size_t per_player, double alpha, double gamma,
                                        std::uint64_t seed) {
    if (!(gamma > 0.0) || !(gamma * gamma < alpha)) {
        throw ConfigurationError("well-spread generator needs 0 < gamma and gamma^2 < alpha");
    }
    const double g_hi = std::min(1.1 * gamma, 0.999 * std::sqrt(alpha));
    const std::size_t d = k * per_player + 1;
    std::vector<Sample> out;
    std::size_t axis = 1;
    for (std::size_t i = 0; i < k; ++i) {
        Rng rng = Rng::stream(seed, "well_spread", i);
        Sample s(d);
        for (std::size_t t = 0; t < per_player; ++t, ++axis) {
            const double g = gamma + (g_hi - gamma) * rng.uniform();
            const int label = rng.bernoulli(0.5) ? 1 : -1;
            Features x(d, 0.0);
            x[0] = label * g;
            x[axis] = (rng.bernoulli(0.5) ? 1.0 : -1.0) * std::sqrt(1.0 - g * g);
            s.add({std::move(x), label});
        }
        out.push_back(std::move(s));
    }
    return out;
}

std::vector<DistributionSpec> appendix_c_players(double gamma) {
    const double g = gamma;
    const Features a{1, g, 3 * g}, b{1, g, -g}, c{1, g, g};
    const Features p{1, -g, -3 * g}, q{1, -g, g};
    FixedOrderedList first, second;
    first.points.push_back(c);
    for (int i = 0; i < 49; ++i) {
        first.points.push_back(a);
        first.points.push_back(b);
    }
    first.points.push_back(c);
    for (int i = 0; i < 50; ++i) {
        second.points.push_back(p);
        second.points.push_back(q);
    }
    return {first, second};
}

AppendixCRun appendix_c_lower_bound(double gamma, std::uint64_t max_rounds) {
    if (!(gamma > 0.0 && gamma <= 0.2)) throw ConfigurationError("gamma must be in (0, 0.2]");
    const auto players = appendix_c_players(gamma);
    const Linear f{{0.0, 1.0, 0.0}};
    std::vector<Sample> data;
    for (std::size_t i = 0; i < 2; ++i) {
        Rng rng = Rng::stream(0, "sample", i);
        data.push_back(draw_sample(players[i], f, 100, rng));
    }
    RoundRobinParams params;
    params.rule = StopRule::UntilConsistent;
    params.max_meta_rounds = static_cast<std::size_t>((max_rounds + 1) / 2);
    AppendixCRun run;
    run.result = round_robin_perceptron(data, f, params, RunOptions{}, &run.trace);
    run.rounds = run.result.ledger.rounds;
    return run;
}

void write_trace_csv(std::ostream& out, const std::vector<UpdateRecord>& trace) {
    const std::size_t d = trace.empty() ? 0 : trace.front().w.size();
    out << "round,player,example,label";
    for (std::size_t j = 0; j < d; ++j) out << ",x_" << j;
    for (std::size_t j = 0; j < d; ++j) out << ",w_" << j;
    out << '\n';
    const auto old = out.precision(17);
    for (const auto& r : trace) {
        out << r.round << ',' << r.player << ',' << r.example << ',' << r.ex.label;
        for (double v : r.ex.x) out << ',' << v;
        for (double v : r.w) out << ',' << v;
        out << '\n';
    }
    out.precision(old);
}

} // namespace dpac::linear
