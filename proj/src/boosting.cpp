#include "dpac/boosting.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <ostream>
#include <random>

#include "dpac/errors.hpp"

namespace dpac::boosting {

std::vector<std::uint64_t> presample_counts(const std::vector<double>& weights, std::uint64_t m_weak, Rng& rng) {
    double total = 0.0;
    for (double w : weights) {
        if (!(w >= 0.0)) throw DegenerateDistribution("negative or NaN weight");
        total += w;
    }
    if (!(total > 0.0)) throw DegenerateDistribution("all player weights are zero");
    std::vector<std::uint64_t> counts(weights.size(), 0);
    if (weights.size() == 1) {
        counts[0] = m_weak;
        return counts;
    }
    std::uint64_t left = m_weak;
    double rest = total;
    for (std::size_t i = 0; i < weights.size() && left > 0; ++i) {
        if (i + 1 == weights.size() || weights[i] >= rest) {
            counts[i] = left;
            break;
        }
        const double p = std::clamp(weights[i] / rest, 0.0, 1.0);
        std::binomial_distribution<std::uint64_t> bin(left, p);
        counts[i] = p == 0.0 ? 0 : bin(rng);
        left -= counts[i];
        rest -= weights[i];
    }
    return counts;
}

double fixed_alpha(double beta) { return 0.5 * std::log((1.0 - beta) / beta); }

double adaboost_reweight(const Sample& sample, std::vector<double>& weights, const Hypothesis& h, double beta) {
    const double alpha = fixed_alpha(beta);
    double sum = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        weights[i] *= std::exp(-alpha * sample[i].label * classify(h, sample[i].x));
        sum += weights[i];
    }
    return sum;
}

double quantize(double w, std::optional<unsigned> q) {
    if (!q || w == 0.0) return w;
    int e = 0;
    const double f = std::frexp(w, &e);  // w = f 2^e, f in [0.5, 1)
    const double scale = std::ldexp(1.0, static_cast<int>(*q));
    const double m = 1.0 + std::floor((2.0 * f - 1.0) * scale) / scale;
    return std::ldexp(m, e - 1);
}

std::size_t quantized_bits(std::optional<unsigned> q) { return q ? *q + 11 : 64; }

double tv_distance(const std::vector<double>& exact, const std::vector<double>& quantized) {
    const double a = std::accumulate(exact.begin(), exact.end(), 0.0);
    const double b = std::accumulate(quantized.begin(), quantized.end(), 0.0);
    double s = 0.0;
    for (std::size_t i = 0; i < exact.size(); ++i) s += std::abs(exact[i] / a - quantized[i] / b);
    return 0.5 * s;
}

std::vector<std::size_t> draw_weighted_indices(const std::vector<double>& weights, std::uint64_t count, Rng& rng) {
    std::vector<double> cum(weights.size());
    std::partial_sum(weights.begin(), weights.end(), cum.begin());
    std::vector<std::size_t> out;
    out.reserve(count);
    for (std::uint64_t t = 0; t < count; ++t) {
        const double u = rng.uniform() * cum.back();
        const auto it = std::upper_bound(cum.begin(), cum.end(), u);
        out.push_back(std::min<std::size_t>(static_cast<std::size_t>(it - cum.begin()), cum.size() - 1));
    }
    return out;
}

WeakLearner stump_learner(std::size_t n) {
    WeakLearner wl;
    wl.name = "stump";
    wl.complexity = static_cast<std::size_t>(std::ceil(std::log2(4.0 * static_cast<double>(n) + 2.0)));
    wl.fit = [n](const Sample& s) {
        // err[j][b][c]: weight of examples with x_j = b and label bit c.
        std::vector<std::array<std::array<double, 2>, 2>> w(n, {{{0, 0}, {0, 0}}});
        double pos = 0.0, neg = 0.0;
        for (std::size_t i = 0; i < s.size(); ++i) {
            const double wt = s.weights()[i];
            const std::size_t c = s[i].label == 1 ? 1 : 0;
            (c == 1 ? pos : neg) += wt;
            for (std::size_t j = 0; j < n; ++j) w[j][s[i].x[j] == 1.0 ? 1 : 0][c] += wt;
        }
        Hypothesis best = Constant{-1};
        double best_err = pos;
        if (neg < best_err) {
            best = Constant{1};
            best_err = neg;
        }
        for (std::size_t j = 0; j < n; ++j) {
            for (int b = 0; b < 2; ++b) {
                const auto& on = w[j][static_cast<std::size_t>(b)];
                const auto& off = w[j][static_cast<std::size_t>(1 - b)];
                // label +1 when x_j = b: wrong on negatives there and positives elsewhere.
                const double err_pos = on[0] + off[1];
                const double err_neg = on[1] + off[0];
                if (err_pos < best_err) {
                    best = Stump{n, j, b, 1};
                    best_err = err_pos;
                }
                if (err_neg < best_err) {
                    best = Stump{n, j, b, -1};
                    best_err = err_neg;
                }
            }
        }
        return best;
    };
    return wl;
}

std::uint64_t weak_sample_size(std::size_t d_class, double beta, double c_w) {
    return static_cast<std::uint64_t>(std::ceil(c_w * (static_cast<double>(d_class) / beta) * std::log(1.0 / beta)));
}

std::size_t boosting_rounds(double epsilon, double beta) {
    const double gap = 0.5 - beta;
    return static_cast<std::size_t>(std::ceil(std::log(1.0 / epsilon) / (2.0 * gap * gap)));
}

BoostingRun run_distributed_boosting(const std::vector<DistributionSpec>& players, const TargetFunction& f,
                                     const WeakLearner& learner, const BoostingParams& params,
                                     const RunOptions& opts) {
    check_run(players, f, params.epsilon, params.delta);
    if (!(params.beta > 0.0 && params.beta < 0.5)) throw ConfigurationError("beta must be in (0,1/2)");
    if (params.q && *params.q < static_cast<unsigned>(std::ceil(std::log2(1.0 / params.beta)))) {
        throw ConfigurationError("quantization bits q must be at least ceil(log2(1/beta))");
    }
    if (!learner.fit) throw ConfigurationError("boosting needs a weak learner");
    const std::size_t k = players.size();
    const std::size_t n = dimension(f);
    const std::size_t m_local =
        params.local_sample_size != 0
            ? params.local_sample_size
            : static_cast<std::size_t>(std::ceil(params.c_local * (static_cast<double>(n) / params.epsilon) *
                                                 std::log(1.0 / params.epsilon)));
    const std::uint64_t m_weak = weak_sample_size(learner.complexity, params.beta, params.c_w);
    const std::size_t T = boosting_rounds(params.epsilon, params.beta);
    const double alpha = fixed_alpha(params.beta);

    std::vector<Sample> samples;
    std::vector<std::vector<double>> weights;
    for (std::size_t i = 0; i < k; ++i) {
        Rng rng = Rng::stream(opts.seed, "sample", i);
        samples.push_back(draw_sample(players[i], f, m_local, rng));
        weights.emplace_back(m_local, 1.0);
    }
    std::vector<double> sums(k, static_cast<double>(m_local));
    std::vector<double> votes(k * m_local, 0.0);  // running margin sum per example

    Channel ch(k, true, Encoding{is_boolean(players[0]), opts.precision_bits}, SyncModel::Asynchronous,
               opts.record_trace);
    BoostingRun run;
    WeightedMajority majority;
    const unsigned count_w = count_width(m_weak);
    const unsigned mistake_w = count_width(m_local);
    double bound = 1.0;
    double training_error = 1.0;
    for (std::size_t t = 0; t < T; ++t) {
        RoundTelemetry tel;
        tel.round = t;
        std::vector<double> quantized(k);
        for (std::size_t i = 0; i < k; ++i) {
            quantized[i] = quantize(sums[i], params.q);
            if (params.q) {
                int e = 0;
                const double frac = std::frexp(quantized[i], &e);
                const auto sig = static_cast<std::uint64_t>((2.0 * frac - 1.0) * std::ldexp(1.0, static_cast<int>(*params.q)));
                ch.send(PartyId::player(i), kCenter, msg::Count{sig, *params.q});
                ch.send(PartyId::player(i), kCenter, msg::Count{static_cast<std::uint64_t>(e + 1022), 11});
            } else {
                ch.send(PartyId::player(i), kCenter, msg::Bits{64});
            }
        }
        tel.tv = tv_distance(sums, quantized);
        tel.weight_total = std::accumulate(quantized.begin(), quantized.end(), 0.0);

        Rng count_rng = Rng::stream(opts.seed, "boost_counts", t);
        tel.counts = presample_counts(quantized, m_weak, count_rng);
        Sample shipped(n);
        for (std::size_t i = 0; i < k; ++i) {
            ch.send(kCenter, PartyId::player(i), msg::Count{tel.counts[i], count_w});
            Rng draw_rng = Rng::stream(opts.seed, "boost_draw", i, t);
            for (std::size_t idx : draw_weighted_indices(weights[i], tel.counts[i], draw_rng)) {
                ch.send(PartyId::player(i), kCenter, msg::Example{samples[i][idx]});
                shipped.add(samples[i][idx]);
            }
        }
        tel.examples = shipped.size();

        const Hypothesis h = learner.fit(shipped);
        if (error_rate(h, shipped) > 0.5) {
            throw WeakLearningFailure("weak learner erred on more than half of its weighted sample");
        }
        ch.send(kCenter, Broadcast{}, msg::HypothesisMsg{h});

        double wrong = 0.0, total = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
            for (std::size_t e = 0; e < m_local; ++e) {
                const int hx = classify(h, samples[i][e].x);
                if (hx != samples[i][e].label) wrong += weights[i][e];
                total += weights[i][e];
                votes[i * m_local + e] += alpha * hx;
            }
            sums[i] = adaboost_reweight(samples[i], weights[i], h, params.beta);
        }
        tel.eps_t = wrong / total;
        bound *= 2.0 * std::sqrt(tel.eps_t * (1.0 - tel.eps_t));
        tel.bound = bound;
        majority.members.push_back(h);
        majority.weights.push_back(alpha);
        run.weak_hypotheses.push_back(h);

        std::size_t mistakes = 0;
        for (std::size_t i = 0; i < k; ++i) {
            std::size_t local = 0;
            for (std::size_t e = 0; e < m_local; ++e) {
                const int y = votes[i * m_local + e] >= 0.0 ? 1 : -1;
                local += y != samples[i][e].label ? 1 : 0;
            }
            if (params.early_stop) ch.send(PartyId::player(i), kCenter, msg::Count{local, mistake_w});
            mistakes += local;
        }
        training_error = static_cast<double>(mistakes) / static_cast<double>(k * m_local);
        tel.training_error = training_error;
        ch.advance_round();
        tel.bits = ch.ledger().bits;
        run.rounds.push_back(std::move(tel));
        if (params.early_stop && training_error <= params.epsilon) break;
    }

    ProtocolResult& result = run.result;
    result.hypotheses.emplace(kCenter, majority);
    result.ledger = ch.ledger();
    result.trace = ch.trace();
    result.stats["training_error"] = training_error;
    result.stats["m_weak"] = static_cast<double>(m_weak);
    result.stats["T"] = static_cast<double>(T);
    result.stats["rounds_run"] = static_cast<double>(run.rounds.size());
    result.stats["per_player_sample"] = static_cast<double>(m_local);
    result.errors = measure_errors(result.hypotheses, f, players, opts.m_eval, opts.seed);
    return run;
}

void write_telemetry_csv(std::ostream& out, const std::vector<RoundTelemetry>& rounds) {
    out << "round,eps_t,W_t,tv,training_error,bound,examples,bits\n";
    const auto old = out.precision(17);
    for (const auto& r : rounds) {
        out << r.round << ',' << r.eps_t << ',' << r.weight_total << ',' << r.tv << ',' << r.training_error << ','
            << r.bound << ',' << r.examples << ',' << r.bits << '\n';
    }
    out.precision(old);
}

} // namespace dpac::boosting
