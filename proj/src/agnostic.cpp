#include "dpac/agnostic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>

#include "dpac/errors.hpp"

namespace dpac::agnostic {

std::vector<Hypothesis> threshold_class(std::size_t points) {
    if (points < 2) throw ConfigurationError("threshold grid needs at least two points");
    std::vector<Hypothesis> out;
    for (std::size_t i = 0; i < points; ++i) {
        const double t = static_cast<double>(i) / static_cast<double>(points - 1);
        out.emplace_back(Threshold{t, 1});
        out.emplace_back(Threshold{t, -1});
    }
    return out;
}

std::size_t halving_set_size(double opt_guess, double epsilon, double c_s) {
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(c_s / (opt_guess + epsilon))));
}

std::size_t halving_set_count(std::size_t class_size, double c_N, std::size_t n_min) {
    const double lg = std::log2(std::max(2.0, std::log2(std::max<double>(2.0, static_cast<double>(class_size)))));
    return std::max(n_min, static_cast<std::size_t>(std::ceil(c_N * lg)));
}

namespace {

struct HalvingOutcome {
    ProtocolResult result;
    bool collapsed = false;
};

HalvingOutcome halving_impl(const std::vector<DistributionSpec>& players, const TargetFunction& f,
                            const std::vector<Hypothesis>& H, const HalvingParams& params, const RunOptions& opts) {
    check_run(players, f, params.epsilon, params.delta);
    if (H.empty()) throw ConfigurationError("robust halving needs a nonempty class");
    if (!(params.opt_guess >= 0.0)) throw ConfigurationError("opt_guess must be >= 0");
    const std::size_t k = players.size();
    const std::size_t s = halving_set_size(params.opt_guess, params.epsilon, params.c_s);
    const std::size_t N = halving_set_count(H.size(), params.c_N, params.n_min);
    const std::size_t cap = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::ceil(params.c_L * std::log2(static_cast<double>(std::max<std::size_t>(H.size(), 2))))));
    const unsigned width = count_width(s);

    Channel ch(k, false, Encoding{is_boolean(players[0]), opts.precision_bits}, SyncModel::Asynchronous,
               opts.record_trace);
    std::vector<std::size_t> alive(H.size());
    std::iota(alive.begin(), alive.end(), 0);
    std::vector<std::uint64_t> cum_err(H.size(), 0);
    std::vector<std::size_t> drawn(k, 0);
    std::size_t best_eliminated = 0;
    std::size_t loops = 0;
    std::vector<std::size_t> survivors_log;
    bool collapsed = false;

    for (;; ++loops) {
        if (loops >= cap) throw NonConvergence("robust halving exceeded its loop cap");
        Rng crng = Rng::stream(opts.seed, "halving_counts", loops);
        std::vector<std::vector<std::uint64_t>> counts(N, std::vector<std::uint64_t>(k, 0));
        for (auto& set : counts) {
            for (std::size_t t = 0; t < s; ++t) ++set[k == 1 ? 0 : crng.below(k)];
        }
        if (!params.shared_randomness) {
            for (std::size_t i = 1; i < k; ++i) {
                for (const auto& set : counts) ch.send(PartyId::player(0), PartyId::player(i), msg::Count{set[i], width});
            }
        }

        MajorityOfSet maj;
        for (std::size_t a : alive) maj.members.push_back(H[a]);
        const Hypothesis vote{maj};
        std::vector<LabeledExample> broadcast;
        for (std::size_t j = 0; j < N; ++j) {
            bool have = false;
            for (std::size_t i = 0; i < k; ++i) {
                Rng prng = Rng::stream(opts.seed, "halving_draw", i, loops * N + j);
                for (std::uint64_t t = 0; t < counts[j][i]; ++t) {
                    Features x = draw_point(players[i], prng, drawn[i]++);
                    int label = classify(f, x);
                    if (params.label_noise > 0.0 && prng.bernoulli(params.label_noise)) label = -label;
                    for (std::size_t h = 0; h < H.size(); ++h) cum_err[h] += classify(H[h], x) != label ? 1 : 0;
                    if (!have && classify(vote, x) != label) {
                        have = true;
                        ch.send(PartyId::player(i), Broadcast{}, msg::Example{{x, label}});
                        broadcast.push_back({std::move(x), label});
                    }
                }
            }
        }
        ch.advance_round();
        if (3 * broadcast.size() <= N) break;

        std::uint64_t best = std::numeric_limits<std::uint64_t>::max();
        for (std::size_t a : alive) best = std::min(best, cum_err[a]);
        std::vector<std::size_t> kept;
        bool dropped_best = false;
        for (std::size_t a : alive) {
            std::size_t errs = 0;
            for (const auto& ex : broadcast) errs += classify(H[a], ex.x) != ex.label ? 1 : 0;
            if (9 * errs > N) {
                dropped_best = dropped_best || cum_err[a] == best;
            } else {
                kept.push_back(a);
            }
        }
        best_eliminated += dropped_best ? 1 : 0;
        alive = std::move(kept);
        survivors_log.push_back(alive.size());
        if (alive.empty()) {
            collapsed = true;
            ++loops;
            break;
        }
    }

    HalvingOutcome out;
    out.collapsed = collapsed;
    ProtocolResult& result = out.result;
    result.ledger = ch.ledger();
    result.trace = ch.trace();
    result.stats["loops"] = static_cast<double>(collapsed ? loops : loops + 1);
    result.stats["survivors"] = static_cast<double>(alive.size());
    result.stats["best_eliminated"] = static_cast<double>(best_eliminated);
    result.stats["N"] = static_cast<double>(N);
    result.stats["s"] = static_cast<double>(s);
    result.stats["loop_cap"] = static_cast<double>(cap);
    for (std::size_t l = 0; l < survivors_log.size(); ++l) {
        result.stats["survivors_after_" + std::to_string(l)] = static_cast<double>(survivors_log[l]);
    }
    if (!collapsed) {
        MajorityOfSet maj;
        for (std::size_t a : alive) maj.members.push_back(H[a]);
        for (std::size_t i = 0; i < k; ++i) result.hypotheses.emplace(PartyId::player(i), maj);
        result.errors = measure_errors({{PartyId::player(0), maj}}, f, players, opts.m_eval, opts.seed,
                                       params.label_noise);
    }
    return out;
}

} // namespace

ProtocolResult run_robust_halving(const std::vector<DistributionSpec>& players, const TargetFunction& f,
                                  const std::vector<Hypothesis>& H, const HalvingParams& params,
                                  const RunOptions& opts) {
    HalvingOutcome out = halving_impl(players, f, H, params, opts);
    if (out.collapsed) throw HalvingCollapse("every hypothesis was eliminated; opt_guess is too small");
    return std::move(out.result);
}

ProtocolResult opt_search(const std::vector<DistributionSpec>& players, const TargetFunction& f,
                          const std::vector<Hypothesis>& H, const OptSearchParams& params, const RunOptions& opts) {
    const double eps = params.halving.epsilon;
    check_run(players, f, eps, params.halving.delta);
    const std::size_t k = players.size();
    const std::size_t m_v = static_cast<std::size_t>(std::ceil(params.c_v / (eps * eps)));
    CostLedger total;
    std::size_t guesses = 0;
    for (std::size_t j = 0;; ++j) {
        const double guess = eps * std::ldexp(1.0, static_cast<int>(j));
        if (guess > 0.5) break;
        ++guesses;
        HalvingParams hp = params.halving;
        hp.opt_guess = guess;
        RunOptions ro = opts;
        ro.seed = Rng::stream(opts.seed, "opt_guess", j)();
        HalvingOutcome out;
        try {
            out = halving_impl(players, f, H, hp, ro);
        } catch (const NonConvergence&) {
            continue;
        }
        total += out.result.ledger;
        if (out.collapsed) continue;

        // Validation on a fresh sample drawn the same way as one halving set.
        const Hypothesis& h = out.result.output();
        Channel ch(k, false, Encoding{is_boolean(players[0]), opts.precision_bits});
        Rng crng = Rng::stream(ro.seed, "validation_counts");
        std::vector<std::uint64_t> counts(k, 0);
        for (std::size_t t = 0; t < m_v; ++t) ++counts[k == 1 ? 0 : crng.below(k)];
        std::uint64_t mistakes = 0;
        for (std::size_t i = 0; i < k; ++i) {
            if (i > 0 && !params.halving.shared_randomness) {
                ch.send(PartyId::player(0), PartyId::player(i), msg::Count{counts[i], count_width(m_v)});
            }
            Rng prng = Rng::stream(ro.seed, "validation_draw", i);
            std::uint64_t local = 0;
            for (std::uint64_t t = 0; t < counts[i]; ++t) {
                const Features x = draw_point(players[i], prng, t);
                int label = classify(f, x);
                if (hp.label_noise > 0.0 && prng.bernoulli(hp.label_noise)) label = -label;
                local += classify(h, x) != label ? 1 : 0;
            }
            if (i > 0) ch.send(PartyId::player(i), PartyId::player(0), msg::Count{local, count_width(m_v)});
            mistakes += local;
        }
        ch.advance_round();
        total += ch.ledger();
        const double verr = static_cast<double>(mistakes) / static_cast<double>(m_v);
        if (verr <= params.C * (guess + eps)) {
            ProtocolResult result = std::move(out.result);
            result.ledger = total;
            result.stats["guesses"] = static_cast<double>(guesses);
            result.stats["accepted_j"] = static_cast<double>(j);
            result.stats["validation_error"] = verr;
            return result;
        }
    }
    throw SearchFailure("no opt guess up to 1/2 was accepted");
}

IntervalDpResult interval_dp(const std::vector<double>& pos, const std::vector<double>& neg, std::size_t d) {
    const std::size_t G = pos.size();
    constexpr double inf = std::numeric_limits<double>::infinity();
    // cost[g][r][l]: best cost of segments 0..g with r positive runs used, segment g labeled l (0 = -, 1 = +).
    std::vector<std::vector<std::array<double, 2>>> cost(G, std::vector<std::array<double, 2>>(d + 1, {inf, inf}));
    std::vector<std::vector<std::array<int, 2>>> from(G, std::vector<std::array<int, 2>>(d + 1, {-1, -1}));
    if (G == 0) return {};
    cost[0][0][0] = pos[0];
    if (d >= 1) cost[0][1][1] = neg[0];
    for (std::size_t g = 1; g < G; ++g) {
        for (std::size_t r = 0; r <= d; ++r) {
            // label -: from either label with the same run count
            for (int l = 0; l < 2; ++l) {
                const double c = cost[g - 1][r][static_cast<std::size_t>(l)] + pos[g];
                if (c < cost[g][r][0]) {
                    cost[g][r][0] = c;
                    from[g][r][0] = l;
                }
            }
            // label +: continue a run, or open a new one after a -
            const double stay = cost[g - 1][r][1] + neg[g];
            if (stay < cost[g][r][1]) {
                cost[g][r][1] = stay;
                from[g][r][1] = 1;
            }
            if (r >= 1) {
                const double open = cost[g - 1][r - 1][0] + neg[g];
                if (open < cost[g][r][1]) {
                    cost[g][r][1] = open;
                    from[g][r][1] = 0;
                }
            }
        }
    }
    std::size_t br = 0;
    int bl = 0;
    double best = inf;
    for (std::size_t r = 0; r <= d; ++r) {
        for (int l = 0; l < 2; ++l) {
            if (cost[G - 1][r][static_cast<std::size_t>(l)] < best) {
                best = cost[G - 1][r][static_cast<std::size_t>(l)];
                br = r;
                bl = l;
            }
        }
    }
    std::vector<int> labels(G);
    for (std::size_t g = G; g-- > 0;) {
        labels[g] = bl;
        const int prev = from[g][br][static_cast<std::size_t>(bl)];
        if (bl == 1 && prev == 0) --br;
        bl = prev;
    }
    IntervalDpResult out;
    out.cost = best;
    for (std::size_t g = 0; g < G; ++g) {
        if (labels[g] != 1) continue;
        if (g > 0 && labels[g - 1] == 1) {
            out.runs.back().second = g;
        } else {
            out.runs.emplace_back(g, g);
        }
    }
    return out;
}

std::uint64_t quantize_fraction(double f, unsigned bits) {
    const double levels = std::ldexp(1.0, static_cast<int>(bits)) - 1.0;
    return static_cast<std::uint64_t>(std::ceil(std::clamp(f, 0.0, 1.0) * levels - 0.5));
}

PlayerSummary summarize(const Sample& sample, std::size_t B, unsigned bits) {
    PlayerSummary out;
    std::vector<std::size_t> order;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        if (sample.weights()[i] > 0.0) order.push_back(i);
    }
    if (order.empty() || B == 0) return out;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return sample[a].x[0] < sample[b].x[0]; });
    double total = 0.0;
    for (std::size_t i : order) total += sample.weights()[i];
    double acc = 0.0, seg_w = 0.0, seg_pos = 0.0;
    std::size_t next = 1;
    for (std::size_t r = 0; r < order.size(); ++r) {
        const std::size_t i = order[r];
        acc += sample.weights()[i];
        seg_w += sample.weights()[i];
        if (sample[i].label == 1) seg_pos += sample.weights()[i];
        const bool last = r + 1 == order.size();
        // Close a segment once its quantile is reached, never between equal x.
        const bool tie_next = !last && sample[order[r + 1]].x[0] == sample[i].x[0];
        if (last || (!tie_next && acc >= total * static_cast<double>(next) / static_cast<double>(B))) {
            out.borders.push_back(sample[i].x[0]);
            out.fractions.push_back(quantize_fraction(seg_pos / seg_w, bits));
            seg_w = seg_pos = 0.0;
            while (next <= B && acc >= total * static_cast<double>(next) / static_cast<double>(B)) ++next;
        }
    }
    return out;
}

MergedSegments merge_summaries(const std::vector<PlayerSummary>& summaries, unsigned bits) {
    MergedSegments m;
    std::size_t active = 0;
    for (const auto& s : summaries) {
        m.right.insert(m.right.end(), s.borders.begin(), s.borders.end());
        active += s.borders.empty() ? 0 : 1;
    }
    std::sort(m.right.begin(), m.right.end());
    m.right.erase(std::unique(m.right.begin(), m.right.end()), m.right.end());
    m.pos.assign(m.right.size(), 0.0);
    m.neg.assign(m.right.size(), 0.0);
    if (active == 0) return m;
    const double levels = std::ldexp(1.0, static_cast<int>(bits)) - 1.0;
    for (const auto& s : summaries) {
        if (s.borders.empty()) continue;
        const double mass = 1.0 / (static_cast<double>(active) * static_cast<double>(s.borders.size()));
        double left = std::min(0.0, m.right.front());
        for (std::size_t b = 0; b < s.borders.size(); ++b) {
            const double right = s.borders[b];
            const double frac = static_cast<double>(s.fractions[b]) / levels;
            // Merged pieces (prev, right[g]] inside (left, right].
            const auto lo = std::upper_bound(m.right.begin(), m.right.end(), left) - m.right.begin();
            const auto hi = std::lower_bound(m.right.begin(), m.right.end(), right) - m.right.begin();
            const double span = right - left;
            for (auto g = lo; g <= hi; ++g) {
                const double prev = g == 0 ? std::min(0.0, m.right.front()) : m.right[static_cast<std::size_t>(g) - 1];
                const double piece = span > 0.0 ? (m.right[static_cast<std::size_t>(g)] - std::max(prev, left)) / span
                                                : 1.0;
                m.pos[static_cast<std::size_t>(g)] += mass * piece * frac;
                m.neg[static_cast<std::size_t>(g)] += mass * piece * (1.0 - frac);
            }
            left = right;
        }
    }
    return m;
}

ProtocolResult run_interval_summary(const std::vector<DistributionSpec>& players, const TargetFunction& f,
                                    const IntervalParams& params, const RunOptions& opts) {
    check_run(players, f, params.epsilon, params.delta);
    if (dimension(f) != 1) throw ConfigurationError("interval summary works on the line");
    if (params.d == 0) throw ConfigurationError("interval budget d must be positive");
    const std::size_t k = players.size();
    const double ratio = static_cast<double>(params.d) / params.epsilon;
    const auto B = static_cast<std::size_t>(std::ceil(ratio));
    const auto bits = static_cast<unsigned>(std::max(1.0, std::ceil(std::log2(ratio))));
    const std::size_t m =
        params.sample_size != 0 ? params.sample_size
                                : static_cast<std::size_t>(std::ceil(static_cast<double>(B) / params.epsilon));

    Channel ch(k, true, Encoding{false, opts.precision_bits}, SyncModel::Asynchronous, opts.record_trace);
    std::vector<PlayerSummary> summaries;
    std::size_t borders = 0;
    for (std::size_t i = 0; i < k; ++i) {
        Rng rng = Rng::stream(opts.seed, "sample", i);
        Sample s = draw_sample(players[i], f, m, rng);
        if (params.label_noise > 0.0) apply_label_noise(s, params.label_noise, rng);
        summaries.push_back(summarize(s, B, bits));
        for (std::size_t b = 0; b < summaries.back().borders.size(); ++b) {
            ch.send(PartyId::player(i), kCenter, msg::Bits{opts.precision_bits});
            ch.send(PartyId::player(i), kCenter, msg::Count{summaries.back().fractions[b], bits});
        }
        borders += summaries.back().borders.size();
    }
    ch.advance_round();

    const MergedSegments merged = merge_summaries(summaries, bits);
    const IntervalDpResult dp = interval_dp(merged.pos, merged.neg, params.d);
    IntervalUnion h;
    constexpr double inf = std::numeric_limits<double>::infinity();
    for (const auto& [a, b] : dp.runs) {
        const double lo = a == 0 ? -inf : std::nextafter(merged.right[a - 1], inf);
        const double hi = b + 1 == merged.right.size() ? inf : merged.right[b];
        h.intervals.emplace_back(lo, hi);
    }

    ProtocolResult result;
    result.hypotheses.emplace(kCenter, h);
    result.ledger = ch.ledger();
    result.trace = ch.trace();
    result.stats["borders"] = static_cast<double>(borders);
    result.stats["fractions"] = static_cast<double>(borders);
    result.stats["B"] = static_cast<double>(B);
    result.stats["fraction_bits"] = static_cast<double>(bits);
    result.stats["merged_segments"] = static_cast<double>(merged.right.size());
    result.stats["dp_cost"] = dp.cost;
    result.stats["per_player_sample"] = static_cast<double>(m);
    result.errors = measure_errors(result.hypotheses, f, players, opts.m_eval, opts.seed, params.label_noise);
    return result;
}

} // namespace dpac::agnostic
