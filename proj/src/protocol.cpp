#include "dpac/protocol.hpp"

#include <algorithm>

#include "dpac/errors.hpp"

namespace dpac {

const Hypothesis& ProtocolResult::output() const {
    if (auto it = hypotheses.find(kCenter); it != hypotheses.end()) return it->second;
    if (hypotheses.empty()) throw ProtocolError("protocol produced no hypothesis");
    return hypotheses.begin()->second;
}

double error_rate(const Hypothesis& h, const Sample& sample) {
    double wrong = 0.0;
    double total = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const double w = sample.weights()[i];
        total += w;
        if (w > 0.0 && classify(h, sample[i].x) != sample[i].label) wrong += w;
    }
    return total > 0.0 ? wrong / total : 0.0;
}

double error_rate(const Hypothesis& h, const TargetFunction& f, const DistributionSpec& spec,
                  std::size_t m_eval, std::uint64_t seed) {
    if (m_eval == 0) throw ConfigurationError("m_eval must be at least 1");
    Rng rng = Rng::stream(seed, "eval", 0);
    std::size_t wrong = 0;
    for (std::size_t i = 0; i < m_eval; ++i) {
        const Features x = draw_point(spec, rng, i);
        if (classify(h, x) != classify(f, x)) ++wrong;
    }
    return static_cast<double>(wrong) / static_cast<double>(m_eval);
}

double mixture_error(const Hypothesis& h, const TargetFunction& f,
                     const std::vector<DistributionSpec>& players, std::size_t m_eval, std::uint64_t seed) {
    std::map<PartyId, Hypothesis> one{{kCenter, h}};
    return measure_errors(one, f, players, m_eval, seed).mixture;
}

ErrorReport measure_errors(const std::map<PartyId, Hypothesis>& receivers, const TargetFunction& f,
                           const std::vector<DistributionSpec>& players, std::size_t m_eval,
                           std::uint64_t seed, double label_noise) {
    const std::size_t k = players.size();
    if (k == 0) throw ConfigurationError("no players to evaluate on");
    const std::size_t per = std::max<std::size_t>(1, m_eval / k);
    ErrorReport report;
    report.per_player.assign(k, 0.0);
    std::vector<double> mixture(receivers.size(), 0.0);
    for (std::size_t i = 0; i < k; ++i) {
        Rng rng = Rng::stream(seed, "eval", i);
        std::vector<std::size_t> wrong(receivers.size(), 0);
        for (std::size_t t = 0; t < per; ++t) {
            const Features x = draw_point(players[i], rng, t);
            const int y = classify(f, x);
            std::size_t r = 0;
            for (const auto& [id, h] : receivers) {
                if (classify(h, x) != y) ++wrong[r];
                ++r;
            }
        }
        for (std::size_t r = 0; r < receivers.size(); ++r) {
            double e = static_cast<double>(wrong[r]) / static_cast<double>(per);
            e = label_noise + (1.0 - 2.0 * label_noise) * e;
            report.per_player[i] = std::max(report.per_player[i], e);
            mixture[r] += e / static_cast<double>(k);
        }
    }
    report.mixture = mixture.empty() ? 0.0 : *std::max_element(mixture.begin(), mixture.end());
    return report;
}

void check_run(const std::vector<DistributionSpec>& players, const TargetFunction& f, double epsilon,
               double delta) {
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw ConfigurationError("epsilon must be in (0,1)");
    if (!(delta > 0.0 && delta < 1.0)) throw ConfigurationError("delta must be in (0,1)");
    check_players(players, f);
}

void check_players(const std::vector<DistributionSpec>& players, const TargetFunction& f) {
    if (players.empty()) throw ConfigurationError("k must be at least 1");
    validate(f);
    for (const auto& p : players) {
        validate(p);
        if (dimension(p) != dimension(f)) throw ConfigurationError("player distribution dimension does not match target");
    }
}

} // namespace dpac
