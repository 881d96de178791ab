#include "doctest.h"

#include <algorithm>
#include <set>

#include "dpac/declist.hpp"
#include "dpac/errors.hpp"

using namespace dpac;
using namespace dpac::declist;

namespace {

// Direct definition scan over the 4n+2 triplets.
std::set<Rule> brute_force(const Sample& s) {
    std::set<Rule> out;
    const std::size_t n = s.dim();
    for (int c = 0; c < 2; ++c) {
        bool ok = true;
        for (const auto& ex : s.examples()) ok = ok && (ex.label == 1) == (c == 1);
        if (ok) out.insert({0, 0, c});
    }
    for (std::size_t j = 1; j <= n; ++j) {
        for (int b = 0; b < 2; ++b) {
            for (int c = 0; c < 2; ++c) {
                bool ok = true;
                for (const auto& ex : s.examples()) {
                    if (static_cast<int>(ex.x[j - 1]) == b) ok = ok && (ex.label == 1) == (c == 1);
                }
                if (ok) out.insert({j, b, c});
            }
        }
    }
    return out;
}

DecisionList planted_list(std::size_t n, std::size_t len, Rng& rng) {
    std::vector<std::size_t> vars(n);
    for (std::size_t j = 0; j < n; ++j) vars[j] = j + 1;
    for (std::size_t i = 0; i < len; ++i) std::swap(vars[i], vars[i + rng.below(n - i)]);
    DecisionList l{n, {}};
    for (std::size_t i = 0; i < len; ++i) {
        l.rules.push_back({vars[i], static_cast<int>(rng.below(2)), static_cast<int>(rng.below(2))});
    }
    l.rules.push_back({0, 0, static_cast<int>(rng.below(2))});
    return l;
}

// Each rule fires with probability about 1/8 on the points it still sees.
std::vector<DistributionSpec> skewed_players(const DecisionList& f, std::size_t k, Rng& rng) {
    std::vector<DistributionSpec> out;
    for (std::size_t i = 0; i < k; ++i) {
        std::vector<double> q(f.n, 0.5);
        for (const auto& r : f.rules) {
            if (r.is_else()) continue;
            const double fire = 0.05 + 0.1 * rng.uniform();
            q[r.j - 1] = r.b == 1 ? fire : 1.0 - fire;
        }
        out.push_back(ProductBernoulli{q});
    }
    return out;
}

} // namespace

TEST_CASE("triplet bookkeeping") {
    CHECK(all_triplets(2).size() == 10);
    CHECK(rule_bits(2) == 4);
    CHECK(rule_bits(50) == 8);
    CHECK(encoded_bits(msg::RuleMsg{{3, 1, 0}, 50}, Encoding{}) == 8);
}

TEST_CASE("single example (10, +1)") {
    Sample s(2);
    s.add({{1.0, 0.0}, 1});
    const auto t = consistent_triplets(s);
    const std::set<Rule> expected{{0, 0, 1}, {1, 1, 1}, {2, 0, 1}, {1, 0, 0}, {1, 0, 1}, {2, 1, 0}, {2, 1, 1}};
    CHECK(t == expected);
}

TEST_CASE("exhausted sample: everything is vacuously consistent") {
    Sample s(3);
    s.add({{1.0, 0.0, 1.0}, 1});
    s.add({{0.0, 0.0, 1.0}, -1});
    CHECK(consistent_triplets(Sample(3)).size() == 14);
    CHECK(consistent_triplets(s, {false, false}).size() == 14);
}

TEST_CASE("100 random points of a planted list match the brute-force scan") {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        Rng rng(seed);
        const std::size_t n = 3 + rng.below(10);
        const DecisionList f = planted_list(n, std::min<std::size_t>(n, 4), rng);
        const Sample s = draw_sample(UniformBoolean{n}, f, 100, rng);
        CHECK(consistent_triplets(s) == brute_force(s));
    }
}

TEST_CASE("one-rule target halts in at most two rounds with (1,1,1) first") {
    const DecisionList f{3, {{1, 1, 1}, {0, 0, 0}}};
    DecisionListParams p;
    p.sample_size = 10;
    RunOptions o{5};
    o.record_trace = true;
    auto r = run_decision_list({UniformBoolean{3}}, f, p, o);
    CHECK(r.ledger.rounds <= 2);
    bool found = false;
    for (const auto& e : r.trace) {
        if (e.round == 0 && e.from == kCenter && std::get<msg::RuleMsg>(e.message).rule == Rule{1, 1, 1}) found = true;
    }
    CHECK(found);
    CHECK(r.stats.at("consistent") == 1.0);
}

TEST_CASE("constant target broadcasts an else-rule in round one") {
    const DecisionList f{4, {{0, 0, 1}}};
    auto r = run_decision_list({UniformBoolean{4}, UniformBoolean{4}}, f, {}, RunOptions{1});
    CHECK(r.ledger.rounds == 1);
    const auto& out = r.output().as<DecisionList>();
    CHECK(out.rules.back() == Rule{0, 0, 1});
    CHECK(r.errors.mixture == 0.0);
}

TEST_CASE("protocol invariants over 100 random planted lists") {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        Rng rng(seed + 1234);
        const std::size_t n = 5 + rng.below(12);
        const std::size_t k = 1 + rng.below(4);
        const DecisionList f = planted_list(n, 1 + rng.below(5), rng);
        const auto players = skewed_players(f, k, rng);
        DecisionListParams p;
        p.sample_size = 150;
        RunOptions o{seed};
        o.m_eval = 500;
        o.record_trace = true;
        auto r = run_decision_list(players, f, p, o);
        CHECK(r.ledger.rounds <= alternations(f) + 1);
        CHECK(r.stats.at("consistent") == 1.0);
        CHECK(r.stats.at("upstream_bits") <= static_cast<double>(k * (4 * n + 2) * rule_bits(n)));

        // Each player announces a triplet at most once; the center never repeats one.
        std::map<int, std::set<Rule>> announced;
        std::set<Rule> broadcast;
        for (const auto& e : r.trace) {
            const Rule rule = std::get<msg::RuleMsg>(e.message).rule;
            if (e.from == kCenter) {
                CHECK(broadcast.insert(rule).second);
                // Soundness: whatever the center broadcasts was announced by every player first.
                for (std::size_t i = 0; i < k; ++i) CHECK(announced[static_cast<int>(i)].count(rule) == 1);
            } else {
                CHECK(announced[e.from.value].insert(rule).second);
            }
        }
        // Exact replay of the output against every drawn sample.
        for (std::size_t i = 0; i < k; ++i) {
            Rng srng = Rng::stream(seed, "sample", i);
            const Sample s = draw_sample(players[i], f, 150, srng);
            for (const auto& ex : s.examples()) CHECK(classify(r.output(), ex.x) == ex.label);
        }
    }
}

TEST_CASE("a non-list target is rejected up front") {
    std::vector<DistributionSpec> players{UniformBoolean{2}};
    const Parity xor2{BitVec::from_string("11")};
    CHECK_THROWS_AS(run_decision_list(players, xor2, {}, RunOptions{}), ConfigurationError);
}

TEST_CASE("n = 50, k = 4, 20-rule list: upstream bits within 4 * 202 * 8") {
    Rng rng(2024);
    const DecisionList f = planted_list(50, 20, rng);
    const auto players = skewed_players(f, 4, rng);
    DecisionListParams p;
    p.epsilon = 0.05;
    RunOptions o{3};
    o.m_eval = 4000;
    auto r = run_decision_list(players, f, p, o);
    CHECK(r.stats.at("upstream_bits") <= 4.0 * 202 * 8);
    CHECK(r.errors.mixture <= 0.05);
}

TEST_CASE("greedy central learner is consistent with planted-list samples") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        Rng rng(seed + 70);
        const DecisionList f = planted_list(12, 5, rng);
        const auto players = skewed_players(f, 1, rng);
        Rng draw(seed);
        const Sample s = draw_sample(players[0], f, 500, draw);
        const DecisionList h = learn_consistent(s);
        CHECK(error_rate(h, s) == 0.0);
        CHECK(h.rules.back().is_else());
    }
    Sample xor_sample(2);
    xor_sample.add({{0.0, 0.0}, -1});
    xor_sample.add({{1.0, 1.0}, -1});
    xor_sample.add({{0.0, 1.0}, 1});
    xor_sample.add({{1.0, 0.0}, 1});
    CHECK_THROWS_AS(learn_consistent(xor_sample), RealizabilityViolation);
}
