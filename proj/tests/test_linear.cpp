#include "doctest.h"

#include <cmath>
#include <sstream>

#include "dpac/errors.hpp"
#include "dpac/linear.hpp"

using namespace dpac;
using namespace dpac::linear;

namespace {

Linear unit_axis(std::size_t d, std::size_t j) {
    Linear f;
    f.w.assign(d, 0.0);
    f.w[j] = 1.0;
    return f;
}

Linear random_unit(std::size_t d, Rng& rng) {
    Linear f;
    double r = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
        f.w.push_back(rng.uniform() - 0.5);
        r += f.w.back() * f.w.back();
    }
    for (auto& v : f.w) v /= std::sqrt(r);
    return f;
}

double angle(const std::vector<double>& a, const std::vector<double>& b) {
    double ab = 0, aa = 0, bb = 0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        ab += a[j] * b[j];
        aa += a[j] * a[j];
        bb += b[j] * b[j];
    }
    return std::acos(std::clamp(ab / std::sqrt(aa * bb), -1.0, 1.0));
}

} // namespace

TEST_CASE("averaging a single point returns its direction") {
    PointMassList spec{{{1.0, 0.0}}, {1.0}};
    AveragingParams p;
    p.sample_size = 10;
    auto r = averaging_protocol({spec, spec}, unit_axis(2, 0), p, RunOptions{});
    const auto& w = r.output().as<Linear>().w;
    CHECK(w[0] == doctest::Approx(1.0));
    CHECK(w[1] == doctest::Approx(0.0));
    CHECK(r.ledger.hypotheses == 2);
    CHECK(r.ledger.rounds == 1);
    CHECK(r.ledger.bits == 2 * (2 * 32 + 1));
}

TEST_CASE("averaging with k = 1 is the plain sample average") {
    const Linear f = unit_axis(5, 2);
    AveragingParams p;
    p.sample_size = 300;
    auto r = averaging_protocol({UniformSphere{5}}, f, p, RunOptions{9});
    Rng rng = Rng::stream(9, "sample", 0);
    const Sample s = draw_sample(UniformSphere{5}, f, 300, rng);
    std::vector<double> mean(5, 0.0);
    for (const auto& ex : s.examples()) {
        double n = 0;
        for (double v : ex.x) n += v * v;
        for (std::size_t j = 0; j < 5; ++j) mean[j] += ex.label * ex.x[j] / std::sqrt(n);
    }
    double n = 0;
    for (double& v : mean) v /= 300.0;
    for (double v : mean) n += v * v;
    const auto& w = r.output().as<Linear>().w;
    for (std::size_t j = 0; j < 5; ++j) CHECK(w[j] == doctest::Approx(mean[j] / std::sqrt(n)).epsilon(1e-12));
}

TEST_CASE("averaging on the sphere: d = 10, k = 3, small angle") {
    Rng rng(5);
    int good = 0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const Linear f = random_unit(10, rng);
        AveragingParams p;
        p.sample_size = 20000;
        RunOptions o{seed};
        o.m_eval = 6000;
        auto r = averaging_protocol({UniformSphere{10}, UniformSphere{10}, GaussianSphericalUnitNorm{10}}, f, p, o);
        // For uniform direction data the disagreement is angle / pi.
        good += angle(r.output().as<Linear>().w, f.w) / M_PI <= 0.05 ? 1 : 0;
        CHECK(r.errors.mixture <= 0.07);
    }
    CHECK(good >= 9);
}

TEST_CASE("zero resultant is a degenerate estimate") {
    // x2 >= 0 labels both points +1 and their directions cancel.
    AveragingParams p;
    p.sample_size = 2;
    FixedOrderedList fixed{{{1.0, 0.0}, {-1.0, 0.0}}};
    CHECK_THROWS_AS(averaging_protocol({fixed}, unit_axis(2, 1), p, RunOptions{0}), DegenerateEstimate);
}

TEST_CASE("first perceptron update from zero copies the example") {
    const double g = 0.1;
    Sample s(3);
    s.add({{1, g, g}, 1});
    PerceptronState st;
    st.w.assign(3, 0.0);
    std::size_t cursor = 0;
    CHECK(margin_perceptron_pass(st, s, cursor, PassMode::UntilConsistent) == 1);
    CHECK(st.w == std::vector<double>{1, g, g});
}

TEST_CASE("perceptron fixed point: nothing to do, nothing changes") {
    Sample s(2);
    s.add({{1, 0}, 1});
    s.add({{-1, 0.5}, -1});
    PerceptronState st;
    st.w = {2.0, 0.0};
    std::size_t cursor = 1;
    CHECK(margin_perceptron_pass(st, s, cursor, PassMode::UntilConsistent) == 0);
    CHECK(st.w == std::vector<double>{2.0, 0.0});
    CHECK(cursor == 1);
}

TEST_CASE("separable 2-D sample at margin 0.1: at most 300 updates, norm growth <= 3") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        Rng rng(seed);
        const Linear f = random_unit(2, rng);
        Sample s(2);
        while (s.size() < 200) {
            const double t = 2 * M_PI * rng.uniform();
            Features x{std::cos(t), std::sin(t)};
            const double m = f.w[0] * x[0] + f.w[1] * x[1];
            if (std::abs(m) < 0.1) continue;
            s.add({x, m >= 0 ? 1 : -1});
        }
        PerceptronState st;
        st.w.assign(2, 0.0);
        double prev = 0.0;
        bool growth_ok = true;
        st.on_update = [&](std::size_t, const LabeledExample&, const std::vector<double>& w) {
            const double now = w[0] * w[0] + w[1] * w[1];
            growth_ok = growth_ok && now - prev <= 3.0 + 1e-12;
            prev = now;
        };
        std::size_t cursor = 0;
        margin_perceptron_pass(st, s, cursor, PassMode::UntilConsistent);
        CHECK(st.updates <= 300);
        CHECK(growth_ok);
        for (const auto& ex : s.examples()) CHECK_FALSE(violates(st.w, ex));
    }
}

TEST_CASE("update cap turns non-separable data into an error") {
    Sample s(1);
    s.add({{1.0}, 1});
    s.add({{1.0}, -1});
    PerceptronState st;
    st.w = {0.0};
    st.update_cap = 50;
    std::size_t cursor = 0;
    CHECK_THROWS_AS(margin_perceptron_pass(st, s, cursor, PassMode::UntilConsistent), NonSeparableData);
}

TEST_CASE("eps-fraction pass stops below eps") {
    Rng rng(2);
    const Linear f = random_unit(5, rng);
    const Sample s = draw_sample(UniformSphere{5}, f, 400, rng);
    PerceptronState st;
    st.w.assign(5, 0.0);
    std::size_t cursor = 0;
    margin_perceptron_pass(st, s, cursor, PassMode::UntilEpsFraction, 0.2);
    CHECK(violating_fraction(st.w, s) < 0.2);
}

TEST_CASE("lower-bound instance: the first nine updates follow the hand-derived table") {
    const double g = 0.1;
    auto run = appendix_c_lower_bound(g, 10000);
    REQUIRE(run.trace.size() >= 9);
    struct Row {
        std::size_t player;
        Features x;
        int label;
        std::vector<double> w;
    };
    const std::vector<Row> table{
        {0, {1, g, g}, 1, {1, g, g}},          {1, {1, -g, -3 * g}, -1, {0, 2 * g, 4 * g}},
        {1, {1, -g, g}, -1, {-1, 3 * g, 3 * g}}, {0, {1, g, 3 * g}, 1, {0, 4 * g, 6 * g}},
        {0, {1, g, -g}, 1, {1, 5 * g, 5 * g}},   {1, {1, -g, -3 * g}, -1, {0, 6 * g, 8 * g}},
        {1, {1, -g, g}, -1, {-1, 7 * g, 7 * g}}, {0, {1, g, 3 * g}, 1, {0, 8 * g, 10 * g}},
        {0, {1, g, -g}, 1, {1, 9 * g, 9 * g}},
    };
    for (std::size_t i = 0; i < 9; ++i) {
        CHECK(run.trace[i].player == table[i].player);
        CHECK(run.trace[i].ex.label == table[i].label);
        for (std::size_t j = 0; j < 3; ++j) {
            CHECK(run.trace[i].ex.x[j] == doctest::Approx(table[i].x[j]).epsilon(1e-12));
            CHECK(run.trace[i].w[j] == doctest::Approx(table[i].w[j]).epsilon(1e-9));
        }
    }
    // Exit condition: both players at margin 1.
    for (const auto& spec : appendix_c_players(g)) {
        for (const auto& x : std::get<FixedOrderedList>(spec).points) {
            const int label = x[1] > 0 ? 1 : -1;
            CHECK_FALSE(violates(run.result.output().as<Linear>().w, {x, label}));
        }
    }
}

TEST_CASE("lower-bound instance rounds grow like 1/gamma^2") {
    const auto a = appendix_c_lower_bound(0.1, 100000).rounds;
    const auto b = appendix_c_lower_bound(0.05, 100000).rounds;
    const double ratio = static_cast<double>(b) / static_cast<double>(a);
    CHECK(ratio >= 3.2);
    CHECK(ratio <= 4.8);
}

TEST_CASE("trace CSV has a header and one line per update") {
    auto run = appendix_c_lower_bound(0.2, 10000);
    std::ostringstream out;
    write_trace_csv(out, run.trace);
    const std::string s = out.str();
    CHECK(s.rfind("round,player,example,label,x_0,x_1,x_2,w_0,w_1,w_2\n", 0) == 0);
    CHECK(static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')) == run.trace.size() + 1);
}

TEST_CASE("well-spread generator certificate and margin") {
    auto data = well_spread_dataset(3, 80, 0.05, 0.2, 4);
    Rng rng(1);
    CHECK(max_cross_cosine(data, 100000, rng) < 0.05);
    CHECK(measured_margin(data, unit_axis(data[0].dim(), 0)) >= 0.2);
    CHECK_THROWS_AS(well_spread_dataset(2, 5, 0.01, 0.2, 0), ConfigurationError);
}

TEST_CASE("well-spread ring halts within 1 + 3 alpha / gamma^2 meta-rounds and classifies everything") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        auto data = well_spread_dataset(3, 100, 0.05, 0.2, seed);
        RoundRobinParams p;
        p.alpha = 0.05;
        auto r = round_robin_perceptron(data, unit_axis(data[0].dim(), 0), p, RunOptions{seed});
        CHECK(static_cast<double>(r.ledger.meta_rounds) <= 1.0 + 3.0 * 0.05 / 0.04);
        CHECK(r.errors.mixture == 0.0);
        CHECK(r.ledger.hypotheses == r.ledger.rounds);
    }
}

TEST_CASE("data satisfied after the first phase: one meta-round, k hypotheses") {
    std::vector<Sample> data(3, Sample(2));
    data[0].add({{1.0, 0.0}, 1});
    data[1].add({{0.9, 0.1}, 1});
    data[2].add({{-1.0, 0.05}, -1});
    RoundRobinParams p;
    auto r = round_robin_perceptron(data, unit_axis(2, 0), p, RunOptions{});
    CHECK(r.ledger.meta_rounds == 1);
    CHECK(r.ledger.hypotheses == 3);
    CHECK(r.ledger.bits == 3 * (2 * 32 + 1 + 32));
}

TEST_CASE("non-concentrated sphere data: update total within d k^2 / eps^2") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        Rng rng(seed + 40);
        const Linear f = random_unit(20, rng);
        RoundRobinParams p;
        p.rule = StopRule::NonConcentrated;
        p.epsilon = 0.1;
        p.sample_size = 500;
        RunOptions o{seed};
        o.m_eval = 4000;
        auto r = round_robin_perceptron({UniformSphere{20}, UniformSphere{20}}, f, p, o);
        CHECK(r.stats.at("updates") <= 20.0 * 4 / 0.01);
        CHECK(r.errors.mixture <= 0.15);
    }
}
