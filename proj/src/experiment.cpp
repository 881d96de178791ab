#include "dpac/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "dpac/agnostic.hpp"
#include "dpac/baseline.hpp"
#include "dpac/boosting.hpp"
#include "dpac/closed.hpp"
#include "dpac/declist.hpp"
#include "dpac/errors.hpp"
#include "dpac/linear.hpp"
#include "dpac/parity.hpp"
#include "dpac/privacy.hpp"

namespace dpac::experiment {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

constexpr const char* kAppendixC = "linear/appendix_c";

std::string where(const std::string& source, const YAML::Node& node) {
    YAML::Mark mark;
    try {
        mark = node.Mark();
    } catch (const YAML::Exception&) {
        return source;
    }
    if (mark.line < 0) return source;
    return source + ":" + std::to_string(mark.line + 1);
}

[[noreturn]] void fail(const std::string& source, const YAML::Node& node, const std::string& key,
                       const std::string& msg) {
    throw ConfigurationError(where(source, node) + ": field '" + key + "': " + msg);
}

bool has(const YAML::Node& parent, const std::string& key) {
    return parent && parent.IsMap() && parent[key].IsDefined() && !parent[key].IsNull();
}

template <class T>
T get(const std::string& source, const YAML::Node& parent, const std::string& key, T def) {
    if (!has(parent, key)) return def;
    const YAML::Node node = parent[key];
    try {
        return node.as<T>();
    } catch (const YAML::Exception&) {
        fail(source, node, key, "has the wrong type");
    }
}

template <class T>
T need(const std::string& source, const YAML::Node& parent, const std::string& key) {
    if (!has(parent, key)) fail(source, parent, key, "is required");
    return get<T>(source, parent, key, T{});
}

// Scalar or list; a scalar is repeated dim times.
std::vector<double> vec_or_scalar(const std::string& source, const YAML::Node& parent, const std::string& key,
                                  std::size_t dim, double def) {
    if (!has(parent, key)) return std::vector<double>(dim, def);
    const YAML::Node node = parent[key];
    if (node.IsScalar()) return std::vector<double>(dim, get<double>(source, parent, key, def));
    auto v = get<std::vector<double>>(source, parent, key, {});
    if (v.size() != dim) fail(source, node, key, "needs " + std::to_string(dim) + " entries");
    return v;
}

template <class T>
T param(const Config& cfg, const std::string& key, T def) {
    return get<T>(cfg.source, cfg.root["params"], key, def);
}

// ---- targets ----

BitVec random_subset(std::size_t n, std::size_t ones, std::size_t among, Rng& rng) {
    BitVec mask(n);
    while (mask.popcount() < ones) mask.set(rng.below(among));
    return mask;
}

Linear unit_axis(std::size_t d) {
    Features w(d, 0.0);
    w[0] = 1.0;
    return Linear{w};
}

TargetFunction make_target(const Config& cfg, Rng& rng) {
    const YAML::Node t = cfg.root["target"];
    const std::string kind = get<std::string>(cfg.source, t, "kind", "");
    const std::size_t n = cfg.dim;
    if (kind == "conjunction") {
        if (has(t, "mask")) {
            const auto bits = get<std::string>(cfg.source, t, "mask", "");
            if (bits.size() != n) fail(cfg.source, t["mask"], "mask", "needs " + std::to_string(n) + " bits");
            return Conjunction{BitVec::from_string(bits)};
        }
        const auto among = get<std::size_t>(cfg.source, t, "among", n);
        const auto literals = get<std::size_t>(cfg.source, t, "literals", std::min<std::size_t>(3, n));
        if (among > n || literals > among) fail(cfg.source, t, "literals", "needs literals <= among <= n");
        return Conjunction{random_subset(n, literals, among, rng)};
    }
    if (kind == "box") {
        if (has(t, "lo")) {
            return Box{vec_or_scalar(cfg.source, t, "lo", n, 0.0), vec_or_scalar(cfg.source, t, "hi", n, 1.0), false};
        }
        Box b{Features(n), Features(n), false};
        for (std::size_t j = 0; j < n; ++j) {
            const double width = 0.3 + 0.5 * rng.uniform();
            b.lo[j] = (1.0 - width) * rng.uniform();
            b.hi[j] = b.lo[j] + width;
        }
        return b;
    }
    if (kind == "decision_list") {
        const auto len = get<std::size_t>(cfg.source, t, "length", std::min<std::size_t>(4, n));
        if (len > n) fail(cfg.source, t, "length", "must be at most n");
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
    if (kind == "parity") {
        if (has(t, "bits")) return Parity{BitVec::from_string(get<std::string>(cfg.source, t, "bits", ""))};
        BitVec bits(n);
        for (std::size_t j = 0; j < n; ++j) bits.set(j, rng.bernoulli(0.5));
        return Parity{bits};
    }
    if (kind == "linear") {
        if (get<std::string>(cfg.source, t, "direction", "axis") == "axis") return unit_axis(n);
        std::normal_distribution<double> g;
        Features w(n);
        double norm = 0.0;
        for (auto& v : w) {
            v = g(rng);
            norm += v * v;
        }
        for (auto& v : w) v /= std::sqrt(norm);
        return Linear{w};
    }
    if (kind == "threshold") {
        const int sign = get<int>(cfg.source, t, "sign", 1);
        if (has(t, "t")) return Threshold{get<double>(cfg.source, t, "t", 0.5), sign};
        const auto range = get<std::vector<double>>(cfg.source, t, "random", {0.2, 0.8});
        const auto grid = static_cast<double>(get<std::size_t>(cfg.source, t, "grid", 200));
        if (range.size() != 2) fail(cfg.source, t["random"], "random", "needs [lo, hi]");
        return Threshold{std::round((range[0] + (range[1] - range[0]) * rng.uniform()) * grid) / grid, sign};
    }
    if (kind == "interval_union") {
        IntervalUnion u;
        if (has(t, "intervals")) {
            for (const auto& p : get<std::vector<std::vector<double>>>(cfg.source, t, "intervals", {})) {
                if (p.size() != 2) fail(cfg.source, t["intervals"], "intervals", "entries are [a, b]");
                u.intervals.emplace_back(p[0], p[1]);
            }
            return u;
        }
        const auto count = get<std::size_t>(cfg.source, t, "count", 3);
        std::vector<double> cuts(2 * count);
        for (auto& c : cuts) c = rng.uniform();
        std::sort(cuts.begin(), cuts.end());
        for (std::size_t i = 0; i < count; ++i) u.intervals.emplace_back(cuts[2 * i], cuts[2 * i + 1]);
        return u;
    }
    if (!has(cfg.root, "target")) fail(cfg.source, cfg.root, "target", "is required for " + cfg.protocol);
    fail(cfg.source, t, "target.kind",
         "unknown kind '" + kind +
             "' (conjunction, box, decision_list, parity, linear, threshold, interval_union)");
}

// ---- player distributions ----

DistributionSpec make_player(const Config& cfg, const YAML::Node& d, const TargetFunction& f, Rng& rng) {
    const std::string kind = get<std::string>(cfg.source, d, "kind", "");
    const std::size_t n = cfg.dim;
    if (kind == "uniform_boolean") return UniformBoolean{n};
    if (kind == "product_bernoulli") {
        if (has(d, "random")) {
            const auto range = get<std::vector<double>>(cfg.source, d, "random", {});
            if (range.size() != 2) fail(cfg.source, d["random"], "random", "needs [lo, hi]");
            const auto vary = get<std::size_t>(cfg.source, d, "vary", n);
            std::vector<double> p(n, 1.0);
            for (std::size_t j = 0; j < std::min(vary, n); ++j) p[j] = range[0] + (range[1] - range[0]) * rng.uniform();
            return ProductBernoulli{p};
        }
        return ProductBernoulli{vec_or_scalar(cfg.source, d, "p", n, 0.5)};
    }
    if (kind == "rule_skewed") {
        const auto* list = std::get_if<DecisionList>(&f);
        if (list == nullptr) fail(cfg.source, d, "kind", "rule_skewed needs a decision_list target");
        std::vector<double> q(n, 0.5);
        for (const auto& r : list->rules) {
            if (r.is_else()) continue;
            const double fire = 0.05 + 0.1 * rng.uniform();
            q[r.j - 1] = r.b == 1 ? fire : 1.0 - fire;
        }
        return ProductBernoulli{q};
    }
    if (kind == "uniform_sphere") return UniformSphere{n};
    if (kind == "gaussian_unit_norm") return GaussianSphericalUnitNorm{n};
    if (kind == "uniform_box") {
        return UniformBox{vec_or_scalar(cfg.source, d, "lo", n, 0.0), vec_or_scalar(cfg.source, d, "hi", n, 1.0)};
    }
    if (kind == "point_mass") {
        PointMassList pm;
        for (auto& pt : get<std::vector<Features>>(cfg.source, d, "points", {})) pm.points.push_back(std::move(pt));
        pm.probs = get<std::vector<double>>(cfg.source, d, "probs", {});
        return pm;
    }
    fail(cfg.source, d, "kind",
         "unknown distribution '" + kind +
             "' (uniform_boolean, product_bernoulli, rule_skewed, uniform_sphere, gaussian_unit_norm, "
             "uniform_box, point_mass)");
}

// ---- protocols ----

privacy::PrivacyMode privacy_mode(const Config& cfg) {
    const auto mode = get<std::string>(cfg.source, cfg.root["privacy"], "mode", "differential");
    if (mode == "none") return privacy::PrivacyMode::None;
    if (mode == "differential") return privacy::PrivacyMode::Differential;
    if (mode == "distributional") return privacy::PrivacyMode::Distributional;
    fail(cfg.source, cfg.root["privacy"], "privacy.mode", "must be none, differential or distributional");
}

double privacy_value(const Config& cfg, const std::string& key, double def) {
    return get<double>(cfg.source, cfg.root["privacy"], key, def);
}

std::vector<Hypothesis> threshold_hypotheses(const Config& cfg) {
    return agnostic::threshold_class(param<std::size_t>(cfg, "points", 201));
}

baseline::BatchLearner center_learner(const Config& cfg, const TargetFunction& f) {
    if (std::holds_alternative<Conjunction>(f)) {
        return [](const Sample& s) { return closed::smallest_consistent(s, closed::ClassKind::Conjunction); };
    }
    if (std::holds_alternative<Box>(f)) {
        return [](const Sample& s) { return closed::smallest_consistent(s, closed::ClassKind::Box); };
    }
    if (std::holds_alternative<DecisionList>(f)) return [](const Sample& s) { return Hypothesis{declist::learn_consistent(s)}; };
    if (std::holds_alternative<Parity>(f)) return [](const Sample& s) { return Hypothesis{parity::parity_proper_learn(s)}; };
    if (std::holds_alternative<Threshold>(f)) return baseline::finite_class_erm(threshold_hypotheses(cfg));
    throw ConfigurationError(cfg.source + ": sample shipping has no center learner for this target class");
}

using Runner = std::function<ProtocolResult(const Config&, const Instance&, const RunOptions&)>;

struct Entry {
    ProtocolInfo info;
    Runner run;
};

const std::vector<Entry>& registry() {
    static const std::vector<Entry> entries = [] {
        std::vector<Entry> e;
        e.push_back({{"baseline/shipping", "every player ships its sample; the center learns on the union"},
                     [](const Config& cfg, const Instance& in, const RunOptions& o) {
                         baseline::ShippingParams p;
                         p.epsilon = cfg.epsilon;
                         p.delta = cfg.delta;
                         p.agnostic = param<bool>(cfg, "agnostic", false);
                         p.c = param<double>(cfg, "c", p.c);
                         p.vc_dimension = param<std::size_t>(cfg, "vc_dimension", 0);
                         p.label_noise = param<double>(cfg, "label_noise", 0.0);
                         p.learner = center_learner(cfg, in.target);
                         return baseline::sample_shipping(in.players, in.target, p, o);
                     }});
        e.push_back({{"baseline/mistake_bound", "counterexamples to a shared online learner (conjunction or threshold)"},
                     [](const Config& cfg, const Instance& in, const RunOptions& o) {
                         baseline::MistakeBoundParams p;
                         p.sample_size = param<std::size_t>(cfg, "sample_size", p.sample_size);
                         p.mistake_cap = param<std::size_t>(cfg, "mistake_cap", 0);
                         if (std::holds_alternative<Conjunction>(in.target)) {
                             return baseline::eq_mistake_bound(in.players, in.target,
                                                               baseline::ConjunctionEliminationLearner(cfg.dim), p, o);
                         }
                         if (std::holds_alternative<Threshold>(in.target)) {
                             return baseline::eq_mistake_bound(in.players, in.target,
                                                               baseline::HalvingLearner(threshold_hypotheses(cfg)), p, o);
                         }
                         throw ConfigurationError(cfg.source + ": mistake_bound supports conjunction and threshold targets");
                     }});
        auto closed_runner = [](closed::ClassKind kind) {
            return [kind](const Config& cfg, const Instance& in, const RunOptions& o) {
                closed::ClosedParams p;
                p.epsilon = cfg.epsilon;
                p.delta = cfg.delta;
                p.kind = kind;
                p.c = param<double>(cfg, "c", p.c);
                p.sample_size = param<std::size_t>(cfg, "sample_size", 0);
                return closed::run_intersection_closed(in.players, in.target, p, o);
            };
        };
        e.push_back({{"closed/conjunction", "one round, smallest consistent conjunctions, closure at the center"},
                     closed_runner(closed::ClassKind::Conjunction)});
        e.push_back({{"closed/box", "one round, smallest consistent boxes, closure at the center"},
                     closed_runner(closed::ClassKind::Box)});
        e.push_back({{"parity/two_player", "k = 2, each player sends one parity"},
                     [](const Config& cfg, const Instance& in, const RunOptions& o) {
                         parity::ParityParams p;
                         p.epsilon = cfg.epsilon;
                         p.delta = cfg.delta;
                         p.c = param<double>(cfg, "c", p.c);
                         p.sample_size = param<std::size_t>(cfg, "sample_size", 0);
                         return parity::run_parity_two_player(in.players, in.target, p, o);
                     }});
        e.push_back({{"declist/triplets", "decision lists by triplet broadcast through a center"},
                     [](const Config& cfg, const Instance& in, const RunOptions& o) {
                         declist::DecisionListParams p;
                         p.epsilon = cfg.epsilon;
                         p.delta = cfg.delta;
                         p.c = param<double>(cfg, "c", p.c);
                         p.sample_size = param<std::size_t>(cfg, "sample_size", 0);
                         return declist::run_decision_list(in.players, in.target, p, o);
                     }});
        e.push_back({{"declist/private", "triplet protocol with noisy statistical-query consistency tests"},
                     [](const Config& cfg, const Instance& in, const RunOptions& o) {
                         privacy::PrivateDecisionListParams p;
                         p.epsilon = cfg.epsilon;
                         p.delta = privacy_value(cfg, "delta", cfg.delta);
                         p.mode = privacy_mode(cfg);
                         p.alpha = privacy_value(cfg, "alpha", p.alpha);
                         p.theta = param<double>(cfg, "theta", 0.0);
                         p.max_rounds = param<std::size_t>(cfg, "max_rounds", 0);
                         p.sample_size = param<std::size_t>(cfg, "sample_size", 0);
                         return privacy::run_private_decision_list(in.players, in.target, p, o);
                     }});
        e.push_back({{"linear/averaging", "one round: players send averaged label * x / |x|"},
                     [](const Config& cfg, const Instance& in, const RunOptions& o) {
                         linear::AveragingParams p;
                         p.epsilon = cfg.epsilon;
                         p.c = param<double>(cfg, "c", p.c);
                         p.sample_size = param<std::size_t>(cfg, "sample_size", 0);
                         return linear::averaging_protocol(in.players, in.target, p, o);
                     }});
        e.push_back({{"linear/round_robin", "margin perceptron passed around the ring (params.data: well_spread for generated data)"},
                     [](const Config& cfg, const Instance& in, const RunOptions& o) {
                         linear::RoundRobinParams p;
                         const auto rule = param<std::string>(cfg, "rule", "well_spread");
                         if (rule == "well_spread") {
                             p.rule = linear::StopRule::WellSpread;
                         } else if (rule == "non_concentrated") {
                             p.rule = linear::StopRule::NonConcentrated;
                         } else if (rule == "until_consistent") {
                             p.rule = linear::StopRule::UntilConsistent;
                         } else {
                             fail(cfg.source, cfg.root["params"], "params.rule",
                                  "must be well_spread, non_concentrated or until_consistent");
                         }
                         p.epsilon = cfg.epsilon;
                         p.alpha = param<double>(cfg, "alpha", p.alpha);
                         p.c_prime = param<double>(cfg, "c_prime", p.c_prime);
                         p.sample_size = param<std::size_t>(cfg, "sample_size", p.sample_size);
                         p.update_cap = param<std::uint64_t>(cfg, "update_cap", 0);
                         p.max_meta_rounds = param<std::size_t>(cfg, "max_meta_rounds", p.max_meta_rounds);
                         if (param<std::string>(cfg, "data", "") == "well_spread") {
                             const auto data = linear::well_spread_dataset(
                                 cfg.k, param<std::size_t>(cfg, "per_player", 100), p.alpha,
                                 param<double>(cfg, "gamma", 0.2), o.seed);
                             return linear::round_robin_perceptron(data, unit_axis(data[0].dim()), p, o);
                         }
                         return linear::round_robin_perceptron(in.players, in.target, p, o);
                     }});
        e.push_back({{kAppendixC, "fixed two-player instance forcing Theta(1/gamma^2) rounds (params.gammas)"}, nullptr});
        e.push_back({{"boosting/distributed", "AdaBoost with a fixed vote weight and stump weak learner"},
                     [](const Config& cfg, const Instance& in, const RunOptions& o) {
                         boosting::BoostingParams p;
                         p.epsilon = cfg.epsilon;
                         p.delta = cfg.delta;
                         p.beta = param<double>(cfg, "beta", p.beta);
                         const auto q = param<std::string>(cfg, "q", "8");
                         if (q == "inf") {
                             p.q.reset();
                         } else {
                             p.q = param<unsigned>(cfg, "q", 8);
                         }
                         p.c_w = param<double>(cfg, "c_w", p.c_w);
                         p.c_local = param<double>(cfg, "c_local", p.c_local);
                         p.local_sample_size = param<std::size_t>(cfg, "local_sample_size", 0);
                         p.early_stop = param<bool>(cfg, "early_stop", true);
                         auto run = boosting::run_distributed_boosting(in.players, in.target,
                                                                       boosting::stump_learner(cfg.dim), p, o);
                         std::size_t violations = 0;
                         for (const auto& t : run.rounds) violations += t.training_error > t.bound + 1e-12 ? 1 : 0;
                         run.result.stats["bound_violations"] = static_cast<double>(violations);
                         return run.result;
                     }});
        auto halving_params = [](const Config& cfg) {
            agnostic::HalvingParams p;
            p.epsilon = cfg.epsilon;
            p.delta = cfg.delta;
            p.opt_guess = param<double>(cfg, "opt_guess", 0.0);
            p.label_noise = param<double>(cfg, "label_noise", 0.0);
            p.c_s = param<double>(cfg, "c_s", p.c_s);
            p.c_N = param<double>(cfg, "c_N", p.c_N);
            p.n_min = param<std::size_t>(cfg, "n_min", p.n_min);
            p.c_L = param<double>(cfg, "c_L", p.c_L);
            p.shared_randomness = param<bool>(cfg, "shared_randomness", false);
            return p;
        };
        e.push_back({{"agnostic/halving", "robust halving over a threshold grid at a fixed opt guess"},
                     [halving_params](const Config& cfg, const Instance& in, const RunOptions& o) {
                         return agnostic::run_robust_halving(in.players, in.target, threshold_hypotheses(cfg),
                                                             halving_params(cfg), o);
                     }});
        e.push_back({{"agnostic/opt_search", "robust halving with doubling search over the opt guess"},
                     [halving_params](const Config& cfg, const Instance& in, const RunOptions& o) {
                         agnostic::OptSearchParams p;
                         p.halving = halving_params(cfg);
                         p.c_v = param<double>(cfg, "c_v", p.c_v);
                         p.C = param<double>(cfg, "C", p.C);
                         return agnostic::opt_search(in.players, in.target, threshold_hypotheses(cfg), p, o);
                     }});
        e.push_back({{"agnostic/interval", "one-round summaries for unions of d intervals (params.intervals)"},
                     [](const Config& cfg, const Instance& in, const RunOptions& o) {
                         agnostic::IntervalParams p;
                         p.d = param<std::size_t>(cfg, "intervals", p.d);
                         p.epsilon = cfg.epsilon;
                         p.delta = cfg.delta;
                         p.label_noise = param<double>(cfg, "label_noise", 0.0);
                         p.sample_size = param<std::size_t>(cfg, "sample_size", 0);
                         return agnostic::run_interval_summary(in.players, in.target, p, o);
                     }});
        e.push_back({{"privacy/conjunction", "private conjunctions from noisy statistical queries"},
                     [](const Config& cfg, const Instance& in, const RunOptions& o) {
                         privacy::PrivateConjunctionParams p;
                         p.epsilon = cfg.epsilon;
                         p.delta = privacy_value(cfg, "delta", cfg.delta);
                         p.mode = privacy_mode(cfg);
                         p.alpha = privacy_value(cfg, "alpha", p.alpha);
                         p.c_p = privacy_value(cfg, "c_p", 0.0);
                         p.sample_size = param<std::size_t>(cfg, "sample_size", 0);
                         return privacy::private_conjunction_protocol(in.players, in.target, p, o);
                     }});
        return e;
    }();
    return entries;
}

const Entry& lookup(const Config& cfg) {
    for (const auto& e : registry()) {
        if (e.info.name == cfg.protocol) return e;
    }
    std::string names;
    for (const auto& e : registry()) names += (names.empty() ? "" : ", ") + e.info.name;
    fail(cfg.source, cfg.root["protocol"], "protocol", "unknown protocol '" + cfg.protocol + "'; valid names: " + names);
}

bool needs_dim(const Config& cfg) {
    if (cfg.protocol == kAppendixC) return false;
    return !(cfg.protocol == "linear/round_robin" && param<std::string>(cfg, "data", "") == "well_spread");
}

RunOptions run_options(const Config& cfg, std::uint64_t seed) {
    RunOptions o;
    o.seed = seed;
    o.m_eval = cfg.m_eval;
    o.precision_bits = cfg.precision_bits;
    return o;
}

// ---- output ----

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

std::string gamma_label(double g) {
    std::ostringstream s;
    s << g;
    return s.str();
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    if (n == 0) return 0.0;
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// Nearest rank.
double p90(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    if (v.empty()) return 0.0;
    const auto rank = static_cast<std::size_t>(std::ceil(0.9 * static_cast<double>(v.size())));
    return v[std::max<std::size_t>(rank, 1) - 1];
}

struct Row {
    std::string protocol;
    std::uint64_t seed = 0;
    CostLedger ledger;
    ErrorReport errors;
    double wall_ms = 0.0;
    std::map<std::string, double> stats;
};

std::string target_class(const Config& cfg) {
    if (cfg.protocol == kAppendixC) return "appendix_c";
    if (!needs_dim(cfg)) return "linear";
    return get<std::string>(cfg.source, cfg.root["target"], "kind", "");
}

} // namespace

std::vector<std::uint64_t> parse_seed_range(const std::string& text) {
    const auto dots = text.find("..");
    try {
        if (dots == std::string::npos) return {std::stoull(text)};
        const std::uint64_t a = std::stoull(text.substr(0, dots));
        const std::uint64_t b = std::stoull(text.substr(dots + 2));
        if (b < a) throw ConfigurationError("seed range '" + text + "' is empty");
        std::vector<std::uint64_t> out;
        for (std::uint64_t s = a; s <= b; ++s) out.push_back(s);
        return out;
    } catch (const std::logic_error&) {
        throw ConfigurationError("seed range '" + text + "' is not of the form a..b");
    }
}

Config parse_config(const std::string& text, const std::string& source) {
    Config cfg;
    cfg.source = source;
    try {
        cfg.root = YAML::Load(text);
    } catch (const YAML::ParserException& e) {
        throw ConfigurationError(source + ":" + std::to_string(e.mark.line + 1) + ": " + e.msg);
    }
    const YAML::Node& r = cfg.root;
    if (!r.IsMap()) throw ConfigurationError(source + ": config must be a mapping");
    cfg.protocol = need<std::string>(source, r, "protocol");
    lookup(cfg);

    if (has(r, "n") && has(r, "d")) fail(source, r["d"], "d", "give n or d, not both");
    cfg.dim = has(r, "n") ? get<std::size_t>(source, r, "n", 0) : get<std::size_t>(source, r, "d", 0);
    if (needs_dim(cfg) && cfg.dim == 0) fail(source, r, "n", "class dimension n (or d) is required and positive");

    cfg.k = get<std::size_t>(source, r, "k", cfg.protocol == kAppendixC ? 2 : 1);
    if (cfg.k == 0) fail(source, r["k"], "k", "must be at least 1");
    if (cfg.protocol == kAppendixC && cfg.k != 2) fail(source, r["k"], "k", "the lower-bound instance has k = 2");

    cfg.epsilon = get<double>(source, r, "epsilon", 0.1);
    if (!(cfg.epsilon > 0.0 && cfg.epsilon < 1.0)) fail(source, r["epsilon"], "epsilon", "ε must be in (0,1)");
    cfg.delta = get<double>(source, r, "delta", 0.05);
    if (!(cfg.delta > 0.0 && cfg.delta < 1.0)) fail(source, r["delta"], "delta", "δ must be in (0,1)");

    if (!has(r, "seeds")) {
        cfg.seeds = {0};
    } else if (r["seeds"].IsSequence()) {
        cfg.seeds = get<std::vector<std::uint64_t>>(source, r, "seeds", {});
    } else {
        const auto s = get<std::string>(source, r, "seeds", "");
        if (s.find("..") != std::string::npos) {
            try {
                cfg.seeds = parse_seed_range(s);
            } catch (const ConfigurationError& e) {
                fail(source, r["seeds"], "seeds", e.what());
            }
        } else {
            const auto count = get<std::uint64_t>(source, r, "seeds", 1);
            for (std::uint64_t i = 0; i < count; ++i) cfg.seeds.push_back(i);
        }
    }
    if (cfg.seeds.empty()) fail(source, r["seeds"], "seeds", "no seeds to run");

    cfg.output = get<std::string>(source, r, "output", "");
    cfg.m_eval = get<std::size_t>(source, r, "m_eval", cfg.m_eval);
    cfg.precision_bits = get<unsigned>(source, r, "precision_bits", cfg.precision_bits);

    if (has(r, "players")) {
        if (!r["players"].IsSequence() || r["players"].size() != cfg.k) {
            fail(source, r["players"], "players", "needs exactly k = " + std::to_string(cfg.k) + " entries");
        }
    }
    if (needs_dim(cfg) && !has(r, "players") && !has(r, "distribution")) {
        fail(source, r, "distribution", "give distribution or players");
    }
    if (has(r, "privacy")) privacy_mode(cfg);
    return cfg;
}

Config load_config(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigurationError("cannot read config " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), path.string());
}

const std::vector<ProtocolInfo>& protocols() {
    static const std::vector<ProtocolInfo> infos = [] {
        std::vector<ProtocolInfo> out;
        for (const auto& e : registry()) out.push_back(e.info);
        return out;
    }();
    return infos;
}

Instance make_instance(const Config& cfg, std::uint64_t seed) {
    Rng rng = Rng::stream(seed, "instance");
    Instance in{{}, make_target(cfg, rng)};
    const YAML::Node& r = cfg.root;
    for (std::size_t i = 0; i < cfg.k; ++i) {
        const YAML::Node d = has(r, "players") ? r["players"][i] : r["distribution"];
        in.players.push_back(make_player(cfg, d, in.target, rng));
    }
    return in;
}

ProtocolResult run_protocol(const Config& cfg, std::uint64_t seed) {
    const Entry& e = lookup(cfg);
    if (!e.run) throw ConfigurationError(cfg.protocol + " has no per-seed result; use run_config");
    const RunOptions o = run_options(cfg, seed);
    if (!needs_dim(cfg)) return e.run(cfg, Instance{{}, Linear{}}, o);
    return e.run(cfg, make_instance(cfg, seed), o);
}

fs::path default_output(const Config& cfg) {
    if (!cfg.output.empty()) return cfg.output;
    const std::string stem = fs::path(cfg.source).stem().string();
    const char* root = std::getenv("DPAC_OUT_ROOT");
    return fs::path(root != nullptr && *root != '\0' ? root : "runs") / (stem.empty() ? "run" : stem);
}

RunReport run_config(const Config& cfg, const RunSettings& settings, std::ostream& err) {
    RunReport report;
    report.out = settings.out.empty() ? default_output(cfg) : settings.out;
    fs::create_directories(report.out);

    std::vector<Row> rows;
    ordered_json failures = ordered_json::array();
    ordered_json extra = ordered_json::object();
    using clock = std::chrono::steady_clock;

    if (cfg.protocol == kAppendixC) {
        const auto gammas = param<std::vector<double>>(cfg, "gammas", {0.1});
        const auto max_rounds = param<std::uint64_t>(cfg, "max_rounds", 1000000);
        std::vector<double> rounds;
        for (std::uint64_t seed : cfg.seeds) {
            for (double g : gammas) {
                const auto start = clock::now();
                const auto run = linear::appendix_c_lower_bound(g, max_rounds);
                const double ms = std::chrono::duration<double, std::milli>(clock::now() - start).count();
                rows.push_back({std::string(kAppendixC) + "[gamma=" + gamma_label(g) + "]", seed, run.result.ledger,
                                run.result.errors, settings.timing ? ms : 0.0, run.result.stats});
                if (seed != cfg.seeds.front()) continue;
                rounds.push_back(static_cast<double>(run.rounds));
                const fs::path file =
                    report.out / (gammas.size() == 1 ? "trace.csv" : "trace_gamma_" + gamma_label(g) + ".csv");
                std::ofstream tf(file);
                linear::write_trace_csv(tf, run.trace);
            }
        }
        ordered_json per_gamma = ordered_json::object();
        for (std::size_t i = 0; i < gammas.size(); ++i) per_gamma[gamma_label(gammas[i])] = rounds[i];
        extra["rounds_by_gamma"] = per_gamma;
        if (rounds.size() >= 2) extra["rounds_ratio"] = rounds.back() / rounds.front();
    } else {
        const Entry& e = lookup(cfg);
        for (std::uint64_t seed : cfg.seeds) {
            const auto start = clock::now();
            try {
                const ProtocolResult r = run_protocol(cfg, seed);
                const double ms = std::chrono::duration<double, std::milli>(clock::now() - start).count();
                rows.push_back({e.info.name, seed, r.ledger, r.errors, settings.timing ? ms : 0.0, r.stats});
            } catch (const ConfigurationError&) {
                throw;
            } catch (const Error& ex) {
                err << cfg.source << ": seed " << seed << ": " << ex.what() << "\n";
                failures.push_back({{"seed", seed}, {"error", ex.what()}});
            }
        }
    }

    {
        std::ofstream csv(report.out / "results.csv");
        csv << "protocol,seed,bits,examples,hypotheses,rounds,meta_rounds,error_mixture";
        for (std::size_t i = 0; i < cfg.k; ++i) csv << ",error_player_" << i;
        csv << ",wall_ms\n";
        for (const auto& row : rows) {
            csv << row.protocol << "," << row.seed << "," << row.ledger.bits << "," << row.ledger.examples << ","
                << row.ledger.hypotheses << "," << row.ledger.rounds << "," << row.ledger.meta_rounds << ","
                << fmt(row.errors.mixture);
            for (std::size_t i = 0; i < cfg.k; ++i) {
                csv << "," << (i < row.errors.per_player.size() ? fmt(row.errors.per_player[i]) : "");
            }
            csv << "," << fmt(row.wall_ms) << "\n";
        }
    }

    auto column = [&](auto pick) {
        std::vector<double> v;
        for (const auto& row : rows) v.push_back(pick(row));
        return v;
    };
    const std::vector<std::pair<std::string, std::vector<double>>> metrics{
        {"bits", column([](const Row& r) { return static_cast<double>(r.ledger.bits); })},
        {"examples", column([](const Row& r) { return static_cast<double>(r.ledger.examples); })},
        {"hypotheses", column([](const Row& r) { return static_cast<double>(r.ledger.hypotheses); })},
        {"rounds", column([](const Row& r) { return static_cast<double>(r.ledger.rounds); })},
        {"meta_rounds", column([](const Row& r) { return static_cast<double>(r.ledger.meta_rounds); })},
        {"error_mixture", column([](const Row& r) { return r.errors.mixture; })},
    };
    ordered_json summary;
    summary["protocol"] = cfg.protocol;
    summary["class"] = target_class(cfg);
    summary["dim"] = cfg.dim;
    summary["k"] = cfg.k;
    summary["epsilon"] = cfg.epsilon;
    summary["delta"] = cfg.delta;
    summary["runs"] = rows.size();
    summary["failures"] = failures;
    for (const char* which : {"median", "p90"}) {
        ordered_json block = ordered_json::object();
        for (const auto& [name, v] : metrics) block[name] = std::string(which) == "median" ? median(v) : p90(v);
        summary[which] = block;
    }
    std::map<std::string, std::vector<double>> stats;
    for (const auto& row : rows) {
        for (const auto& [key, v] : row.stats) stats[key].push_back(v);
    }
    ordered_json stat_medians = ordered_json::object();
    for (const auto& [key, v] : stats) stat_medians[key] = median(v);
    summary["stats_median"] = stat_medians;
    if (!extra.empty()) summary["extra"] = extra;
    std::ofstream(report.out / "summary.json") << summary.dump(2) << "\n";

    report.rows = rows.size();
    report.failures = failures.size();
    return report;
}

Comparison compare_runs(const fs::path& a, const fs::path& b) {
    auto load = [](const fs::path& dir) {
        std::ifstream in(dir / "summary.json");
        if (!in) throw ConfigurationError("no summary.json in " + dir.string());
        return nlohmann::json::parse(in);
    };
    const auto ja = load(a);
    const auto jb = load(b);
    for (const char* key : {"class", "dim", "k"}) {
        if (ja.at(key) != jb.at(key)) {
            throw ConfigurationError(std::string("comparison refused: '") + key + "' differs (" + ja.at(key).dump() +
                                     " vs " + jb.at(key).dump() + ")");
        }
    }
    Comparison c;
    for (const char* cur : {"bits", "examples", "hypotheses", "rounds"}) {
        const double x = ja.at("median").at(cur).get<double>();
        const double y = jb.at("median").at(cur).get<double>();
        c.currencies.push_back(cur);
        c.a.push_back(x);
        c.b.push_back(y);
        c.ratio.push_back(x == y ? 1.0 : x / y);
    }
    return c;
}

void print_comparison(std::ostream& out, const Comparison& c) {
    out << "currency,median_a,median_b,ratio\n";
    for (std::size_t i = 0; i < c.currencies.size(); ++i) {
        out << c.currencies[i] << "," << fmt(c.a[i]) << "," << fmt(c.b[i]) << "," << fmt(c.ratio[i]) << "\n";
    }
}

} // namespace dpac::experiment
