#include "dpac/hypothesis.hpp"

#include <bit>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "dpac/errors.hpp"

namespace dpac {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

int classify_conjunction(const Conjunction& c, std::span<const double> x) {
    for (std::size_t j = 0; j < c.mask.size(); ++j) {
        if (c.mask.get(j) && x[j] != 1.0) return -1;
    }
    return 1;
}

int classify_box(const Box& b, std::span<const double> x) {
    if (b.empty) return -1;
    for (std::size_t i = 0; i < b.lo.size(); ++i) {
        if (x[i] < b.lo[i] || x[i] > b.hi[i]) return -1;
    }
    return 1;
}

int classify_list(const DecisionList& l, std::span<const double> x) {
    for (const auto& r : l.rules) {
        if (r.fires(x)) return to_label(r.c == 1);
    }
    return -1;
}

int classify_linear(const Linear& l, std::span<const double> x) {
    double s = 0.0;
    for (std::size_t i = 0; i < l.w.size(); ++i) s += l.w[i] * x[i];
    return s >= 0.0 ? 1 : -1;
}

int classify_parity(const Parity& p, std::span<const double> x) {
    bool acc = false;
    for (std::size_t j = 0; j < p.bits.size(); ++j) {
        if (p.bits.get(j) && x[j] == 1.0) acc = !acc;
    }
    return to_label(acc);
}

int classify_threshold(const Threshold& t, std::span<const double> x) {
    return x[0] >= t.t ? t.sign : -t.sign;
}

int classify_intervals(const IntervalUnion& u, std::span<const double> x) {
    for (const auto& [a, b] : u.intervals) {
        if (x[0] >= a && x[0] <= b) return 1;
    }
    return -1;
}

std::string fmt_double(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

std::string fmt_vector(const Features& v) {
    std::string s = "(";
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i != 0) s += ",";
        s += fmt_double(v[i]);
    }
    return s + ")";
}

std::string fmt_rules(const std::vector<Rule>& rules) {
    std::string s;
    for (const auto& r : rules) {
        s += "(" + std::to_string(r.j) + "," + (r.is_else() ? std::string("*") : std::to_string(r.b)) +
             "," + std::to_string(r.c) + ")";
    }
    return s;
}

std::string fmt_intervals(const IntervalUnion& u) {
    std::string s;
    for (const auto& [a, b] : u.intervals) s += "[" + fmt_double(a) + "," + fmt_double(b) + "]";
    return s;
}

} // namespace

std::size_t rule_bits(std::size_t n) noexcept {
    // ceil(log2(n+1)) == bit_width(n) for n >= 1
    return static_cast<std::size_t>(std::bit_width(n)) + 2;
}

int classify(const TargetFunction& f, std::span<const double> x) {
    return std::visit(overloaded{
                          [&](const Conjunction& c) { return classify_conjunction(c, x); },
                          [&](const Box& b) { return classify_box(b, x); },
                          [&](const DecisionList& l) { return classify_list(l, x); },
                          [&](const Linear& l) { return classify_linear(l, x); },
                          [&](const Parity& p) { return classify_parity(p, x); },
                          [&](const Threshold& t) { return classify_threshold(t, x); },
                          [&](const IntervalUnion& u) { return classify_intervals(u, x); },
                      },
                      f);
}

int classify(const Hypothesis& h, std::span<const double> x) {
    return std::visit(
        overloaded{
            [&](const Conjunction& c) { return classify_conjunction(c, x); },
            [&](const Box& b) { return classify_box(b, x); },
            [&](const DecisionList& l) { return classify_list(l, x); },
            [&](const Linear& l) { return classify_linear(l, x); },
            [&](const Parity& p) { return classify_parity(p, x); },
            [&](const ParityNonProper& p) {
                if (auto bit = p.basis.predict(BitVec::from_features(x))) return to_label(*bit);
                return p.fallback ? classify(*p.fallback, x) : -1;
            },
            [&](const WeightedMajority& m) {
                double s = 0.0;
                for (std::size_t t = 0; t < m.members.size(); ++t) s += m.weights[t] * classify(m.members[t], x);
                return s >= 0.0 ? 1 : -1;
            },
            [&](const MajorityOfSet& m) {
                long s = 0;
                for (const auto& member : m.members) s += classify(member, x);
                return s >= 0 ? 1 : -1;
            },
            [&](const Stump& st) { return (x[st.j] == 1.0) == (st.b == 1) ? st.label : -st.label; },
            [&](const Threshold& t) { return classify_threshold(t, x); },
            [&](const IntervalUnion& u) { return classify_intervals(u, x); },
            [&](const Constant& c) { return c.label; },
        },
        h.rep);
}

Hypothesis to_hypothesis(const TargetFunction& f) {
    return std::visit([](const auto& concept_rep) { return Hypothesis(concept_rep); }, f);
}

std::size_t dimension(const TargetFunction& f) {
    return std::visit(overloaded{
                          [](const Conjunction& c) { return c.mask.size(); },
                          [](const Box& b) { return b.lo.size(); },
                          [](const DecisionList& l) { return l.n; },
                          [](const Linear& l) { return l.w.size(); },
                          [](const Parity& p) { return p.bits.size(); },
                          [](const Threshold&) { return std::size_t{1}; },
                          [](const IntervalUnion&) { return std::size_t{1}; },
                      },
                      f);
}

void validate(const TargetFunction& f) {
    std::visit(overloaded{
                   [](const Conjunction&) {},
                   [](const Box& b) {
                       if (b.lo.size() != b.hi.size()) throw ConfigurationError("box bounds differ in length");
                   },
                   [](const DecisionList& l) {
                       std::size_t elses = 0;
                       for (const auto& r : l.rules) {
                           if (r.j > l.n) throw ConfigurationError("decision-list rule variable out of range");
                           if (r.is_else()) ++elses;
                       }
                       if (l.rules.empty() || elses != 1 || !l.rules.back().is_else()) {
                           throw ConfigurationError("decision list must end with exactly one else-rule");
                       }
                   },
                   [](const Linear& l) {
                       double n2 = 0.0;
                       for (double v : l.w) n2 += v * v;
                       if (std::abs(std::sqrt(n2) - 1.0) > 1e-9) {
                           throw ConfigurationError("homogeneous linear target must have unit norm");
                       }
                   },
                   [](const Parity&) {},
                   [](const Threshold& t) {
                       if (t.sign != 1 && t.sign != -1) throw ConfigurationError("threshold sign must be +1 or -1");
                   },
                   [](const IntervalUnion& u) {
                       for (const auto& [a, b] : u.intervals) {
                           if (a > b) throw ConfigurationError("interval with lo > hi");
                       }
                   },
               },
               f);
}

std::size_t encoded_bits(const Hypothesis& h, unsigned precision_bits) {
    const std::size_t p = precision_bits;
    return std::visit(
        overloaded{
            [&](const Conjunction& c) { return std::max<std::size_t>(c.mask.size(), 1); },
            [&](const Box& b) { return 2 * b.lo.size() * p + 1; },
            [&](const DecisionList& l) { return std::max<std::size_t>(l.rules.size() * rule_bits(l.n), 1); },
            [&](const Linear& l) { return l.w.size() * p + 1; },
            [&](const Parity& par) { return std::max<std::size_t>(par.bits.size(), 1); },
            [&](const ParityNonProper& par) {
                const std::size_t fb = par.fallback ? encoded_bits(*par.fallback, precision_bits) : 1;
                return par.basis.rank() * (par.basis.dimension() + 1) + fb;
            },
            [&](const WeightedMajority& m) {
                std::size_t s = 1;
                for (const auto& member : m.members) s += encoded_bits(member, precision_bits) + p;
                return s;
            },
            [&](const MajorityOfSet& m) {
                std::size_t s = 1;
                for (const auto& member : m.members) s += encoded_bits(member, precision_bits);
                return s;
            },
            [&](const Stump& st) { return rule_bits(std::max<std::size_t>(st.n, 1)); },
            [&](const Threshold&) { return p + 1; },
            [&](const IntervalUnion& u) { return 2 * u.intervals.size() * p + 1; },
            [&](const Constant&) { return std::size_t{1}; },
        },
        h.rep);
}

std::string describe(const Hypothesis& h) {
    return std::visit(
        overloaded{
            [](const Conjunction& c) { return "conj:" + c.mask.to_string(); },
            [](const Box& b) {
                return b.empty ? std::string("box:empty") : "box:" + fmt_vector(b.lo) + fmt_vector(b.hi);
            },
            [](const DecisionList& l) { return "dl[" + std::to_string(l.n) + "]:" + fmt_rules(l.rules); },
            [](const Linear& l) { return "lin:" + fmt_vector(l.w); },
            [](const Parity& p) { return "par:" + p.bits.to_string(); },
            [](const ParityNonProper& p) {
                std::string s = "parnp:{";
                for (std::size_t r = 0; r < p.basis.rank(); ++r) {
                    s += p.basis.rows()[r].to_string() + "=" + (p.basis.labels()[r] ? "1" : "0") + ";";
                }
                return s + "}|" + (p.fallback ? describe(*p.fallback) : std::string("none"));
            },
            [](const WeightedMajority& m) {
                std::string s = "wmaj:{";
                for (std::size_t t = 0; t < m.members.size(); ++t) {
                    s += fmt_double(m.weights[t]) + "*" + describe(m.members[t]) + ";";
                }
                return s + "}";
            },
            [](const MajorityOfSet& m) {
                std::string s = "maj:{";
                for (const auto& member : m.members) s += describe(member) + ";";
                return s + "}";
            },
            [](const Stump& st) {
                return "stump:" + std::to_string(st.j) + "," + std::to_string(st.b) + "," +
                       std::to_string(st.label);
            },
            [](const Threshold& t) { return "thr:" + fmt_double(t.t) + "," + std::to_string(t.sign); },
            [](const IntervalUnion& u) { return "ivl:" + fmt_intervals(u); },
            [](const Constant& c) { return "const:" + std::to_string(c.label); },
        },
        h.rep);
}

std::string describe(const TargetFunction& f) { return describe(to_hypothesis(f)); }

bool operator==(const Hypothesis& a, const Hypothesis& b) { return describe(a) == describe(b); }

std::size_t alternations(const DecisionList& list) {
    std::size_t alt = 0;
    for (std::size_t i = 1; i < list.rules.size(); ++i) {
        if (list.rules[i].c != list.rules[i - 1].c) ++alt;
    }
    return alt;
}

} // namespace dpac
