#pragma once
#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "dpac/bitvec.hpp"
#include "dpac/gf2.hpp"

namespace dpac {

using Features = std::vector<double>;

// Labels are +1 / -1 everywhere; boolean concepts answer +1 for "true".
inline int to_label(bool b) noexcept { return b ? 1 : -1; }
inline bool to_bit(int label) noexcept { return label > 0; }

// "if x_j = b then c". Variables are 1-based; j = 0 is the else-rule, whose b
// is ignored. b and c are bits.
struct Rule {
    std::size_t j = 0;
    int b = 0;
    int c = 0;

    bool is_else() const noexcept { return j == 0; }
    bool fires(std::span<const double> x) const noexcept {
        return j == 0 || (x[j - 1] == 1.0) == (b == 1);
    }
    friend auto operator<=>(const Rule&, const Rule&) = default;
};

// ceil(log2(n+1)) + 2
std::size_t rule_bits(std::size_t n) noexcept;

// ---- concept representations shared by targets and hypotheses ----

// Monotone conjunction: +1 iff x_j = 1 for every j in mask.
struct Conjunction {
    BitVec mask;
};

// Closed axis-aligned box; `empty` classifies everything -1.
struct Box {
    Features lo;
    Features hi;
    bool empty = false;
};

struct DecisionList {
    std::size_t n = 0;
    std::vector<Rule> rules;
};

// Homogeneous separator: +1 iff w.x >= 0.
struct Linear {
    Features w;
};

// +1 iff <bits, x> = 1 over GF(2).
struct Parity {
    BitVec bits;
};

// One-dimensional threshold: `sign` when x >= t, else -sign.
struct Threshold {
    double t = 0.0;
    int sign = 1;
};

// +1 inside any closed interval [a, b].
struct IntervalUnion {
    std::vector<std::pair<double, double>> intervals;
};

using TargetFunction =
    std::variant<Conjunction, Box, DecisionList, Linear, Parity, Threshold, IntervalUnion>;

// ---- hypothesis-only representations ----

struct Hypothesis;

// Reliable-useful predictor backed by a proper fallback (never transmitted).
struct ParityNonProper {
    GF2Basis basis;
    std::shared_ptr<const Hypothesis> fallback;
};

// sign(sum_t weights[t] * members[t](x)); ties go to +1.
struct WeightedMajority {
    std::vector<Hypothesis> members;
    std::vector<double> weights;
};

// Unweighted vote; ties go to +1.
struct MajorityOfSet {
    std::vector<Hypothesis> members;
};

// Decision stump over boolean features: `label` when x_j = b, else -label.
// j is 0-based here.
struct Stump {
    std::size_t n = 0;
    std::size_t j = 0;
    int b = 1;
    int label = 1;
};

struct Constant {
    int label = 1;
};

struct Hypothesis {
    using Rep = std::variant<Conjunction, Box, DecisionList, Linear, Parity, ParityNonProper,
                             WeightedMajority, MajorityOfSet, Stump, Threshold, IntervalUnion,
                             Constant>;
    Rep rep;

    Hypothesis() : rep(Constant{}) {}
    template <typename T>
        requires std::is_constructible_v<Rep, T&&> && (!std::is_same_v<std::decay_t<T>, Hypothesis>)
    Hypothesis(T&& value) : rep(std::forward<T>(value)) {}

    template <typename T>
    bool holds() const noexcept { return std::holds_alternative<T>(rep); }
    template <typename T>
    const T& as() const { return std::get<T>(rep); }
};

int classify(const TargetFunction& f, std::span<const double> x);
int classify(const Hypothesis& h, std::span<const double> x);

Hypothesis to_hypothesis(const TargetFunction& f);

// Ambient dimension (n for boolean classes, d for real ones, 1 for 1-D classes).
std::size_t dimension(const TargetFunction& f);

// Throws ConfigurationError on a malformed target.
void validate(const TargetFunction& f);

// Size of h on the wire. Pure function of the representation; always > 0.
// Real-valued entries cost precision_bits each.
std::size_t encoded_bits(const Hypothesis& h, unsigned precision_bits);

// Canonical text form; equal strings <=> equal representations.
std::string describe(const Hypothesis& h);
std::string describe(const TargetFunction& f);

bool operator==(const Hypothesis& a, const Hypothesis& b);

// Number of places where consecutive rules of the list change output value.
std::size_t alternations(const DecisionList& list);

} // namespace dpac
