#pragma once
#include <cstddef>
#include <functional>
#include <memory>
#include <vector>

#include "dpac/protocol.hpp"

namespace dpac::baseline {

// Batch learner run at the center: consistent (realizable) or ERM (agnostic).
using BatchLearner = std::function<Hypothesis(const Sample&)>;

// ERM over an explicit finite class; ties go to the earliest member.
BatchLearner finite_class_erm(std::vector<Hypothesis> hypotheses);

struct ShippingParams {
    double epsilon = 0.1;
    double delta = 0.05;
    bool agnostic = false;
    double c = 8.0;
    // VC dimension of the class; 0 means "use the ambient dimension of f".
    std::size_t vc_dimension = 0;
    double label_noise = 0.0;  // agnostic runs only
    BatchLearner learner;
};

// ceil((c/k) * (d/eps) * ln(1/eps)), with eps^2 in place of eps when agnostic.
std::size_t shipping_sample_size(std::size_t k, std::size_t d, double epsilon, double c, bool agnostic);

// One round: every player ships its sample to the center, which learns on the union.
ProtocolResult sample_shipping(const std::vector<DistributionSpec>& players, const TargetFunction& f,
                               const ShippingParams& params, const RunOptions& opts);

// Online learner driven by counterexamples. update() is only called on
// examples the current hypothesis gets wrong.
class OnlineLearner {
public:
    virtual ~OnlineLearner() = default;
    virtual Hypothesis current() const = 0;
    virtual int predict(std::span<const double> x) const = 0;
    virtual void update(const LabeledExample& ex) = 0;
    virtual std::size_t mistake_bound() const = 0;
    virtual std::unique_ptr<OnlineLearner> clone() const = 0;
};

// Majority vote over the surviving version space; at most floor(log2 |H|) mistakes.
class HalvingLearner final : public OnlineLearner {
public:
    explicit HalvingLearner(std::vector<Hypothesis> hypotheses);

    Hypothesis current() const override;
    int predict(std::span<const double> x) const override;
    void update(const LabeledExample& ex) override;
    std::size_t mistake_bound() const override;
    std::unique_ptr<OnlineLearner> clone() const override;

    std::size_t survivors() const noexcept { return alive_.size(); }

private:
    std::vector<Hypothesis> alive_;
    std::size_t initial_size_;
};

// Starts from the conjunction of all n variables and drops every variable a
// misclassified positive example sets to 0; at most n+1 mistakes.
class ConjunctionEliminationLearner final : public OnlineLearner {
public:
    explicit ConjunctionEliminationLearner(std::size_t n);

    Hypothesis current() const override;
    int predict(std::span<const double> x) const override;
    void update(const LabeledExample& ex) override;
    std::size_t mistake_bound() const override { return mask_.size() + 1; }
    std::unique_ptr<OnlineLearner> clone() const override;

private:
    BitVec mask_;
};

struct MistakeBoundParams {
    std::size_t sample_size = 1000;  // per player
    // Abort once more counterexamples than this were needed; 0 means the
    // learner's own mistake bound.
    std::size_t mistake_cap = 0;
};

// Lock-synchronous counterexample loop with shadow copies of the center's
// learner: only counterexamples travel. Lowest player id with a
// counterexample wins each slot, sending its first one in sample order.
ProtocolResult eq_mistake_bound(const std::vector<DistributionSpec>& players, const TargetFunction& f,
                                const OnlineLearner& learner, const MistakeBoundParams& params,
                                const RunOptions& opts);

} // namespace dpac::baseline
