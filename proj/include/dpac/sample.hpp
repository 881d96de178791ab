#pragma once
#include <cstddef>
#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "dpac/hypothesis.hpp"
#include "dpac/rng.hpp"

namespace dpac {

struct LabeledExample {
    Features x;
    int label = 1;
};

// Ordered examples with nonnegative weights (default 1). A weighted sample
// with integer weights stands for a multiset; total_weight() is then |S|.
class Sample {
public:
    Sample() = default;
    explicit Sample(std::size_t dim) : dim_(dim) {}

    void add(LabeledExample ex, double weight = 1.0);

    std::size_t dim() const noexcept { return dim_; }
    std::size_t size() const noexcept { return examples_.size(); }
    bool empty() const noexcept { return examples_.empty(); }
    double total_weight() const noexcept;

    const LabeledExample& operator[](std::size_t i) const { return examples_[i]; }
    const std::vector<LabeledExample>& examples() const noexcept { return examples_; }
    const std::vector<double>& weights() const noexcept { return weights_; }
    void set_weight(std::size_t i, double w);

private:
    std::size_t dim_ = 0;
    std::vector<LabeledExample> examples_;
    std::vector<double> weights_;
};

// ---- per-player distributions D_i ----

struct UniformBoolean {
    std::size_t n = 0;
};
struct ProductBernoulli {
    std::vector<double> p;  // Pr[x_j = 1]
};
struct UniformSphere {
    std::size_t d = 0;
};
// N(0, I/d): radially symmetric with E||x||^2 = 1.
struct GaussianSphericalUnitNorm {
    std::size_t d = 0;
};
struct UniformBox {
    Features lo;
    Features hi;
};
struct PointMassList {
    std::vector<Features> points;
    std::vector<double> probs;
};
// Deterministic: the i-th draw is points[i mod size].
struct FixedOrderedList {
    std::vector<Features> points;
};

using DistributionSpec = std::variant<UniformBoolean, ProductBernoulli, UniformSphere,
                                      GaussianSphericalUnitNorm, UniformBox, PointMassList,
                                      FixedOrderedList>;

std::size_t dimension(const DistributionSpec& spec);
bool is_boolean(const DistributionSpec& spec);
// Throws ConfigurationError: probabilities must sum to 1 within 1e-9, shapes consistent.
void validate(const DistributionSpec& spec);

// The i-th draw from spec (i only matters for FixedOrderedList).
Features draw_point(const DistributionSpec& spec, Rng& rng, std::size_t index);

// m examples labeled by f. Deterministic given the stream.
Sample draw_sample(const DistributionSpec& spec, const TargetFunction& f, std::size_t m, Rng& rng);
Sample draw_sample(const DistributionSpec& spec, const TargetFunction& f, std::size_t m,
                   std::uint64_t seed);

// Same multiset law as draw_sample for boolean product distributions, but
// stored as distinct points with integer multiplicities. Built by splitting
// counts coordinate by coordinate with binomial draws, so its cost scales with
// the number of distinct points rather than m.
Sample draw_histogram_sample(const DistributionSpec& spec, const TargetFunction& f, std::uint64_t m,
                             Rng& rng);

// Flips each label independently with probability rate.
void apply_label_noise(Sample& sample, double rate, Rng& rng);

} // namespace dpac
