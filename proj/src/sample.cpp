#include "dpac/sample.hpp"

#include <cmath>
#include <numeric>
#include <random>

#include "dpac/errors.hpp"

namespace dpac {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void check_probability(double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw ConfigurationError("probability outside [0,1]");
}

// Bernoulli p vector for the boolean product specs.
std::vector<double> product_probs(const DistributionSpec& spec) {
    if (const auto* u = std::get_if<UniformBoolean>(&spec)) return std::vector<double>(u->n, 0.5);
    if (const auto* p = std::get_if<ProductBernoulli>(&spec)) return p->p;
    throw ConfigurationError("histogram sampling needs a boolean product distribution");
}

} // namespace

void Sample::add(LabeledExample ex, double weight) {
    if (ex.x.size() != dim_) throw ConfigurationError("example dimension does not match sample");
    if (ex.label != 1 && ex.label != -1) throw ConfigurationError("labels must be +1 or -1");
    if (!(weight >= 0.0)) throw ConfigurationError("sample weights must be nonnegative");
    examples_.push_back(std::move(ex));
    weights_.push_back(weight);
}

double Sample::total_weight() const noexcept {
    return std::accumulate(weights_.begin(), weights_.end(), 0.0);
}

void Sample::set_weight(std::size_t i, double w) {
    if (!(w >= 0.0)) throw ConfigurationError("sample weights must be nonnegative");
    weights_.at(i) = w;
}

std::size_t dimension(const DistributionSpec& spec) {
    return std::visit(overloaded{
                          [](const UniformBoolean& s) { return s.n; },
                          [](const ProductBernoulli& s) { return s.p.size(); },
                          [](const UniformSphere& s) { return s.d; },
                          [](const GaussianSphericalUnitNorm& s) { return s.d; },
                          [](const UniformBox& s) { return s.lo.size(); },
                          [](const PointMassList& s) { return s.points.empty() ? 0 : s.points[0].size(); },
                          [](const FixedOrderedList& s) { return s.points.empty() ? 0 : s.points[0].size(); },
                      },
                      spec);
}

bool is_boolean(const DistributionSpec& spec) {
    return std::holds_alternative<UniformBoolean>(spec) || std::holds_alternative<ProductBernoulli>(spec);
}

void validate(const DistributionSpec& spec) {
    std::visit(overloaded{
                   [](const UniformBoolean& s) {
                       if (s.n == 0) throw ConfigurationError("UniformBoolean needs n >= 1");
                   },
                   [](const ProductBernoulli& s) {
                       if (s.p.empty()) throw ConfigurationError("ProductBernoulli needs n >= 1");
                       for (double p : s.p) check_probability(p);
                   },
                   [](const UniformSphere& s) {
                       if (s.d == 0) throw ConfigurationError("UniformSphere needs d >= 1");
                   },
                   [](const GaussianSphericalUnitNorm& s) {
                       if (s.d == 0) throw ConfigurationError("GaussianSphericalUnitNorm needs d >= 1");
                   },
                   [](const UniformBox& s) {
                       if (s.lo.empty() || s.lo.size() != s.hi.size()) {
                           throw ConfigurationError("UniformBox bounds must be nonempty and equal length");
                       }
                       for (std::size_t i = 0; i < s.lo.size(); ++i) {
                           if (!(s.lo[i] <= s.hi[i])) throw ConfigurationError("UniformBox lo > hi");
                       }
                   },
                   [](const PointMassList& s) {
                       if (s.points.empty() || s.points.size() != s.probs.size()) {
                           throw ConfigurationError("PointMassList needs one probability per point");
                       }
                       double total = 0.0;
                       for (std::size_t i = 0; i < s.points.size(); ++i) {
                           check_probability(s.probs[i]);
                           total += s.probs[i];
                           if (s.points[i].size() != s.points[0].size()) {
                               throw ConfigurationError("PointMassList points differ in dimension");
                           }
                       }
                       if (std::abs(total - 1.0) > 1e-9) throw ConfigurationError("probabilities must sum to 1");
                   },
                   [](const FixedOrderedList& s) {
                       if (s.points.empty()) throw ConfigurationError("FixedOrderedList needs points");
                       for (const auto& p : s.points) {
                           if (p.size() != s.points[0].size()) {
                               throw ConfigurationError("FixedOrderedList points differ in dimension");
                           }
                       }
                   },
               },
               spec);
}

Features draw_point(const DistributionSpec& spec, Rng& rng, std::size_t index) {
    return std::visit(
        overloaded{
            [&](const UniformBoolean& s) {
                Features x(s.n);
                for (auto& v : x) v = (rng() >> 63) ? 1.0 : 0.0;
                return x;
            },
            [&](const ProductBernoulli& s) {
                Features x(s.p.size());
                for (std::size_t j = 0; j < x.size(); ++j) x[j] = rng.uniform() < s.p[j] ? 1.0 : 0.0;
                return x;
            },
            [&](const UniformSphere& s) {
                std::normal_distribution<double> g;
                Features x(s.d);
                double n2 = 0.0;
                do {
                    n2 = 0.0;
                    for (auto& v : x) {
                        v = g(rng);
                        n2 += v * v;
                    }
                } while (n2 == 0.0);
                const double inv = 1.0 / std::sqrt(n2);
                for (auto& v : x) v *= inv;
                return x;
            },
            [&](const GaussianSphericalUnitNorm& s) {
                std::normal_distribution<double> g(0.0, 1.0 / std::sqrt(static_cast<double>(s.d)));
                Features x(s.d);
                for (auto& v : x) v = g(rng);
                return x;
            },
            [&](const UniformBox& s) {
                Features x(s.lo.size());
                for (std::size_t i = 0; i < x.size(); ++i) x[i] = s.lo[i] + (s.hi[i] - s.lo[i]) * rng.uniform();
                return x;
            },
            [&](const PointMassList& s) {
                const double u = rng.uniform();
                double acc = 0.0;
                for (std::size_t i = 0; i < s.points.size(); ++i) {
                    acc += s.probs[i];
                    if (u < acc) return s.points[i];
                }
                return s.points.back();
            },
            [&](const FixedOrderedList& s) { return s.points[index % s.points.size()]; },
        },
        spec);
}

Sample draw_sample(const DistributionSpec& spec, const TargetFunction& f, std::size_t m, Rng& rng) {
    validate(spec);
    const std::size_t d = dimension(spec);
    if (d != dimension(f)) throw ConfigurationError("distribution dimension does not match target");
    Sample s(d);
    for (std::size_t i = 0; i < m; ++i) {
        Features x = draw_point(spec, rng, i);
        const int y = classify(f, x);
        s.add({std::move(x), y});
    }
    return s;
}

Sample draw_sample(const DistributionSpec& spec, const TargetFunction& f, std::size_t m,
                   std::uint64_t seed) {
    Rng rng = Rng::stream(seed, "draw_sample");
    return draw_sample(spec, f, m, rng);
}

Sample draw_histogram_sample(const DistributionSpec& spec, const TargetFunction& f, std::uint64_t m,
                             Rng& rng) {
    validate(spec);
    const std::vector<double> p = product_probs(spec);
    const std::size_t n = p.size();
    if (n != dimension(f)) throw ConfigurationError("distribution dimension does not match target");

    struct Cell {
        Features prefix;
        std::uint64_t count;
    };
    std::vector<Cell> cells{{Features{}, m}};
    for (std::size_t j = 0; j < n; ++j) {
        std::vector<Cell> next;
        next.reserve(cells.size() * 2);
        for (auto& cell : cells) {
            std::uint64_t ones = 0;
            if (p[j] >= 1.0) {
                ones = cell.count;
            } else if (p[j] > 0.0) {
                std::binomial_distribution<std::uint64_t> bin(cell.count, p[j]);
                ones = bin(rng);
            }
            const std::uint64_t zeros = cell.count - ones;
            if (zeros > 0) {
                Features x = cell.prefix;
                x.push_back(0.0);
                next.push_back({std::move(x), zeros});
            }
            if (ones > 0) {
                cell.prefix.push_back(1.0);
                next.push_back({std::move(cell.prefix), ones});
            }
        }
        cells = std::move(next);
    }
    Sample s(n);
    for (auto& cell : cells) {
        const int y = classify(f, cell.prefix);
        s.add({std::move(cell.prefix), y}, static_cast<double>(cell.count));
    }
    return s;
}

void apply_label_noise(Sample& sample, double rate, Rng& rng) {
    if (rate <= 0.0) return;
    Sample noisy(sample.dim());
    for (std::size_t i = 0; i < sample.size(); ++i) {
        LabeledExample ex = sample[i];
        if (rng.uniform() < rate) ex.label = -ex.label;
        noisy.add(std::move(ex), sample.weights()[i]);
    }
    sample = std::move(noisy);
}

} // namespace dpac
