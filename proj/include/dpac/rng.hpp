#pragma once
#include <cstdint>
#include <limits>
#include <string_view>

namespace dpac {

/**
 * Counter-based generator (SplitMix64 finalizer over key + counter).
 *
 * Every random decision in a run is drawn from a named stream derived from the
 * run seed, e.g. Rng::stream(seed, "sample", player). Two streams with
 * different names or indices are statistically independent, and a stream's
 * output does not depend on how many values other streams consumed, so a
 * protocol trace replays exactly from (seed, config).
 *
 * Satisfies UniformRandomBitGenerator, so <random> distributions accept it.
 */
class Rng {
public:
    using result_type = std::uint64_t;

    explicit Rng(std::uint64_t key) noexcept : key_(key) {}

    static Rng stream(std::uint64_t seed, std::string_view name,
                      std::uint64_t a = 0, std::uint64_t b = 0) noexcept;

    // Child stream; does not advance this one.
    Rng split(std::string_view name, std::uint64_t a = 0, std::uint64_t b = 0) const noexcept;

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept {
        ++counter_;
        return mix64(key_ + counter_ * kGolden);
    }

    // Uniform on [0, 1) with 53 random bits.
    double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    // Uniform integer in [0, n); n > 0.
    std::uint64_t below(std::uint64_t n) noexcept;

    bool bernoulli(double p) noexcept { return uniform() < p; }

    std::uint64_t key() const noexcept { return key_; }
    std::uint64_t counter() const noexcept { return counter_; }

    static std::uint64_t mix64(std::uint64_t z) noexcept {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

private:
    static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

} // namespace dpac
