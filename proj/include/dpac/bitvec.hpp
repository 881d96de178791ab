#pragma once
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace dpac {

// Fixed-length bit vector packed into 64-bit words. Bit i is variable x_{i+1}.
class BitVec {
public:
    BitVec() = default;
    explicit BitVec(std::size_t n, bool value = false);

    // "1011" -> bits 0,2,3 set.
    static BitVec from_string(std::string_view bits);
    // Features are 0.0 / 1.0; anything other than exactly 1.0 reads as 0.
    static BitVec from_features(std::span<const double> x);

    std::size_t size() const noexcept { return n_; }
    bool get(std::size_t i) const noexcept { return (words_[i >> 6] >> (i & 63)) & 1ULL; }
    void set(std::size_t i, bool v = true) noexcept;
    void flip(std::size_t i) noexcept { words_[i >> 6] ^= 1ULL << (i & 63); }

    BitVec& operator^=(const BitVec& o) noexcept;
    BitVec& operator&=(const BitVec& o) noexcept;
    BitVec& operator|=(const BitVec& o) noexcept;

    std::size_t popcount() const noexcept;
    bool any() const noexcept;
    bool none() const noexcept { return !any(); }
    // Index of the lowest set bit, or size() when empty.
    std::size_t first_set() const noexcept;
    // Parity of popcount(*this & o).
    bool dot(const BitVec& o) const noexcept;
    // Every bit set in *this is also set in o.
    bool subset_of(const BitVec& o) const noexcept;

    std::span<const std::uint64_t> words() const noexcept { return words_; }
    std::string to_string() const;
    std::vector<double> to_features() const;

    friend bool operator==(const BitVec&, const BitVec&) = default;

private:
    std::size_t n_ = 0;
    std::vector<std::uint64_t> words_;
};

} // namespace dpac
