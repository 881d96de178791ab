#include "dpac/bitvec.hpp"

#include <bit>
#include <stdexcept>

namespace dpac {

BitVec::BitVec(std::size_t n, bool value) : n_(n), words_((n + 63) / 64, value ? ~0ULL : 0ULL) {
    if (value && (n & 63) != 0) {
        words_.back() &= (1ULL << (n & 63)) - 1;
    }
}

BitVec BitVec::from_string(std::string_view bits) {
    BitVec v(bits.size());
    for (std::size_t i = 0; i < bits.size(); ++i) {
        if (bits[i] == '1') {
            v.set(i);
        } else if (bits[i] != '0') {
            throw std::invalid_argument("bit string may contain only '0' and '1'");
        }
    }
    return v;
}

BitVec BitVec::from_features(std::span<const double> x) {
    BitVec v(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] == 1.0) v.set(i);
    }
    return v;
}

void BitVec::set(std::size_t i, bool v) noexcept {
    const std::uint64_t m = 1ULL << (i & 63);
    if (v) {
        words_[i >> 6] |= m;
    } else {
        words_[i >> 6] &= ~m;
    }
}

BitVec& BitVec::operator^=(const BitVec& o) noexcept {
    for (std::size_t w = 0; w < words_.size(); ++w) words_[w] ^= o.words_[w];
    return *this;
}

BitVec& BitVec::operator&=(const BitVec& o) noexcept {
    for (std::size_t w = 0; w < words_.size(); ++w) words_[w] &= o.words_[w];
    return *this;
}

BitVec& BitVec::operator|=(const BitVec& o) noexcept {
    for (std::size_t w = 0; w < words_.size(); ++w) words_[w] |= o.words_[w];
    return *this;
}

std::size_t BitVec::popcount() const noexcept {
    std::size_t c = 0;
    for (auto w : words_) c += static_cast<std::size_t>(std::popcount(w));
    return c;
}

bool BitVec::any() const noexcept {
    for (auto w : words_) {
        if (w != 0) return true;
    }
    return false;
}

std::size_t BitVec::first_set() const noexcept {
    for (std::size_t w = 0; w < words_.size(); ++w) {
        if (words_[w] != 0) return w * 64 + static_cast<std::size_t>(std::countr_zero(words_[w]));
    }
    return n_;
}

bool BitVec::dot(const BitVec& o) const noexcept {
    std::uint64_t acc = 0;
    for (std::size_t w = 0; w < words_.size(); ++w) acc ^= words_[w] & o.words_[w];
    return (std::popcount(acc) & 1) != 0;
}

bool BitVec::subset_of(const BitVec& o) const noexcept {
    for (std::size_t w = 0; w < words_.size(); ++w) {
        if ((words_[w] & ~o.words_[w]) != 0) return false;
    }
    return true;
}

std::string BitVec::to_string() const {
    std::string s(n_, '0');
    for (std::size_t i = 0; i < n_; ++i) {
        if (get(i)) s[i] = '1';
    }
    return s;
}

std::vector<double> BitVec::to_features() const {
    std::vector<double> x(n_, 0.0);
    for (std::size_t i = 0; i < n_; ++i) {
        if (get(i)) x[i] = 1.0;
    }
    return x;
}

} // namespace dpac
