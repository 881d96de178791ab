#include "dpac/gf2.hpp"

#include <algorithm>
#include <iterator>

#include "dpac/errors.hpp"

namespace dpac {

bool GF2Basis::reduce(BitVec& x) const {
    bool acc = false;
    for (std::size_t r = 0; r < rows_.size(); ++r) {
        if (x.get(pivots_[r])) {
            x ^= rows_[r];
            acc = acc != labels_[r];
        }
    }
    return acc;
}

bool GF2Basis::insert(BitVec x, bool label) {
    if (x.size() != n_) throw ConfigurationError("GF(2) row length does not match basis dimension");
    const bool implied = reduce(x);
    const bool residual_label = label != implied;
    if (x.none()) {
        if (residual_label) {
            throw RealizabilityViolation("inconsistent parity sample: spanned point has conflicting label");
        }
        return false;
    }
    const std::size_t pivot = x.first_set();
    for (std::size_t r = 0; r < rows_.size(); ++r) {
        if (rows_[r].get(pivot)) {
            rows_[r] ^= x;
            labels_[r] = labels_[r] != residual_label;
        }
    }
    const auto pos = static_cast<std::size_t>(
        std::distance(pivots_.begin(), std::lower_bound(pivots_.begin(), pivots_.end(), pivot)));
    rows_.insert(rows_.begin() + static_cast<std::ptrdiff_t>(pos), std::move(x));
    labels_.insert(labels_.begin() + static_cast<std::ptrdiff_t>(pos), residual_label);
    pivots_.insert(pivots_.begin() + static_cast<std::ptrdiff_t>(pos), pivot);
    return true;
}

std::optional<bool> GF2Basis::predict(const BitVec& x) const {
    BitVec y = x;
    const bool bit = reduce(y);
    if (y.any()) return std::nullopt;
    return bit;
}

bool GF2Basis::in_span(const BitVec& x) const {
    BitVec y = x;
    reduce(y);
    return y.none();
}

BitVec GF2Basis::particular_solution() const {
    BitVec s(n_);
    for (std::size_t r = 0; r < rows_.size(); ++r) s.set(pivots_[r], labels_[r]);
    return s;
}

} // namespace dpac
