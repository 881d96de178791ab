#pragma once
#include <cstddef>
#include <optional>
#include <vector>

#include "dpac/bitvec.hpp"

namespace dpac {

/**
 * Row-reduced echelon basis over GF(2), each row carrying the XOR of the labels
 * of the training points that generated it.
 *
 * Invariants: rows are linearly independent, pivot columns strictly increase,
 * and each pivot column is zero in every other row (fully reduced), so the
 * reduction of a query against the rows is order-independent.
 */
class GF2Basis {
public:
    GF2Basis() = default;
    explicit GF2Basis(std::size_t n) : n_(n) {}

    std::size_t dimension() const noexcept { return n_; }
    std::size_t rank() const noexcept { return rows_.size(); }
    const std::vector<BitVec>& rows() const noexcept { return rows_; }
    const std::vector<bool>& labels() const noexcept { return labels_; }
    const std::vector<std::size_t>& pivots() const noexcept { return pivots_; }

    // Adds (x, label). Returns true when the rank grew. A point already in the
    // span whose recombined label disagrees throws RealizabilityViolation.
    bool insert(BitVec x, bool label);

    // Label bit implied by the span, or nullopt ("don't know") when x is not
    // in the span. The zero vector is always answered with 0.
    std::optional<bool> predict(const BitVec& x) const;

    bool in_span(const BitVec& x) const;

    // Consistent solution with every free variable set to 0.
    BitVec particular_solution() const;

    friend bool operator==(const GF2Basis&, const GF2Basis&) = default;

private:
    // Reduces x in place and returns the XOR of the labels of the rows used.
    bool reduce(BitVec& x) const;

    std::size_t n_ = 0;
    std::vector<BitVec> rows_;
    std::vector<bool> labels_;
    std::vector<std::size_t> pivots_;
};

} // namespace dpac
