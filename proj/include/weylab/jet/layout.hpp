#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace weylab {

// Multi-index bookkeeping for truncated Taylor expansions in `dim` variables
// up to total order `order`. Multi-indices are enumerated by total degree,
// lexicographically within each degree, so index 0 is the constant term and
// indices 1..dim are the first-order terms.
//
// Layouts are immutable and cached per (dim, order); get() hands out a
// reference that stays valid for the lifetime of the process.
class JetLayout {
public:
    static constexpr int kMaxOrder = 6;
    static constexpr int kMaxDim = 8;

    static const JetLayout& get(int dim, int order);

    int dim() const { return dim_; }
    int order() const { return order_; }
    int size() const { return static_cast<int>(exponents_.size()); }

    std::span<const int> exponent(int idx) const {
        return {exponents_[idx].data(), exponents_[idx].size()};
    }
    int degree(int idx) const { return degree_[idx]; }

    // Index of a multi-index, or -1 if its degree exceeds the order.
    int index_of(std::span<const int> alpha) const;

    // Index of alpha + e_v, or -1 if that leaves the layout.
    int shift_up(int idx, int var) const { return shift_up_[idx * dim_ + var]; }

    // alpha! for the multi-index at idx.
    double factorial(int idx) const { return factorial_[idx]; }

    // Convolution table for truncated multiplication, grouped by output
    // index: pairs (a,b) for output k occupy mul_pairs[2*mul_offsets[k]] ..
    // mul_pairs[2*mul_offsets[k+1]).
    const std::vector<int32_t>& mul_offsets() const { return mul_offsets_; }
    const std::vector<int32_t>& mul_pairs() const { return mul_pairs_; }

private:
    JetLayout(int dim, int order);

    int dim_;
    int order_;
    std::vector<std::vector<int>> exponents_;
    std::vector<int> degree_;
    std::vector<int> shift_up_;
    std::vector<double> factorial_;
    std::vector<int32_t> mul_offsets_;
    std::vector<int32_t> mul_pairs_;
};

}  // namespace weylab
