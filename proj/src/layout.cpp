#include "weylab/jet/layout.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>

namespace weylab {

namespace {

uint64_t pack(std::span<const int> alpha) {
    uint64_t key = 0;
    for (int e : alpha) key = key * 16 + static_cast<uint64_t>(e);
    return key;
}

void enumerate_degree(int dim, int deg, std::vector<int>& cur, int pos, int left,
                      std::vector<std::vector<int>>& out) {
    if (pos == dim - 1) {
        cur[pos] = left;
        out.push_back(cur);
        return;
    }
    for (int e = left; e >= 0; --e) {
        cur[pos] = e;
        enumerate_degree(dim, deg, cur, pos + 1, left - e, out);
    }
}

}  // namespace

JetLayout::JetLayout(int dim, int order) : dim_(dim), order_(order) {
    std::vector<int> cur(dim);
    for (int deg = 0; deg <= order; ++deg)
        enumerate_degree(dim, deg, cur, 0, deg, exponents_);

    const int n = size();
    degree_.resize(n);
    factorial_.resize(n);
    std::map<uint64_t, int> lookup;
    for (int i = 0; i < n; ++i) {
        int deg = 0;
        double fact = 1.0;
        for (int e : exponents_[i]) {
            deg += e;
            for (int k = 2; k <= e; ++k) fact *= k;
        }
        degree_[i] = deg;
        factorial_[i] = fact;
        lookup[pack(exponents_[i])] = i;
    }

    shift_up_.assign(static_cast<size_t>(n) * dim, -1);
    for (int i = 0; i < n; ++i) {
        for (int v = 0; v < dim; ++v) {
            if (degree_[i] + 1 > order) continue;
            auto alpha = exponents_[i];
            alpha[v] += 1;
            shift_up_[static_cast<size_t>(i) * dim + v] = lookup.at(pack(alpha));
        }
    }

    // Convolution pairs grouped by output index.
    std::vector<std::vector<std::pair<int32_t, int32_t>>> by_out(n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (degree_[i] + degree_[j] > order) continue;
            auto alpha = exponents_[i];
            for (int v = 0; v < dim; ++v) alpha[v] += exponents_[j][v];
            by_out[lookup.at(pack(alpha))].emplace_back(i, j);
        }
    }
    mul_offsets_.resize(n + 1);
    mul_offsets_[0] = 0;
    for (int k = 0; k < n; ++k)
        mul_offsets_[k + 1] = mul_offsets_[k] + static_cast<int32_t>(by_out[k].size());
    mul_pairs_.reserve(static_cast<size_t>(mul_offsets_[n]) * 2);
    for (int k = 0; k < n; ++k) {
        for (auto [a, b] : by_out[k]) {
            mul_pairs_.push_back(a);
            mul_pairs_.push_back(b);
        }
    }
}

int JetLayout::index_of(std::span<const int> alpha) const {
    if (static_cast<int>(alpha.size()) != dim_)
        throw std::invalid_argument("JetLayout::index_of: dimension mismatch");
    int deg = 0;
    for (int e : alpha) deg += e;
    if (deg > order_) return -1;
    // Walk down via shift tables: start at constant term, raise one variable
    // at a time.
    int idx = 0;
    for (int v = 0; v < dim_; ++v)
        for (int e = 0; e < alpha[v]; ++e) idx = shift_up(idx, v);
    return idx;
}

const JetLayout& JetLayout::get(int dim, int order) {
    if (dim < 1 || dim > kMaxDim) throw std::invalid_argument("JetLayout: bad dim");
    if (order < 0 || order > kMaxOrder) throw std::invalid_argument("JetLayout: bad order");
    static std::mutex mu;
    static std::map<std::pair<int, int>, std::unique_ptr<JetLayout>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto& slot = cache[{dim, order}];
    if (!slot) slot.reset(new JetLayout(dim, order));
    return *slot;
}

}  // namespace weylab
