// Basic numeric type aliases and small helpers shared across the library.

#pragma once

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace robustrl {

/// Default precision used throughout the library.
using prec_t = double;

/// Vector of numbers (probabilities, values, rewards).
using numvec = std::vector<prec_t>;

/// Vector of indices.
using sizvec = std::vector<std::size_t>;

/// Tolerance under which a probability row is considered stochastic.
constexpr prec_t kProbTolerance = 1e-12;

/// Returns indices that sort `v` increasingly; ties keep the smaller index first.
inline sizvec sort_indices(const numvec& v) {
    sizvec idx(v.size());
    std::iota(idx.begin(), idx.end(), std::size_t(0));
    std::stable_sort(idx.begin(), idx.end(),
                     [&v](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    return idx;
}

inline prec_t dot(const numvec& a, const numvec& b) {
    assert(a.size() == b.size());
    return std::inner_product(a.cbegin(), a.cend(), b.cbegin(), prec_t(0.0));
}

/// True when entries are nonnegative (within tolerance) and sum to 1 (within tolerance).
inline bool is_probability_row(const numvec& p, prec_t tol = kProbTolerance) {
    prec_t sum = 0.0;
    for (prec_t x : p) {
        if (x < -tol) return false;
        sum += x;
    }
    return std::abs(sum - 1.0) <= tol;
}

/// True when every entry is exactly zero (the convention for unvisited empirical rows).
inline bool is_zero_row(const numvec& p) {
    return std::all_of(p.cbegin(), p.cend(), [](prec_t x) { return x == 0.0; });
}

/// Smallest index attaining the minimum of `v`.
inline std::size_t argmin_index(const numvec& v) {
    assert(!v.empty());
    return std::distance(v.cbegin(), std::min_element(v.cbegin(), v.cend()));
}

/// Smallest index attaining the maximum of `v`.
inline std::size_t argmax_index(const numvec& v) {
    assert(!v.empty());
    return std::distance(v.cbegin(), std::max_element(v.cbegin(), v.cend()));
}

} // namespace robustrl
