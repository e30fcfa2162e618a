#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace seqlsh {

enum class Measure { Jaccard, Cosine };

// Sparse vector with strictly increasing dimensions and non-negative weights.
// Jaccard mode uses set semantics (all weights 1).
struct SparseVector {
    std::uint64_t id = 0;
    std::vector<std::pair<std::uint32_t, double>> entries;

    std::size_t size() const { return entries.size(); }

    // Throws invariant_error if dimensions are not strictly increasing,
    // a weight is negative, or the vector is empty.
    void validate() const;
};

// |x ∩ y| / |x ∪ y| over dimensions (weights ignored).
double jaccard_similarity(const SparseVector& x, const SparseVector& y);

// dot(x,y) / (|x| |y|).
double cosine_similarity(const SparseVector& x, const SparseVector& y);

double exact_similarity(const SparseVector& x, const SparseVector& y, Measure measure);

} // namespace seqlsh
