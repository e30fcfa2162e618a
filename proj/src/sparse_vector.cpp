#include "seqlsh/sparse_vector.hpp"

#include "seqlsh/errors.hpp"

#include <cmath>
#include <string>

namespace seqlsh {

void SparseVector::validate() const {
    if (entries.empty()) {
        throw invariant_error("vector " + std::to_string(id) + " has no entries");
    }
    for (std::size_t i = 0; i < entries.size(); ++i) {
        if (entries[i].second < 0.0) {
            throw invariant_error("vector " + std::to_string(id) + " has a negative weight");
        }
        if (i > 0 && entries[i].first <= entries[i - 1].first) {
            throw invariant_error("vector " + std::to_string(id) +
                                  ": dimensions not strictly increasing");
        }
    }
}

double jaccard_similarity(const SparseVector& x, const SparseVector& y) {
    std::size_t i = 0, j = 0, inter = 0;
    while (i < x.entries.size() && j < y.entries.size()) {
        const auto dx = x.entries[i].first;
        const auto dy = y.entries[j].first;
        if (dx == dy) {
            ++inter;
            ++i;
            ++j;
        } else if (dx < dy) {
            ++i;
        } else {
            ++j;
        }
    }
    const std::size_t uni = x.entries.size() + y.entries.size() - inter;
    return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

double cosine_similarity(const SparseVector& x, const SparseVector& y) {
    double dot = 0.0, nx = 0.0, ny = 0.0;
    std::size_t i = 0, j = 0;
    for (const auto& [d, w] : x.entries) {
        (void)d;
        nx += w * w;
    }
    for (const auto& [d, w] : y.entries) {
        (void)d;
        ny += w * w;
    }
    while (i < x.entries.size() && j < y.entries.size()) {
        const auto dx = x.entries[i].first;
        const auto dy = y.entries[j].first;
        if (dx == dy) {
            dot += x.entries[i].second * y.entries[j].second;
            ++i;
            ++j;
        } else if (dx < dy) {
            ++i;
        } else {
            ++j;
        }
    }
    const double denom = std::sqrt(nx) * std::sqrt(ny);
    return denom == 0.0 ? 0.0 : dot / denom;
}

double exact_similarity(const SparseVector& x, const SparseVector& y, Measure measure) {
    return measure == Measure::Jaccard ? jaccard_similarity(x, y) : cosine_similarity(x, y);
}

} // namespace seqlsh
