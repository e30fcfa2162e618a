#pragma once

#include "seqlsh/sketches.hpp"
#include "seqlsh/sparse_vector.hpp"

#include <cstdint>
#include <unordered_map>
#include <vector>

namespace seqlsh {

struct CandidatePair {
    std::uint64_t a = 0; // a < b, deduplicated across buckets
    std::uint64_t b = 0;

    friend bool operator==(const CandidatePair&, const CandidatePair&) = default;
    friend auto operator<=>(const CandidatePair&, const CandidatePair&) = default;
};

// l = ceil(log(phi) / log(1 - t^k)): signatures needed for recall 1-phi.
int compute_l(double t, int k, double phi);

// LSH banding index: l disjoint bands of k consecutive signature values
// (MinHash keys or SimHash bits) hashed into per-band buckets.
class BandingIndex {
  public:
    // Requires l*k <= h. Band j covers signature slice [j*k, (j+1)*k).
    BandingIndex(int k, int l, int h);

    void insert(std::uint64_t id, const Signature& sig);

    int k() const { return k_; }
    int l() const { return l_; }
    int reserved_hashes() const { return k_ * l_; }

    // All pairs sharing at least one bucket, each emitted once, a < b.
    std::vector<CandidatePair> pairs() const;

  private:
    std::uint64_t band_key(const Signature& sig, int band) const;

    int k_;
    int l_;
    int h_;
    std::vector<std::unordered_map<std::uint64_t, std::vector<std::uint64_t>>> buckets_;
};

// Simplified exact candidate generator: inverted index with prefix filtering
// on sorted dimensions (size bound for Jaccard, l-infinity weight bound for
// cosine). Emits a superset of all pairs with similarity >= t.
std::vector<CandidatePair> exact_candidates(const std::vector<SparseVector>& corpus, double t,
                                            Measure measure);

} // namespace seqlsh
