#pragma once

#include "seqlsh/sparse_vector.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace seqlsh {

enum class CorpusFormat {
    SetTsv,      // id \t dim dim dim
    WeightedTsv, // id \t dim:weight dim:weight
};

// Parses and validates a corpus; throws parse_error naming the line on
// malformed input or duplicate dimensions.
std::vector<SparseVector> ingest(std::istream& in, CorpusFormat format);
std::vector<SparseVector> ingest(const std::string& path, CorpusFormat format);

// Canonical form: dimensions ascending, one vector per line.
void write_corpus(std::ostream& out, const std::vector<SparseVector>& corpus,
                  CorpusFormat format);

struct PlantedLevel {
    double similarity = 0.5;
    int count = 1; // pairs planted at this level
};

struct SynthSpec {
    Measure measure = Measure::Jaccard;
    std::vector<PlantedLevel> levels;
    int noise_vectors = 0;
    std::uint64_t seed = 1;
};

struct PlantedPair {
    std::uint64_t a = 0;
    std::uint64_t b = 0;
    double similarity = 0.0; // exact by construction
};

struct SynthResult {
    std::vector<SparseVector> corpus;
    std::vector<PlantedPair> planted;
};

// Controlled-similarity corpus: set-overlap construction for Jaccard,
// rotated-vector construction for cosine, on disjoint dimension ranges so
// planted similarities are exact. Deterministic given the seed.
SynthResult synth(const SynthSpec& spec);

struct OraclePair {
    std::uint64_t a = 0;
    std::uint64_t b = 0;
    double similarity = 0.0;
};

// Exhaustive exact all-pairs ground truth (O(n^2)).
std::vector<OraclePair> oracle_allpairs(const std::vector<SparseVector>& corpus, double t,
                                        Measure measure);

} // namespace seqlsh
