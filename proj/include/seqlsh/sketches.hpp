#pragma once

#include "seqlsh/sparse_vector.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace seqlsh {

enum class Scheme : std::uint8_t { MinHash = 0, SimHash = 1 };

// One hash per index derived statelessly from (seed, index), so the family
// needs O(1) memory regardless of h and dimensionality.
struct HashFamily {
    Scheme scheme = Scheme::MinHash;
    std::uint64_t seed = 0;
    int h = 256;
};

// Fixed-length sketch of one object. MinHash stores h 64-bit keys; SimHash
// packs h sign bits into h/64 words.
struct Signature {
    Scheme scheme = Scheme::MinHash;
    int h = 0;
    std::vector<std::uint64_t> values;

    bool bit(int i) const { return (values[i >> 6] >> (i & 63)) & 1u; }
};

Signature minhash_sign(const SparseVector& v, const HashFamily& fam);
Signature simhash_sign(const SparseVector& v, const HashFamily& fam);
Signature sign(const SparseVector& v, const HashFamily& fam);

// Number of agreeing positions in [from, upto). Throws invariant_error on
// scheme mismatch or out-of-range indices.
int match_count(const Signature& a, const Signature& b, int from, int upto);

// Binary sketch file: header {magic "SQLH", scheme, h, seed, count} then
// per-object records {id, values}. Round-trips bit-exactly.
struct SketchFile {
    HashFamily family;
    std::vector<std::uint64_t> ids;
    std::vector<Signature> signatures;
};

void write_sketches(std::ostream& out, const SketchFile& file);
SketchFile read_sketches(std::istream& in);
void write_sketches(const std::string& path, const SketchFile& file);
SketchFile read_sketches(const std::string& path);

} // namespace seqlsh
