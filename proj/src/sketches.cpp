#include "seqlsh/sketches.hpp"

#include "seqlsh/errors.hpp"
#include "seqlsh/hashing.hpp"

#include <bit>
#include <fstream>
#include <limits>

namespace seqlsh {

namespace {

constexpr char kMagic[4] = {'S', 'Q', 'L', 'H'};

void check_family(const HashFamily& fam) {
    if (fam.h <= 0) {
        throw config_error("hash count h must be positive");
    }
}

template <typename T>
void put(std::ostream& out, T value) {
    out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T get(std::istream& in) {
    T value{};
    in.read(reinterpret_cast<char*>(&value), sizeof(T));
    if (!in) {
        throw parse_error("sketch file truncated");
    }
    return value;
}

} // namespace

Signature minhash_sign(const SparseVector& v, const HashFamily& fam) {
    check_family(fam);
    if (fam.scheme != Scheme::MinHash) {
        throw config_error("minhash_sign called with a non-MinHash family");
    }
    if (v.entries.empty()) {
        throw invariant_error("empty set has undefined Jaccard sketch");
    }
    // Pre-mix dimensions once; each hash index then costs one mix per dim.
    std::vector<std::uint64_t> dims;
    dims.reserve(v.entries.size());
    for (const auto& [d, w] : v.entries) {
        (void)w;
        dims.push_back(mix64(static_cast<std::uint64_t>(d) + 0x6a09e667f3bcc909ULL));
    }

    Signature sig{Scheme::MinHash, fam.h, {}};
    sig.values.resize(static_cast<std::size_t>(fam.h));
    for (int i = 0; i < fam.h; ++i) {
        const std::uint64_t si = derive_seed(fam.seed, static_cast<std::uint64_t>(i));
        std::uint64_t best = std::numeric_limits<std::uint64_t>::max();
        for (std::uint64_t dm : dims) {
            const std::uint64_t key = mix64(si ^ dm);
            if (key < best) best = key;
        }
        sig.values[static_cast<std::size_t>(i)] = best;
    }
    return sig;
}

Signature simhash_sign(const SparseVector& v, const HashFamily& fam) {
    check_family(fam);
    if (fam.scheme != Scheme::SimHash) {
        throw config_error("simhash_sign called with a non-SimHash family");
    }
    if (fam.h % 64 != 0) {
        throw config_error("SimHash h must be a multiple of 64");
    }
    bool nonzero = false;
    for (const auto& [d, w] : v.entries) {
        (void)d;
        if (w != 0.0) nonzero = true;
    }
    if (v.entries.empty() || !nonzero) {
        throw invariant_error("zero vector has undefined SimHash sketch");
    }

    std::vector<std::uint64_t> dims;
    dims.reserve(v.entries.size());
    for (const auto& [d, w] : v.entries) {
        (void)w;
        dims.push_back(mix64(static_cast<std::uint64_t>(d) + 0xbb67ae8584caa73bULL));
    }

    Signature sig{Scheme::SimHash, fam.h, {}};
    sig.values.assign(static_cast<std::size_t>(fam.h / 64), 0);
    for (int i = 0; i < fam.h; ++i) {
        const std::uint64_t si = derive_seed(fam.seed, static_cast<std::uint64_t>(i));
        // Rademacher +/-1 hyperplane components, generated on the fly.
        double proj = 0.0;
        for (std::size_t j = 0; j < dims.size(); ++j) {
            const bool plus = mix64(si ^ dims[j]) & 1u;
            proj += plus ? v.entries[j].second : -v.entries[j].second;
        }
        if (proj >= 0.0) {
            sig.values[static_cast<std::size_t>(i >> 6)] |= 1ULL << (i & 63);
        }
    }
    return sig;
}

Signature sign(const SparseVector& v, const HashFamily& fam) {
    return fam.scheme == Scheme::MinHash ? minhash_sign(v, fam) : simhash_sign(v, fam);
}

int match_count(const Signature& a, const Signature& b, int from, int upto) {
    if (a.scheme != b.scheme || a.h != b.h) {
        throw invariant_error("match_count: signature scheme/length mismatch");
    }
    if (from < 0 || from >= upto || upto > a.h) {
        throw invariant_error("match_count: range out of bounds");
    }
    if (a.scheme == Scheme::MinHash) {
        int matches = 0;
        for (int i = from; i < upto; ++i) {
            matches += a.values[static_cast<std::size_t>(i)] == b.values[static_cast<std::size_t>(i)];
        }
        return matches;
    }
    // SimHash: popcount of agreeing bits, word-wise with edge masks.
    int matches = 0;
    int i = from;
    while (i < upto) {
        const int word = i >> 6;
        const int lo = i & 63;
        const int hi = std::min(upto - (word << 6), 64);
        std::uint64_t mask = ~0ULL;
        if (hi < 64) mask &= (1ULL << hi) - 1;
        mask &= ~((lo > 0) ? ((1ULL << lo) - 1) : 0ULL);
        const std::uint64_t agree = ~(a.values[static_cast<std::size_t>(word)] ^
                                      b.values[static_cast<std::size_t>(word)]);
        matches += std::popcount(agree & mask);
        i = (word + 1) << 6;
    }
    return matches;
}

void write_sketches(std::ostream& out, const SketchFile& file) {
    out.write(kMagic, 4);
    put<std::uint8_t>(out, static_cast<std::uint8_t>(file.family.scheme));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(file.family.h));
    put<std::uint64_t>(out, file.family.seed);
    put<std::uint64_t>(out, file.ids.size());
    for (std::size_t i = 0; i < file.ids.size(); ++i) {
        put<std::uint64_t>(out, file.ids[i]);
        const auto& sig = file.signatures[i];
        for (std::uint64_t v : sig.values) {
            put<std::uint64_t>(out, v);
        }
    }
}

SketchFile read_sketches(std::istream& in) {
    char magic[4];
    in.read(magic, 4);
    if (!in || magic[0] != 'S' || magic[1] != 'Q' || magic[2] != 'L' || magic[3] != 'H') {
        throw parse_error("not a sketch file (bad magic)");
    }
    SketchFile file;
    file.family.scheme = static_cast<Scheme>(get<std::uint8_t>(in));
    file.family.h = static_cast<int>(get<std::uint32_t>(in));
    file.family.seed = get<std::uint64_t>(in);
    const auto count = get<std::uint64_t>(in);
    const std::size_t words = file.family.scheme == Scheme::MinHash
                                  ? static_cast<std::size_t>(file.family.h)
                                  : static_cast<std::size_t>(file.family.h) / 64;
    file.ids.reserve(count);
    file.signatures.reserve(count);
    for (std::uint64_t i = 0; i < count; ++i) {
        file.ids.push_back(get<std::uint64_t>(in));
        Signature sig{file.family.scheme, file.family.h, {}};
        sig.values.resize(words);
        for (std::size_t j = 0; j < words; ++j) {
            sig.values[j] = get<std::uint64_t>(in);
        }
        file.signatures.push_back(std::move(sig));
    }
    return file;
}

void write_sketches(const std::string& path, const SketchFile& file) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw parse_error("cannot open " + path + " for writing");
    write_sketches(out, file);
}

SketchFile read_sketches(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw parse_error("cannot open " + path);
    return read_sketches(in);
}

} // namespace seqlsh
