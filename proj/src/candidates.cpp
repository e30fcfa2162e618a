#include "seqlsh/candidates.hpp"

#include "seqlsh/errors.hpp"
#include "seqlsh/hashing.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

namespace seqlsh {

int compute_l(double t, int k, double phi) {
    if (!(t > 0.0 && t < 1.0) || k < 1 || !(phi > 0.0 && phi < 1.0)) {
        throw config_error("compute_l: need t in (0,1), k >= 1, phi in (0,1)");
    }
    const double tk = std::pow(t, k);
    if (tk >= 1.0) {
        throw config_error("compute_l: t^k must be < 1");
    }
    return static_cast<int>(std::ceil(std::log(phi) / std::log(1.0 - tk)));
}

BandingIndex::BandingIndex(int k, int l, int h) : k_(k), l_(l), h_(h) {
    if (k < 1 || l < 1) {
        throw config_error("banding needs k >= 1 and l >= 1");
    }
    if (l * k > h) {
        throw config_error("signature too short; increase h or reduce k*l");
    }
    buckets_.resize(static_cast<std::size_t>(l));
}

std::uint64_t BandingIndex::band_key(const Signature& sig, int band) const {
    std::uint64_t key = 0x243f6a8885a308d3ULL;
    const int base = band * k_;
    if (sig.scheme == Scheme::MinHash) {
        for (int i = 0; i < k_; ++i) {
            key = combine(key, sig.values[static_cast<std::size_t>(base + i)]);
        }
    } else {
        std::uint64_t bits = 0;
        for (int i = 0; i < k_; ++i) {
            bits = (bits << 1) | (sig.bit(base + i) ? 1u : 0u);
        }
        key = combine(key, bits);
    }
    return key;
}

void BandingIndex::insert(std::uint64_t id, const Signature& sig) {
    if (sig.h < k_ * l_) {
        throw config_error("signature too short; increase h or reduce k*l");
    }
    for (int band = 0; band < l_; ++band) {
        buckets_[static_cast<std::size_t>(band)][band_key(sig, band)].push_back(id);
    }
}

std::vector<CandidatePair> BandingIndex::pairs() const {
    std::vector<CandidatePair> out;
    for (const auto& band : buckets_) {
        for (const auto& [key, ids] : band) {
            (void)key;
            if (ids.size() < 2) continue;
            for (std::size_t i = 0; i < ids.size(); ++i) {
                for (std::size_t j = i + 1; j < ids.size(); ++j) {
                    std::uint64_t a = ids[i], b = ids[j];
                    if (a == b) continue;
                    if (a > b) std::swap(a, b);
                    out.push_back({a, b});
                }
            }
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

namespace {

std::vector<CandidatePair> jaccard_candidates(const std::vector<SparseVector>& corpus, double t) {
    // index[d] -> positions of vectors whose prefix contains dimension d
    std::unordered_map<std::uint32_t, std::vector<std::size_t>> index;
    std::vector<CandidatePair> out;
    std::unordered_set<std::size_t> hits;
    for (std::size_t yi = 0; yi < corpus.size(); ++yi) {
        const SparseVector& y = corpus[yi];
        hits.clear();
        for (const auto& [d, w] : y.entries) {
            (void)w;
            auto it = index.find(d);
            if (it == index.end()) continue;
            for (std::size_t xi : it->second) {
                const std::size_t sx = corpus[xi].size();
                const std::size_t sy = y.size();
                // J >= t forces min(|x|,|y|) >= t * max(|x|,|y|).
                if (static_cast<double>(std::min(sx, sy)) <
                    t * static_cast<double>(std::max(sx, sy))) {
                    continue;
                }
                hits.insert(xi);
            }
        }
        for (std::size_t xi : hits) {
            std::uint64_t a = corpus[xi].id, b = y.id;
            if (a > b) std::swap(a, b);
            out.push_back({a, b});
        }
        // J >= t requires overlap >= ceil(t*|y|); skipping the last
        // ceil(t*|y|)-1 dims cannot hide every shared dimension.
        const std::size_t needed =
            static_cast<std::size_t>(std::ceil(t * static_cast<double>(y.size())));
        const std::size_t prefix = y.size() - (needed > 0 ? needed - 1 : 0);
        for (std::size_t i = 0; i < prefix; ++i) {
            index[y.entries[i].first].push_back(yi);
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::vector<CandidatePair> cosine_candidates(const std::vector<SparseVector>& corpus, double t) {
    // Unit-normalized weights and per-dimension corpus maxima.
    std::vector<std::vector<double>> unit(corpus.size());
    std::unordered_map<std::uint32_t, double> maxw;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        double norm = 0.0;
        for (const auto& [d, w] : corpus[i].entries) {
            (void)d;
            norm += w * w;
        }
        norm = std::sqrt(norm);
        unit[i].reserve(corpus[i].size());
        for (const auto& [d, w] : corpus[i].entries) {
            const double u = norm > 0.0 ? w / norm : 0.0;
            unit[i].push_back(u);
            auto [it, inserted] = maxw.try_emplace(d, u);
            if (!inserted && u > it->second) it->second = u;
        }
    }

    std::unordered_map<std::uint32_t, std::vector<std::size_t>> index;
    std::vector<CandidatePair> out;
    std::unordered_set<std::size_t> hits;
    for (std::size_t yi = 0; yi < corpus.size(); ++yi) {
        const SparseVector& y = corpus[yi];
        hits.clear();
        for (const auto& [d, w] : y.entries) {
            (void)w;
            auto it = index.find(d);
            if (it == index.end()) continue;
            for (std::size_t xi : it->second) {
                hits.insert(xi);
            }
        }
        for (std::size_t xi : hits) {
            std::uint64_t a = corpus[xi].id, b = y.id;
            if (a > b) std::swap(a, b);
            out.push_back({a, b});
        }
        // Index the shortest prefix whose unindexed suffix bound
        // sum_d u_d * maxw_d falls below t; any pair sharing no indexed
        // dimension then has cosine < t.
        double suffix = 0.0;
        for (std::size_t i = 0; i < y.size(); ++i) {
            suffix += unit[yi][i] * maxw[y.entries[i].first];
        }
        for (std::size_t i = 0; i < y.size(); ++i) {
            if (suffix < t) break;
            index[y.entries[i].first].push_back(yi);
            suffix -= unit[yi][i] * maxw[y.entries[i].first];
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

} // namespace

std::vector<CandidatePair> exact_candidates(const std::vector<SparseVector>& corpus, double t,
                                            Measure measure) {
    return measure == Measure::Jaccard ? jaccard_candidates(corpus, t)
                                       : cosine_candidates(corpus, t);
}

} // namespace seqlsh
