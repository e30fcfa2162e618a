#include <doctest.h>

#include "seqlsh/candidates.hpp"
#include "seqlsh/corpus.hpp"
#include "seqlsh/errors.hpp"

#include <algorithm>
#include <cmath>
#include <set>

using namespace seqlsh;

TEST_CASE("compute_l worked examples") {
    CHECK(compute_l(0.5, 1, 0.5) == 1);
    CHECK(compute_l(0.9, 4, 0.03) == 4); // ceil(3.5066/1.0676)
    // phi -> 0 grows l monotonically.
    int prev = 0;
    for (double phi : {0.3, 0.1, 0.03, 0.01, 0.001}) {
        const int l = compute_l(0.7, 4, phi);
        CHECK(l >= prev);
        prev = l;
    }
    CHECK_THROWS_AS(compute_l(1.0, 1, 0.03), config_error);
}

TEST_CASE("banding emits identical signatures and rejects short signatures") {
    HashFamily fam{Scheme::MinHash, 5, 64};
    SparseVector v;
    v.id = 1;
    for (std::uint32_t d : {1u, 2u, 3u, 4u}) v.entries.emplace_back(d, 1.0);
    const auto sig = sign(v, fam);

    BandingIndex index(4, 4, 64);
    index.insert(10, sig);
    index.insert(20, sig);
    const auto pairs = index.pairs();
    REQUIRE(pairs.size() == 1);
    CHECK(pairs[0].a == 10);
    CHECK(pairs[0].b == 20);

    CHECK_THROWS_AS(BandingIndex(16, 5, 64), config_error);
}

TEST_CASE("pair stream has no duplicates and no self-pairs") {
    HashFamily fam{Scheme::MinHash, 9, 64};
    BandingIndex index(2, 8, 64);
    // Many colliding objects: same underlying set -> same signature.
    SparseVector v;
    v.id = 0;
    for (std::uint32_t d : {7u, 8u, 9u}) v.entries.emplace_back(d, 1.0);
    const auto sig = sign(v, fam);
    for (std::uint64_t id = 0; id < 6; ++id) index.insert(id, sig);
    const auto pairs = index.pairs();
    CHECK(pairs.size() == 15); // C(6,2), each exactly once
    std::set<CandidatePair> unique(pairs.begin(), pairs.end());
    CHECK(unique.size() == pairs.size());
    for (const auto& p : pairs) CHECK(p.a < p.b);
}

TEST_CASE("banding hit rate matches 1-(1-s^k)^l") {
    // Planted J=0.9 pairs; k=4, l=4 => expected emission ~0.986.
    const int trials = 1500;
    int emitted = 0;
    for (int i = 0; i < trials; ++i) {
        // 36 shared + 2 unique each: J = 36/40 = 0.9 exactly.
        SparseVector x, y;
        x.id = 0;
        y.id = 1;
        for (std::uint32_t d = 0; d < 36; ++d) {
            x.entries.emplace_back(d, 1.0);
            y.entries.emplace_back(d, 1.0);
        }
        x.entries.emplace_back(50, 1.0);
        x.entries.emplace_back(51, 1.0);
        y.entries.emplace_back(100, 1.0);
        y.entries.emplace_back(101, 1.0);
        HashFamily fam{Scheme::MinHash, 50000u + static_cast<std::uint64_t>(i), 16};
        BandingIndex index(4, 4, 16);
        index.insert(0, sign(x, fam));
        index.insert(1, sign(y, fam));
        if (!index.pairs().empty()) ++emitted;
    }
    const double expect = 1.0 - std::pow(1.0 - std::pow(0.9, 4), 4);
    const double sigma = std::sqrt(expect * (1 - expect) / trials);
    CHECK(std::fabs(static_cast<double>(emitted) / trials - expect) < 4 * sigma + 1e-3);
}

TEST_CASE("exact candidates: trivial inclusion and exclusion") {
    SparseVector a, b, c;
    a.id = 1;
    b.id = 2;
    c.id = 3;
    for (std::uint32_t d : {1u, 2u, 3u}) {
        a.entries.emplace_back(d, 1.0);
        b.entries.emplace_back(d, 1.0);
    }
    for (std::uint32_t d : {10u, 11u, 12u}) c.entries.emplace_back(d, 1.0);

    const auto jac = exact_candidates({a, b, c}, 0.7, Measure::Jaccard);
    CHECK(std::find(jac.begin(), jac.end(), CandidatePair{1, 2}) != jac.end());
    CHECK(std::find(jac.begin(), jac.end(), CandidatePair{1, 3}) == jac.end());
    CHECK(std::find(jac.begin(), jac.end(), CandidatePair{2, 3}) == jac.end());

    SparseVector wa = a, wb = b, wc = c;
    wa.entries[0].second = 0.4;
    const auto cos = exact_candidates({wa, wb, wc}, 0.7, Measure::Cosine);
    CHECK(std::find(cos.begin(), cos.end(), CandidatePair{1, 2}) != cos.end());
    CHECK(std::find(cos.begin(), cos.end(), CandidatePair{1, 3}) == cos.end());
}

TEST_CASE("exact candidates are complete against the brute-force oracle") {
    for (Measure measure : {Measure::Jaccard, Measure::Cosine}) {
        SynthSpec spec;
        spec.measure = measure;
        spec.levels = {{0.4, 15}, {0.6, 15}, {0.8, 15}, {0.9, 15}};
        spec.noise_vectors = 80;
        spec.seed = 21;
        const auto corpus = synth(spec).corpus;
        for (double t : {0.5, 0.7}) {
            const double t_eff = measure == Measure::Cosine ? t + 0.1 : t;
            const auto cands = exact_candidates(corpus, t_eff, measure);
            std::set<CandidatePair> cand_set(cands.begin(), cands.end());
            CHECK(cand_set.size() == cands.size()); // deduplicated
            for (const auto& o : oracle_allpairs(corpus, t_eff, measure)) {
                CHECK(cand_set.count(CandidatePair{o.a, o.b}) == 1);
            }
        }
    }
}
