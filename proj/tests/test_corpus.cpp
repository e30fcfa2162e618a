#include <doctest.h>

#include "seqlsh/corpus.hpp"
#include "seqlsh/errors.hpp"

#include <cmath>
#include <sstream>
#include <unordered_map>

using namespace seqlsh;

TEST_CASE("ingest set and weighted formats") {
    std::stringstream set_in("7\t1 5 9\n8\t2 3\n");
    const auto sets = ingest(set_in, CorpusFormat::SetTsv);
    REQUIRE(sets.size() == 2);
    CHECK(sets[0].id == 7);
    REQUIRE(sets[0].entries.size() == 3);
    CHECK(sets[0].entries[1].first == 5);
    CHECK(sets[0].entries[1].second == 1.0);

    std::stringstream w_in("3\t2:0.5 4:1.5\n");
    const auto weighted = ingest(w_in, CorpusFormat::WeightedTsv);
    REQUIRE(weighted.size() == 1);
    CHECK(weighted[0].entries[0].second == doctest::Approx(0.5));
    CHECK(weighted[0].entries[1].second == doctest::Approx(1.5));
}

TEST_CASE("parse errors carry the line number") {
    std::stringstream dup("1\t3 4\n2\t5 5\n");
    try {
        ingest(dup, CorpusFormat::SetTsv);
        FAIL("expected parse_error");
    } catch (const parse_error& e) {
        CHECK(std::string(e.what()).find("2") != std::string::npos);
    }
    std::stringstream garbage("1\tx y\n");
    CHECK_THROWS_AS(ingest(garbage, CorpusFormat::SetTsv), parse_error);
}

TEST_CASE("ingest/write round trip is canonical") {
    // Unsorted dims on input: ingest canonicalizes them.
    std::stringstream in("1\t9 2 5\n2\t4 1\n");
    const auto sets = ingest(in, CorpusFormat::SetTsv);
    std::stringstream out;
    write_corpus(out, sets, CorpusFormat::SetTsv);
    std::stringstream again(out.str());
    const auto back = ingest(again, CorpusFormat::SetTsv);
    REQUIRE(back.size() == sets.size());
    for (std::size_t i = 0; i < sets.size(); ++i) {
        CHECK(back[i].id == sets[i].id);
        CHECK(back[i].entries == sets[i].entries);
    }
}

TEST_CASE("synth plants exact similarities deterministically") {
    SynthSpec spec;
    spec.measure = Measure::Jaccard;
    spec.levels = {{0.5, 10}, {0.8, 10}};
    spec.noise_vectors = 30;
    spec.seed = 99;
    const auto r1 = synth(spec);
    const auto r2 = synth(spec);
    REQUIRE(r1.planted.size() == 20);
    CHECK(r1.corpus.size() == 70);
    for (std::size_t i = 0; i < r1.corpus.size(); ++i) {
        CHECK(r1.corpus[i].entries == r2.corpus[i].entries); // deterministic
    }
    std::unordered_map<std::uint64_t, const SparseVector*> by_id;
    for (const auto& v : r1.corpus) by_id[v.id] = &v;
    for (const auto& p : r1.planted) {
        const double j = jaccard_similarity(*by_id.at(p.a), *by_id.at(p.b));
        CHECK(j == doctest::Approx(p.similarity).epsilon(1e-12));
    }

    SynthSpec cos = spec;
    cos.measure = Measure::Cosine;
    cos.levels = {{0.7, 10}};
    const auto rc = synth(cos);
    std::unordered_map<std::uint64_t, const SparseVector*> cos_by_id;
    for (const auto& v : rc.corpus) cos_by_id[v.id] = &v;
    for (const auto& p : rc.planted) {
        const double c = cosine_similarity(*cos_by_id.at(p.a), *cos_by_id.at(p.b));
        CHECK(c == doctest::Approx(p.similarity).epsilon(1e-9));
        CHECK(std::fabs(p.similarity - 0.7) < 1e-6);
    }
}

TEST_CASE("oracle_allpairs basics") {
    SparseVector a, b, c;
    a.id = 1;
    b.id = 2;
    c.id = 3;
    for (std::uint32_t d : {1u, 2u}) {
        a.entries.emplace_back(d, 1.0);
        b.entries.emplace_back(d, 1.0);
    }
    c.entries.emplace_back(9, 1.0);
    const auto pairs = oracle_allpairs({a, b, c}, 0.5, Measure::Jaccard);
    REQUIRE(pairs.size() == 1);
    CHECK(pairs[0].a == 1);
    CHECK(pairs[0].b == 2);
    CHECK(pairs[0].similarity == doctest::Approx(1.0));
    CHECK(oracle_allpairs({a, c}, 0.01, Measure::Jaccard).empty()); // disjoint
}
