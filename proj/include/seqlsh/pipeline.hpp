#pragma once

#include "seqlsh/candidates.hpp"
#include "seqlsh/concentration.hpp"
#include "seqlsh/seqtest.hpp"
#include "seqlsh/sketches.hpp"
#include "seqlsh/sparse_vector.hpp"
#include "seqlsh/transforms.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace seqlsh {

enum class Mode { Exact, Sketch };

struct RunConfig {
    Measure measure = Measure::Jaccard;
    Mode mode = Mode::Exact;
    double threshold = 0.7; // user scale
    double alpha = 0.03;
    double tau = -1.0;   // auto: 0.025 in Exact mode, 0.015 in Sketch mode
    double epsilon = 0.01;
    double mu = 0.18;
    double delta = 0.05;
    double gamma = -1.0; // auto: alpha
    int batch = 32;
    int horizon = 256;
    double smoothing = 4.0;
    int band_k = 0;     // auto: 4, reduced until l*k fits the signature
    double phi = 0.03;
    std::uint64_t seed = 1;
    bool fresh_hashes = false; // reserve banding hashes away from the tests
    int threads = 1;
    std::string plan_cache_path;
    bool keep_pair_log = false;

    double effective_tau() const { return tau > 0.0 ? tau : (mode == Mode::Exact ? 0.025 : 0.015); }
    double effective_gamma() const { return gamma > 0.0 ? gamma : alpha; }
};

enum class Provenance { ExactComputed, SketchEstimated };

struct ResultPair {
    std::uint64_t a = 0;
    std::uint64_t b = 0;
    double similarity = 0.0; // user scale
    Provenance provenance = Provenance::ExactComputed;
    int n_used = 0;
    bool estimate_at_horizon = false;
};

struct PairLogEntry {
    std::uint64_t a = 0;
    std::uint64_t b = 0;
    PruneOutcome prune = PruneOutcome::Truncated;
    int prune_n = 0;
    int estimate_n = 0;
    bool emitted = false;
    double similarity = 0.0;
};

struct RunReport {
    std::size_t candidates = 0;
    std::size_t pruned = 0;
    std::size_t kept_exact = 0;
    std::size_t truncated = 0;
    std::size_t emitted = 0;
    long long total_hash_comparisons = 0;
    double wall_ms = 0.0;
    int band_k = 0;
    int band_l = 0;
    std::vector<std::string> notes;
    std::vector<PairLogEntry> pair_log; // filled when keep_pair_log
};

struct RunResult {
    std::vector<ResultPair> results; // sorted by (a, b)
    RunReport report;
};

// End-to-end all-pairs search. Exact mode: prefix-filter candidates, hybrid
// prune, exact verification. Sketch mode: banding candidates, hybrid prune,
// two-sided CI estimate.
RunResult run(const RunConfig& config, const std::vector<SparseVector>& corpus);

} // namespace seqlsh
