#pragma once

#include "seqlsh/corpus.hpp"
#include "seqlsh/pipeline.hpp"

#include <string>
#include <vector>

namespace seqlsh {

enum class Strategy { SprtOnly, OneSidedCiOnly, Hybrid };

std::string strategy_name(Strategy s);

struct StrategyStats {
    Strategy strategy = Strategy::Hybrid;
    long long hash_comparisons = 0;
    std::size_t pruned = 0;
    std::size_t kept = 0;
    std::size_t truncated = 0;
    double recall = 0.0;    // emitted true pairs / oracle pairs
    double precision = 0.0; // exact verification keeps this at 1
    double type1 = 0.0;     // oracle pairs pruned / oracle pairs
    double wall_ms = 0.0;
};

struct EvalReport {
    std::size_t candidates = 0;
    std::size_t oracle_pairs = 0;
    std::vector<StrategyStats> strategies;
};

// Runs each strategy over identical candidates and signatures (shared seed):
// candidate -> sequential prune -> exact similarity for survivors. When
// `candidates` is empty the exact prefix-filter generator supplies them.
EvalReport compare_strategies(const std::vector<SparseVector>& corpus, const RunConfig& config,
                              const std::vector<Strategy>& strategies,
                              std::vector<CandidatePair> candidates = {});

} // namespace seqlsh
