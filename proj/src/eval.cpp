#include "seqlsh/eval.hpp"

#include "seqlsh/errors.hpp"

#include <algorithm>
#include <chrono>
#include <set>
#include <unordered_map>

namespace seqlsh {

std::string strategy_name(Strategy s) {
    switch (s) {
        case Strategy::SprtOnly: return "sprt";
        case Strategy::OneSidedCiOnly: return "one-sided-ci";
        case Strategy::Hybrid: return "hybrid";
    }
    return "?";
}

EvalReport compare_strategies(const std::vector<SparseVector>& corpus, const RunConfig& config,
                              const std::vector<Strategy>& strategies,
                              std::vector<CandidatePair> candidates) {
    const double t_user = config.threshold;
    const double t_native = transform_threshold(t_user, config.measure);

    HashFamily family;
    family.scheme = config.measure == Measure::Jaccard ? Scheme::MinHash : Scheme::SimHash;
    family.seed = config.seed;
    family.h = config.horizon;

    std::unordered_map<std::uint64_t, std::size_t> by_id;
    std::vector<Signature> signatures;
    signatures.reserve(corpus.size());
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        by_id.emplace(corpus[i].id, i);
        signatures.push_back(sign(corpus[i], family));
    }
    if (candidates.empty()) {
        candidates = exact_candidates(corpus, t_user, config.measure);
    }

    const auto oracle = oracle_allpairs(corpus, t_user, config.measure);
    std::set<std::pair<std::uint64_t, std::uint64_t>> oracle_set;
    for (const auto& p : oracle) oracle_set.insert({p.a, p.b});

    const PlanCache cache =
        PlanSidecar::load_or_build(config.plan_cache_path, config.alpha, config.batch,
                                   config.horizon, config.smoothing, PlanCache::default_grid());
    const SprtBoundaries sprt =
        sprt_boundaries(t_native, config.effective_tau(), config.alpha, config.alpha);

    EvalReport report;
    report.candidates = candidates.size();
    report.oracle_pairs = oracle.size();

    for (Strategy strategy : strategies) {
        const auto t0 = std::chrono::steady_clock::now();
        StrategyStats stats;
        stats.strategy = strategy;
        std::size_t true_emitted = 0;
        std::size_t oracle_pruned = 0;
        std::size_t emitted = 0;
        for (const CandidatePair& cand : candidates) {
            const Signature& sa = signatures[by_id.at(cand.a)];
            const Signature& sb = signatures[by_id.at(cand.b)];
            MatchSource src{[&sa, &sb](int from, int upto) { return match_count(sa, sb, from, upto); },
                            config.horizon};
            PruneVerdict verdict;
            switch (strategy) {
                case Strategy::SprtOnly:
                    verdict = sprt_only_decide(sprt, t_native, config.batch, config.horizon, src);
                    break;
                case Strategy::OneSidedCiOnly:
                    verdict = ci_only_decide(cache, t_native, config.epsilon, config.batch,
                                             config.horizon, src);
                    break;
                case Strategy::Hybrid:
                    verdict = hybrid_decide(cache, sprt, config.mu, t_native, config.epsilon, src);
                    break;
            }
            stats.hash_comparisons += verdict.n_used;
            const bool is_true = oracle_set.count({cand.a, cand.b}) > 0;
            if (verdict.outcome == PruneOutcome::Pruned) {
                ++stats.pruned;
                if (is_true) ++oracle_pruned;
                continue;
            }
            if (verdict.outcome == PruneOutcome::KeptForExact) {
                ++stats.kept;
            } else {
                ++stats.truncated;
            }
            const double sim = exact_similarity(corpus[by_id.at(cand.a)], corpus[by_id.at(cand.b)],
                                                config.measure);
            if (sim >= t_user) {
                ++emitted;
                if (is_true) ++true_emitted;
            }
        }
        stats.recall = oracle.empty() ? 1.0
                                      : static_cast<double>(true_emitted) /
                                            static_cast<double>(oracle.size());
        stats.precision = emitted == 0 ? 1.0
                                       : static_cast<double>(true_emitted) /
                                             static_cast<double>(emitted);
        stats.type1 = oracle.empty() ? 0.0
                                     : static_cast<double>(oracle_pruned) /
                                           static_cast<double>(oracle.size());
        stats.wall_ms =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                .count();
        report.strategies.push_back(stats);
    }
    return report;
}

} // namespace seqlsh
