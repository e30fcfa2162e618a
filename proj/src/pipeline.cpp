#include "seqlsh/pipeline.hpp"

#include "seqlsh/errors.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <thread>
#include <unordered_map>

namespace seqlsh {

namespace {

struct BandChoice {
    int k = 0;
    int l = 0;
};

// Largest k (starting from the scheme default) whose banding fits the budget.
BandChoice choose_bands(double t_native, int preferred_k, double phi, int budget) {
    for (int k = preferred_k; k >= 1; --k) {
        const int l = compute_l(t_native, k, phi);
        if (l * k <= budget) return {k, l};
    }
    throw config_error("signature too short; increase h or reduce k*l");
}

struct PerPair {
    std::vector<ResultPair> results;
    std::vector<PairLogEntry> log;
    std::size_t pruned = 0;
    std::size_t kept_exact = 0;
    std::size_t truncated = 0;
    long long comparisons = 0;
};

} // namespace

RunResult run(const RunConfig& config, const std::vector<SparseVector>& corpus) {
    const auto t_start = std::chrono::steady_clock::now();

    if (!(config.threshold > 0.0 && config.threshold < 1.0)) {
        throw config_error("threshold must be in (0,1)");
    }
    if (config.batch <= 0 || config.horizon % config.batch != 0) {
        throw config_error("batch must divide horizon");
    }
    std::unordered_map<std::uint64_t, std::size_t> by_id;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        corpus[i].validate();
        if (!by_id.emplace(corpus[i].id, i).second) {
            throw config_error("duplicate vector id " + std::to_string(corpus[i].id));
        }
    }

    RunResult out;
    RunReport& report = out.report;

    const double t_user = config.threshold;
    const double t_native = transform_threshold(t_user, config.measure);
    const double tau = config.effective_tau();
    const double gamma = config.effective_gamma();

    HashFamily family;
    family.scheme = config.measure == Measure::Jaccard ? Scheme::MinHash : Scheme::SimHash;
    family.seed = config.seed;
    family.h = config.horizon;

    std::vector<Signature> signatures;
    signatures.reserve(corpus.size());
    for (const auto& v : corpus) {
        signatures.push_back(sign(v, family));
    }

    // Candidate generation.
    std::vector<CandidatePair> candidates;
    int test_offset = 0;
    if (config.mode == Mode::Exact) {
        candidates = exact_candidates(corpus, t_user, config.measure);
    } else {
        const int preferred_k =
            config.band_k > 0 ? config.band_k
                              : (family.scheme == Scheme::MinHash ? 4 : 16);
        const int budget = config.fresh_hashes ? config.horizon / 2 : config.horizon;
        const BandChoice bands = choose_bands(t_native, preferred_k, config.phi, budget);
        if (config.band_k > 0 && bands.k != config.band_k) {
            report.notes.push_back("band width reduced to k=" + std::to_string(bands.k) +
                                   " to fit the signature");
        }
        report.band_k = bands.k;
        report.band_l = bands.l;
        BandingIndex index(bands.k, bands.l, config.horizon);
        for (std::size_t i = 0; i < corpus.size(); ++i) {
            index.insert(corpus[i].id, signatures[i]);
        }
        candidates = index.pairs();
        if (config.fresh_hashes) {
            test_offset = index.reserved_hashes();
        }
    }
    report.candidates = candidates.size();

    const int test_horizon =
        ((config.horizon - test_offset) / config.batch) * config.batch;
    if (test_horizon < config.batch) {
        throw config_error("no hashes left for sequential tests; reduce banding or increase h");
    }

    // Calibrated plans, reused from the sidecar when parameters match.
    const PlanCache cache =
        PlanSidecar::load_or_build(config.plan_cache_path, config.alpha, config.batch,
                                   test_horizon, config.smoothing, PlanCache::default_grid());
    const SprtBoundaries sprt =
        sprt_boundaries(t_native, tau, config.alpha, config.alpha);

    EstimationPlan est_plan;
    if (config.mode == Mode::Sketch) {
        const double delta_native =
            config.measure == Measure::Cosine ? solve_delta_s(config.delta) : config.delta;
        PlanSidecar::TwoSidedRecord key;
        key.gamma = gamma;
        key.delta = delta_native;
        key.t = t_native;
        key.batch = config.batch;
        key.horizon = test_horizon;
        key.smoothing = config.smoothing;
        PlanSidecar::TwoSidedRecord found;
        if (PlanSidecar::find_two_sided(config.plan_cache_path, key, found)) {
            est_plan.delta = delta_native;
            est_plan.gamma = gamma;
            est_plan.plan = synthesize_plan(found.lambda, delta_native, config.batch,
                                            test_horizon, config.smoothing, gamma,
                                            /*two_sided=*/true);
            est_plan.plan.attainable = found.attainable;
            est_plan.n_max = test_horizon;
        } else {
            est_plan = calibrate_two_sided(gamma, delta_native, config.batch, test_horizon,
                                           config.smoothing);
            key.lambda = est_plan.plan.lambda;
            key.attainable = est_plan.plan.attainable;
            PlanSidecar::append_two_sided(config.plan_cache_path, key);
        }
        est_plan = truncate_plan(est_plan, t_native);
        if (!est_plan.attainable()) {
            report.notes.push_back(
                "two-sided coverage unattainable within the horizon; estimates at the horizon "
                "carry a widened advisory interval");
        }
    }

    // Pair-level phase: embarrassingly parallel over the candidate list.
    const int n_threads = std::max(1, config.threads);
    std::vector<PerPair> partials(static_cast<std::size_t>(n_threads));

    auto worker = [&](std::size_t begin, std::size_t end, PerPair& acc) {
        for (std::size_t idx = begin; idx < end; ++idx) {
            const CandidatePair& cand = candidates[idx];
            const Signature& sa = signatures[by_id.at(cand.a)];
            const Signature& sb = signatures[by_id.at(cand.b)];
            MatchSource src{
                [&sa, &sb, test_offset](int from, int upto) {
                    return match_count(sa, sb, test_offset + from, test_offset + upto);
                },
                test_horizon};
            const PruneVerdict verdict =
                hybrid_decide(cache, sprt, config.mu, t_native, config.epsilon, src);
            acc.comparisons += verdict.n_used;

            PairLogEntry log;
            log.a = cand.a;
            log.b = cand.b;
            log.prune = verdict.outcome;
            log.prune_n = verdict.n_used;

            if (verdict.outcome == PruneOutcome::Pruned) {
                ++acc.pruned;
            } else {
                if (verdict.outcome == PruneOutcome::KeptForExact) {
                    ++acc.kept_exact;
                } else {
                    ++acc.truncated;
                }
                if (config.mode == Mode::Exact) {
                    const double sim = exact_similarity(corpus[by_id.at(cand.a)],
                                                        corpus[by_id.at(cand.b)], config.measure);
                    if (sim >= t_user) {
                        acc.results.push_back({cand.a, cand.b, sim, Provenance::ExactComputed,
                                               verdict.n_used, false});
                        log.emitted = true;
                        log.similarity = sim;
                    }
                } else {
                    const SimEstimate est = estimate(est_plan, t_native, src);
                    acc.comparisons += est.n_used;
                    log.estimate_n = est.n_used;
                    if (est.accepted) {
                        double sim = est.s_hat;
                        if (config.measure == Measure::Cosine) {
                            sim = native_to_cosine(std::clamp(est.s_hat, 0.5, 1.0));
                        }
                        acc.results.push_back({cand.a, cand.b, sim, Provenance::SketchEstimated,
                                               est.n_used, est.at_horizon});
                        log.emitted = true;
                        log.similarity = sim;
                    }
                }
            }
            if (config.keep_pair_log) {
                acc.log.push_back(log);
            }
        }
    };

    if (n_threads == 1 || candidates.size() < 2 * static_cast<std::size_t>(n_threads)) {
        worker(0, candidates.size(), partials[0]);
    } else {
        std::vector<std::thread> threads;
        const std::size_t chunk = (candidates.size() + n_threads - 1) / n_threads;
        for (int i = 0; i < n_threads; ++i) {
            const std::size_t begin = std::min(candidates.size(), i * chunk);
            const std::size_t end = std::min(candidates.size(), begin + chunk);
            threads.emplace_back(worker, begin, end, std::ref(partials[static_cast<std::size_t>(i)]));
        }
        for (auto& th : threads) th.join();
    }

    for (PerPair& acc : partials) {
        report.pruned += acc.pruned;
        report.kept_exact += acc.kept_exact;
        report.truncated += acc.truncated;
        report.total_hash_comparisons += acc.comparisons;
        out.results.insert(out.results.end(), acc.results.begin(), acc.results.end());
        report.pair_log.insert(report.pair_log.end(), acc.log.begin(), acc.log.end());
    }
    std::sort(out.results.begin(), out.results.end(),
              [](const ResultPair& x, const ResultPair& y) {
                  return std::pair{x.a, x.b} < std::pair{y.a, y.b};
              });
    std::sort(report.pair_log.begin(), report.pair_log.end(),
              [](const PairLogEntry& x, const PairLogEntry& y) {
                  return std::pair{x.a, x.b} < std::pair{y.a, y.b};
              });
    report.emitted = out.results.size();
    report.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                               t_start)
                         .count();
    return out;
}

} // namespace seqlsh
