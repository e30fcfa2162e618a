#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace seqlsh {

// Boundaries of Wald's SPRT for H0: s = t-tau vs H1: s = t+tau, expressed as
// two parallel lines in (n, m) space. The continuation region is
// intercept_low + n*slope < m < intercept_high + n*slope.
struct SprtBoundaries {
    double s0 = 0.0;
    double s1 = 0.0;
    double alpha = 0.0;
    double beta = 0.0;
    double intercept_low = 0.0;
    double intercept_high = 0.0;
    double slope = 0.0;
};

SprtBoundaries sprt_boundaries(double t, double tau, double alpha, double beta);

enum class SprtDecision {
    ConcludeAbove, // s >= t: keep the pair
    ConcludeBelow, // s < t: prune
    Continue
};

// Decision reported in the original orientation (H0: s >= t).
SprtDecision sprt_step(const SprtBoundaries& bounds, long m, long n);

// Wald stopping rule with smoothing: stop iff z * sqrt(sa*(1-sa)/n) <= w
// where sa = (m+a)/(n+2a). The two-sided rule passes z_{lambda/2} for z.
bool wald_stop(long m, long n, double lambda, double w, double a);
bool wald_stop_z(long m, long n, double z, double w, double a);

// A reachable stopping point of a synthesized plan, with the number of
// match/mismatch paths that end there without stopping earlier.
struct StopPoint {
    int m = 0;
    int n = 0;
    long double paths = 0.0;
    double log_paths = 0.0;
};

// Synthesized sequential test: all state needed to execute per-pair decisions.
struct StoppingPlan {
    double width = 0.0;  // w (one-sided) or delta (two-sided)
    double lambda = 0.0;
    double alpha = 0.0;  // target level the plan was calibrated for
    int batch = 32;
    int horizon = 256;
    double smoothing = 4.0;
    bool two_sided = false;
    bool attainable = true;
    double coverage_probability = 0.0;
    double z = 0.0; // stopping-rule quantile for lambda
    std::vector<StopPoint> points;
};

// Reachable stopping points for the Wald rule checked at multiples of b,
// with every reachable (m, h) forced. Requires b | h.
std::vector<std::pair<int, int>> enumerate_stops(double lambda, double w, int b, int h,
                                                 double a, bool two_sided = false);

// H(m,n) path counts avoiding the given stopping points at earlier n
// (paths may end on one). Table indexed [n][m], n in 1..h.
std::vector<std::vector<long double>> path_counts(const std::vector<std::pair<int, int>>& points,
                                                  int h);

// Worst-case coverage CP = min_s T(s, lambda), evaluated at the indicator
// jump points +/- 1e-10 (piecewise-polynomial minimization).
double coverage(const StoppingPlan& plan);

// T(s, lambda) for one s.
double coverage_at(const StoppingPlan& plan, double s);

StoppingPlan synthesize_plan(double lambda, double width, int b, int h, double a, double alpha,
                             bool two_sided = false);

// Bisection on lambda in [1e-6, alpha] for the largest lambda whose coverage
// is still >= 1-alpha (conservative endpoint). Plans that cannot reach the
// coverage within the horizon come back with attainable = false.
StoppingPlan calibrate_lambda(double alpha, double w, int b, int h, double a,
                              bool two_sided = false);

enum class PruneOutcome { Pruned, KeptForExact, Truncated };

struct PruneVerdict {
    PruneOutcome outcome = PruneOutcome::Truncated;
    int n_used = 0;
    int m = 0;
};

// Streaming source of hash-match counts; count(from, upto) must be callable
// for 0 <= from < upto <= available.
struct MatchSource {
    std::function<int(int, int)> count;
    int available = 0;
};

// Consume batches until a stopping point; prune iff min(s_hat + w, 1) < t.
// (m0, n0) carries counts already consumed (first-batch reuse).
PruneVerdict ci_ht_decide(const StoppingPlan& plan, double t, const MatchSource& src, int m0 = 0,
                          int n0 = 0);

// SPRT executed at batch boundaries, truncated at the horizon.
PruneVerdict sprt_decide(const SprtBoundaries& bounds, double t, int batch, int horizon,
                         const MatchSource& src, int m0 = 0, int n0 = 0);

// Width heuristic from the first-batch crude estimate; <= 0 means the pair
// cannot be width-tested.
double choose_width(double t, double s_first_batch, double epsilon);

class PlanCache {
  public:
    static std::vector<double> default_grid(); // 0.05, 0.08, ..., 0.65

    static PlanCache build(double alpha, int b, int h, double a,
                           const std::vector<double>& grid);

    // Plan with the largest attainable cached width <= w, or nullptr.
    const StoppingPlan* lookup(double w) const;

    const std::vector<StoppingPlan>& plans() const { return plans_; }
    double alpha() const { return alpha_; }
    int batch() const { return batch_; }
    int horizon() const { return horizon_; }
    double smoothing() const { return smoothing_; }
    const std::vector<double>& grid() const { return grid_; }

  private:
    double alpha_ = 0.0;
    int batch_ = 0;
    int horizon_ = 0;
    double smoothing_ = 0.0;
    std::vector<double> grid_;
    std::vector<StoppingPlan> plans_; // sorted by width ascending

    friend class PlanSidecar;
};

// Hybrid dispatcher: CI-based test when the per-pair width clears mu,
// SPRT otherwise. First-batch counts seed the chosen test.
PruneVerdict hybrid_decide(const PlanCache& cache, const SprtBoundaries& sprt, double mu, double t,
                           double epsilon, const MatchSource& src);

// Pure-strategy runners used by the evaluation harness.
PruneVerdict sprt_only_decide(const SprtBoundaries& bounds, double t, int batch, int horizon,
                              const MatchSource& src);
PruneVerdict ci_only_decide(const PlanCache& cache, double t, double epsilon, int batch,
                            int horizon, const MatchSource& src);

// Versioned binary sidecar holding calibrated lambdas so repeated runs skip
// bisection; invalidated whenever the key parameters change.
class PlanSidecar {
  public:
    struct TwoSidedRecord {
        double gamma = 0.0;
        double delta = 0.0;
        double t = 0.0;
        int batch = 0;
        int horizon = 0;
        double smoothing = 0.0;
        double lambda = 0.0;
        bool attainable = true;
    };

    // Loads the cache from `path` when the key matches, otherwise calibrates
    // and rewrites the file. An empty path always calibrates in memory.
    static PlanCache load_or_build(const std::string& path, double alpha, int b, int h, double a,
                                   const std::vector<double>& grid);

    static bool find_two_sided(const std::string& path, const TwoSidedRecord& key,
                               TwoSidedRecord& out);
    static void append_two_sided(const std::string& path, const TwoSidedRecord& rec);
};

} // namespace seqlsh
