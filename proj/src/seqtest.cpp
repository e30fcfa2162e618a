#include "seqlsh/seqtest.hpp"

#include "seqlsh/errors.hpp"
#include "seqlsh/normal.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <unordered_set>

namespace seqlsh {

namespace {

void check_batching(int b, int h) {
    if (b <= 0 || h <= 0 || h % b != 0) {
        throw config_error("batch size must be positive and divide the horizon");
    }
}

double rule_quantile(double lambda, bool two_sided) {
    return upper_quantile(two_sided ? lambda / 2.0 : lambda);
}

constexpr double kJumpEps = 1e-10;

std::uint64_t point_key(int m, int n) {
    return (static_cast<std::uint64_t>(m) << 32) | static_cast<std::uint32_t>(n);
}

} // namespace

SprtBoundaries sprt_boundaries(double t, double tau, double alpha, double beta) {
    const double s0 = t - tau;
    const double s1 = t + tau;
    if (!(s0 > 0.0 && s1 < 1.0 && s0 < s1)) {
        throw config_error("sprt_boundaries: t +/- tau must lie strictly inside (0,1)");
    }
    if (!(alpha > 0.0 && alpha < 0.5 && beta > 0.0 && beta < 0.5)) {
        throw config_error("sprt_boundaries: alpha and beta must lie in (0, 0.5)");
    }
    const double denom = std::log(s1 / s0) - std::log((1.0 - s1) / (1.0 - s0));
    SprtBoundaries bounds;
    bounds.s0 = s0;
    bounds.s1 = s1;
    bounds.alpha = alpha;
    bounds.beta = beta;
    bounds.slope = std::log((1.0 - s0) / (1.0 - s1)) / denom;
    bounds.intercept_low = std::log(alpha / (1.0 - beta)) / denom;
    bounds.intercept_high = std::log((1.0 - alpha) / beta) / denom;
    return bounds;
}

SprtDecision sprt_step(const SprtBoundaries& bounds, long m, long n) {
    const double base = static_cast<double>(n) * bounds.slope;
    if (static_cast<double>(m) >= bounds.intercept_high + base) {
        return SprtDecision::ConcludeAbove;
    }
    if (static_cast<double>(m) <= bounds.intercept_low + base) {
        return SprtDecision::ConcludeBelow;
    }
    return SprtDecision::Continue;
}

bool wald_stop_z(long m, long n, double z, double w, double a) {
    const double sa = (static_cast<double>(m) + a) / (static_cast<double>(n) + 2.0 * a);
    return z * std::sqrt(sa * (1.0 - sa) / static_cast<double>(n)) <= w;
}

bool wald_stop(long m, long n, double lambda, double w, double a) {
    return wald_stop_z(m, n, upper_quantile(lambda), w, a);
}

std::vector<std::pair<int, int>> enumerate_stops(double lambda, double w, int b, int h, double a,
                                                 bool two_sided) {
    check_batching(b, h);
    const double z = rule_quantile(lambda, two_sided);

    std::vector<std::pair<int, int>> points;
    // Rolling H(., n); reachability and stopping interact, so both are
    // tracked in one pass. Stops are only checked at batch boundaries.
    std::vector<long double> cur(static_cast<std::size_t>(h) + 1, 0.0L);
    cur[0] = 1.0L;
    cur[1] = 1.0L;
    for (int n = 1; n <= h; ++n) {
        std::vector<bool> stops(static_cast<std::size_t>(n) + 1, false);
        const bool boundary = (n % b == 0);
        for (int m = 0; m <= n; ++m) {
            if (cur[static_cast<std::size_t>(m)] <= 0.0L) continue;
            const bool fires = boundary && wald_stop_z(m, n, z, w, a);
            if (fires || n == h) {
                points.emplace_back(m, n);
                stops[static_cast<std::size_t>(m)] = true;
            }
        }
        if (n == h) break;
        std::vector<long double> next(static_cast<std::size_t>(h) + 1, 0.0L);
        for (int m = 0; m <= n; ++m) {
            const long double paths = cur[static_cast<std::size_t>(m)];
            if (paths <= 0.0L || stops[static_cast<std::size_t>(m)]) continue;
            next[static_cast<std::size_t>(m)] += paths;
            next[static_cast<std::size_t>(m) + 1] += paths;
        }
        cur.swap(next);
    }
    return points;
}

std::vector<std::vector<long double>> path_counts(const std::vector<std::pair<int, int>>& points,
                                                  int h) {
    std::unordered_set<std::uint64_t> stopset;
    stopset.reserve(points.size() * 2);
    for (const auto& [m, n] : points) {
        stopset.insert(point_key(m, n));
    }
    std::vector<std::vector<long double>> table(static_cast<std::size_t>(h) + 1);
    for (int n = 0; n <= h; ++n) {
        table[static_cast<std::size_t>(n)].assign(static_cast<std::size_t>(n) + 1, 0.0L);
    }
    if (h >= 1) {
        table[1][0] = 1.0L;
        table[1][1] = 1.0L;
    }
    for (int n = 1; n < h; ++n) {
        for (int m = 0; m <= n; ++m) {
            const long double paths = table[static_cast<std::size_t>(n)][static_cast<std::size_t>(m)];
            if (paths <= 0.0L || stopset.count(point_key(m, n))) continue;
            table[static_cast<std::size_t>(n) + 1][static_cast<std::size_t>(m)] += paths;
            table[static_cast<std::size_t>(n) + 1][static_cast<std::size_t>(m) + 1] += paths;
        }
    }
    return table;
}

double coverage_at(const StoppingPlan& plan, double s) {
    s = std::clamp(s, 0.0, 1.0);
    const double logs = s > 0.0 ? std::log(s) : 0.0;
    const double log1ms = s < 1.0 ? std::log1p(-s) : 0.0;
    double total = 0.0;
    for (const StopPoint& p : plan.points) {
        const double ratio = static_cast<double>(p.m) / static_cast<double>(p.n);
        const bool covered = plan.two_sided ? std::fabs(s - ratio) <= plan.width
                                            : s <= ratio + plan.width;
        if (!covered) continue;
        double term;
        if (s == 0.0) {
            term = (p.m == 0) ? static_cast<double>(p.paths) : 0.0;
        } else if (s == 1.0) {
            term = (p.m == p.n) ? static_cast<double>(p.paths) : 0.0;
        } else {
            term = std::exp(p.log_paths + p.m * logs + (p.n - p.m) * log1ms);
        }
        total += term;
    }
    return total;
}

double coverage(const StoppingPlan& plan) {
    std::vector<double> jumps;
    jumps.reserve(plan.points.size() * 3 + 2);
    jumps.push_back(0.0);
    jumps.push_back(1.0);
    for (const StopPoint& p : plan.points) {
        const double ratio = static_cast<double>(p.m) / static_cast<double>(p.n);
        jumps.push_back(ratio);
        if (plan.two_sided) {
            if (ratio + plan.width <= 1.0) jumps.push_back(ratio + plan.width);
            if (ratio - plan.width >= 0.0) jumps.push_back(ratio - plan.width);
        } else {
            if (ratio + plan.width <= 1.0) jumps.push_back(ratio + plan.width);
        }
    }
    std::sort(jumps.begin(), jumps.end());
    jumps.erase(std::unique(jumps.begin(), jumps.end()), jumps.end());

    double cp = 1.0;
    for (double c : jumps) {
        cp = std::min(cp, coverage_at(plan, c - kJumpEps));
        cp = std::min(cp, coverage_at(plan, c + kJumpEps));
    }
    return cp;
}

StoppingPlan synthesize_plan(double lambda, double width, int b, int h, double a, double alpha,
                             bool two_sided) {
    check_batching(b, h);
    StoppingPlan plan;
    plan.width = width;
    plan.lambda = lambda;
    plan.alpha = alpha;
    plan.batch = b;
    plan.horizon = h;
    plan.smoothing = a;
    plan.two_sided = two_sided;
    plan.z = rule_quantile(lambda, two_sided);

    const auto raw = enumerate_stops(lambda, width, b, h, a, two_sided);
    const auto table = path_counts(raw, h);
    plan.points.reserve(raw.size());
    for (const auto& [m, n] : raw) {
        const long double paths = table[static_cast<std::size_t>(n)][static_cast<std::size_t>(m)];
        StopPoint p;
        p.m = m;
        p.n = n;
        p.paths = paths;
        p.log_paths = static_cast<double>(std::log(paths));
        plan.points.push_back(p);
    }
    plan.coverage_probability = coverage(plan);
    return plan;
}

StoppingPlan calibrate_lambda(double alpha, double w, int b, int h, double a, bool two_sided) {
    if (!(alpha > 0.0 && alpha < 0.5)) {
        throw config_error("calibrate_lambda: alpha must be in (0, 0.5)");
    }
    const double target = 1.0 - alpha;
    double lo = 1e-6;
    double hi = alpha;

    StoppingPlan at_lo = synthesize_plan(lo, w, b, h, a, alpha, two_sided);
    if (at_lo.coverage_probability < target) {
        at_lo.attainable = false;
        return at_lo;
    }
    StoppingPlan at_hi = synthesize_plan(hi, w, b, h, a, alpha, two_sided);
    if (at_hi.coverage_probability >= target) {
        return at_hi;
    }
    // Invariant: CP(lo) >= target > CP(hi); CP is non-increasing in lambda.
    while (hi - lo > 1e-5) {
        const double mid = 0.5 * (lo + hi);
        StoppingPlan at_mid = synthesize_plan(mid, w, b, h, a, alpha, two_sided);
        if (at_mid.coverage_probability >= target) {
            lo = mid;
            at_lo = std::move(at_mid);
        } else {
            hi = mid;
        }
    }
    return at_lo;
}

PruneVerdict ci_ht_decide(const StoppingPlan& plan, double t, const MatchSource& src, int m0,
                          int n0) {
    const int b = plan.batch;
    int m = m0;
    int n = n0;
    auto decide_at_stop = [&](bool forced) -> PruneVerdict {
        const double shat = static_cast<double>(m) / static_cast<double>(n);
        const double upper = std::min(shat + plan.width, 1.0);
        if (upper < t) return {PruneOutcome::Pruned, n, m};
        if (forced) return {PruneOutcome::Truncated, n, m};
        return {PruneOutcome::KeptForExact, n, m};
    };
    if (n > 0 && n % b == 0) {
        if (wald_stop_z(m, n, plan.z, plan.width, plan.smoothing)) {
            return decide_at_stop(false);
        }
        if (n >= plan.horizon) {
            return decide_at_stop(true);
        }
    }
    while (n < plan.horizon) {
        const int upto = n + b;
        if (upto > src.available) {
            throw invariant_error("signature exhausted before a stopping point");
        }
        m += src.count(n, upto);
        n = upto;
        if (wald_stop_z(m, n, plan.z, plan.width, plan.smoothing)) {
            return decide_at_stop(false);
        }
    }
    return decide_at_stop(true);
}

PruneVerdict sprt_decide(const SprtBoundaries& bounds, double t, int batch, int horizon,
                         const MatchSource& src, int m0, int n0) {
    (void)t;
    int m = m0;
    int n = n0;
    if (n > 0) {
        switch (sprt_step(bounds, m, n)) {
            case SprtDecision::ConcludeAbove: return {PruneOutcome::KeptForExact, n, m};
            case SprtDecision::ConcludeBelow: return {PruneOutcome::Pruned, n, m};
            case SprtDecision::Continue: break;
        }
    }
    while (n < horizon) {
        const int upto = n + batch;
        if (upto > src.available) {
            throw invariant_error("signature exhausted before a stopping point");
        }
        m += src.count(n, upto);
        n = upto;
        switch (sprt_step(bounds, m, n)) {
            case SprtDecision::ConcludeAbove: return {PruneOutcome::KeptForExact, n, m};
            case SprtDecision::ConcludeBelow: return {PruneOutcome::Pruned, n, m};
            case SprtDecision::Continue: break;
        }
    }
    return {PruneOutcome::Truncated, n, m};
}

double choose_width(double t, double s_first_batch, double epsilon) {
    return t - s_first_batch - epsilon;
}

std::vector<double> PlanCache::default_grid() {
    std::vector<double> grid;
    for (int i = 0; i <= 20; ++i) {
        grid.push_back(0.05 + 0.03 * i);
    }
    return grid;
}

PlanCache PlanCache::build(double alpha, int b, int h, double a, const std::vector<double>& grid) {
    PlanCache cache;
    cache.alpha_ = alpha;
    cache.batch_ = b;
    cache.horizon_ = h;
    cache.smoothing_ = a;
    cache.grid_ = grid;
    std::vector<double> sorted = grid;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 1; i < sorted.size(); ++i) {
        if (sorted[i] <= sorted[i - 1]) {
            throw config_error("plan cache grid widths must be strictly increasing");
        }
    }
    for (double w : sorted) {
        cache.plans_.push_back(calibrate_lambda(alpha, w, b, h, a));
    }
    return cache;
}

const StoppingPlan* PlanCache::lookup(double w) const {
    const StoppingPlan* best = nullptr;
    for (const StoppingPlan& plan : plans_) {
        if (plan.width > w) break;
        if (plan.attainable) best = &plan;
    }
    return best;
}

PruneVerdict hybrid_decide(const PlanCache& cache, const SprtBoundaries& sprt, double mu, double t,
                           double epsilon, const MatchSource& src) {
    const int b = cache.batch();
    if (src.available < b) {
        throw invariant_error("signature shorter than one batch");
    }
    const int first = src.count(0, b);
    const double crude = static_cast<double>(first) / static_cast<double>(b);
    const double w = choose_width(t, crude, epsilon);
    if (w >= mu) {
        if (const StoppingPlan* plan = cache.lookup(w)) {
            return ci_ht_decide(*plan, t, src, first, b);
        }
    }
    return sprt_decide(sprt, t, b, cache.horizon(), src, first, b);
}

PruneVerdict sprt_only_decide(const SprtBoundaries& bounds, double t, int batch, int horizon,
                              const MatchSource& src) {
    return sprt_decide(bounds, t, batch, horizon, src);
}

PruneVerdict ci_only_decide(const PlanCache& cache, double t, double epsilon, int batch,
                            int horizon, const MatchSource& src) {
    if (src.available < batch) {
        throw invariant_error("signature shorter than one batch");
    }
    const int first = src.count(0, batch);
    const double crude = static_cast<double>(first) / static_cast<double>(batch);
    const double w = choose_width(t, crude, epsilon);
    if (w > 0.0) {
        if (const StoppingPlan* plan = cache.lookup(w)) {
            return ci_ht_decide(*plan, t, src, first, batch);
        }
    }
    // No usable width: the rule cannot fire before the horizon, so the pair
    // consumes the whole sketch and is handed over for exact computation.
    int m = first;
    int n = batch;
    while (n < horizon) {
        const int upto = n + batch;
        if (upto > src.available) {
            throw invariant_error("signature exhausted before a stopping point");
        }
        m += src.count(n, upto);
        n = upto;
    }
    return {PruneOutcome::Truncated, n, m};
}

// ---------------------------------------------------------------------------
// Sidecar persistence

namespace {

constexpr char kCacheMagic[4] = {'S', 'Q', 'P', 'C'};
constexpr std::uint32_t kCacheVersion = 1;

struct OneSidedRecord {
    double width = 0.0;
    double lambda = 0.0;
    bool attainable = true;
};

struct CacheImage {
    double alpha = 0.0;
    std::uint32_t batch = 0;
    std::uint32_t horizon = 0;
    double smoothing = 0.0;
    std::vector<OneSidedRecord> one_sided;
    std::vector<PlanSidecar::TwoSidedRecord> two_sided;
};

template <typename T>
void put(std::ostream& out, T value) {
    out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
bool get(std::istream& in, T& value) {
    in.read(reinterpret_cast<char*>(&value), sizeof(T));
    return static_cast<bool>(in);
}

bool read_image(const std::string& path, CacheImage& image) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return false;
    char magic[4];
    in.read(magic, 4);
    if (!in || magic[0] != 'S' || magic[1] != 'Q' || magic[2] != 'P' || magic[3] != 'C') {
        return false;
    }
    std::uint32_t version = 0;
    if (!get(in, version) || version != kCacheVersion) return false;
    std::uint32_t n1 = 0, n2 = 0;
    if (!get(in, image.alpha) || !get(in, image.batch) || !get(in, image.horizon) ||
        !get(in, image.smoothing) || !get(in, n1)) {
        return false;
    }
    image.one_sided.resize(n1);
    for (auto& rec : image.one_sided) {
        std::uint8_t flag = 0;
        if (!get(in, rec.width) || !get(in, rec.lambda) || !get(in, flag)) return false;
        rec.attainable = flag != 0;
    }
    if (!get(in, n2)) return false;
    image.two_sided.resize(n2);
    for (auto& rec : image.two_sided) {
        std::uint8_t flag = 0;
        if (!get(in, rec.gamma) || !get(in, rec.delta) || !get(in, rec.t) || !get(in, rec.batch) ||
            !get(in, rec.horizon) || !get(in, rec.smoothing) || !get(in, rec.lambda) ||
            !get(in, flag)) {
            return false;
        }
        rec.attainable = flag != 0;
    }
    return true;
}

void write_image(const std::string& path, const CacheImage& image) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw parse_error("cannot open plan cache sidecar " + path + " for writing");
    }
    out.write(kCacheMagic, 4);
    put(out, kCacheVersion);
    put(out, image.alpha);
    put(out, image.batch);
    put(out, image.horizon);
    put(out, image.smoothing);
    put(out, static_cast<std::uint32_t>(image.one_sided.size()));
    for (const auto& rec : image.one_sided) {
        put(out, rec.width);
        put(out, rec.lambda);
        put<std::uint8_t>(out, rec.attainable ? 1 : 0);
    }
    put(out, static_cast<std::uint32_t>(image.two_sided.size()));
    for (const auto& rec : image.two_sided) {
        put(out, rec.gamma);
        put(out, rec.delta);
        put(out, rec.t);
        put(out, rec.batch);
        put(out, rec.horizon);
        put(out, rec.smoothing);
        put(out, rec.lambda);
        put<std::uint8_t>(out, rec.attainable ? 1 : 0);
    }
}

bool key_matches(const CacheImage& image, double alpha, int b, int h, double a,
                 const std::vector<double>& grid) {
    if (image.alpha != alpha || image.batch != static_cast<std::uint32_t>(b) ||
        image.horizon != static_cast<std::uint32_t>(h) || image.smoothing != a ||
        image.one_sided.size() != grid.size()) {
        return false;
    }
    std::vector<double> sorted = grid;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        if (image.one_sided[i].width != sorted[i]) return false;
    }
    return true;
}

} // namespace

PlanCache PlanSidecar::load_or_build(const std::string& path, double alpha, int b, int h, double a,
                                     const std::vector<double>& grid) {
    if (!path.empty()) {
        CacheImage image;
        if (read_image(path, image) && key_matches(image, alpha, b, h, a, grid)) {
            PlanCache cache;
            cache.alpha_ = alpha;
            cache.batch_ = b;
            cache.horizon_ = h;
            cache.smoothing_ = a;
            cache.grid_ = grid;
            for (const auto& rec : image.one_sided) {
                StoppingPlan plan = synthesize_plan(rec.lambda, rec.width, b, h, a, alpha);
                plan.attainable = rec.attainable;
                cache.plans_.push_back(std::move(plan));
            }
            return cache;
        }
    }
    PlanCache cache = PlanCache::build(alpha, b, h, a, grid);
    if (!path.empty()) {
        CacheImage image;
        image.alpha = alpha;
        image.batch = static_cast<std::uint32_t>(b);
        image.horizon = static_cast<std::uint32_t>(h);
        image.smoothing = a;
        for (const StoppingPlan& plan : cache.plans()) {
            image.one_sided.push_back({plan.width, plan.lambda, plan.attainable});
        }
        write_image(path, image);
    }
    return cache;
}

bool PlanSidecar::find_two_sided(const std::string& path, const TwoSidedRecord& key,
                                 TwoSidedRecord& out) {
    if (path.empty()) return false;
    CacheImage image;
    if (!read_image(path, image)) return false;
    for (const auto& rec : image.two_sided) {
        if (rec.gamma == key.gamma && rec.delta == key.delta && rec.t == key.t &&
            rec.batch == key.batch && rec.horizon == key.horizon &&
            rec.smoothing == key.smoothing) {
            out = rec;
            return true;
        }
    }
    return false;
}

void PlanSidecar::append_two_sided(const std::string& path, const TwoSidedRecord& rec) {
    if (path.empty()) return;
    CacheImage image;
    if (!read_image(path, image)) return;
    image.two_sided.push_back(rec);
    write_image(path, image);
}

} // namespace seqlsh
