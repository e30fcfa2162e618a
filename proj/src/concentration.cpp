#include "seqlsh/concentration.hpp"

#include "seqlsh/errors.hpp"

#include <algorithm>

namespace seqlsh {

EstimationPlan calibrate_two_sided(double gamma, double delta, int b, int h, double a) {
    if (!(delta > 0.0 && delta < 0.5)) {
        throw config_error("calibrate_two_sided: delta must be in (0, 0.5)");
    }
    EstimationPlan est;
    est.delta = delta;
    est.gamma = gamma;
    est.plan = calibrate_lambda(gamma, delta, b, h, a, /*two_sided=*/true);
    est.n_max = h;
    return est;
}

EstimationPlan truncate_plan(const EstimationPlan& plan, double t) {
    const double cut = t - plan.delta;
    if (t > 1.0) {
        throw config_error("truncate_plan: threshold above 1 is infeasible");
    }
    EstimationPlan out = plan;
    if (cut <= 0.0) {
        return out; // every stopping point can still report above t - delta
    }
    int n_max = 0;
    for (const StopPoint& p : plan.plan.points) {
        const double ratio = static_cast<double>(p.m) / static_cast<double>(p.n);
        if (ratio >= cut) n_max = std::max(n_max, p.n);
    }
    if (n_max == 0) {
        throw config_error(
            "truncate_plan: no stopping point can report an estimate above t - delta; "
            "increase the horizon or lower the threshold");
    }
    out.n_max = n_max;
    out.truncated = true;
    std::erase_if(out.plan.points, [&](const StopPoint& p) {
        const double ratio = static_cast<double>(p.m) / static_cast<double>(p.n);
        return p.n > n_max && ratio < cut;
    });
    return out;
}

SimEstimate estimate(const EstimationPlan& plan, double t, const MatchSource& src) {
    const StoppingPlan& sp = plan.plan;
    const int b = sp.batch;
    const int limit = std::min(plan.n_max, sp.horizon);
    int m = 0;
    int n = 0;
    bool rule_fired = false;
    while (n < limit) {
        const int upto = n + b;
        if (upto > src.available) {
            throw invariant_error("signature exhausted before an estimation stopping point");
        }
        m += src.count(n, upto);
        n = upto;
        if (wald_stop_z(m, n, sp.z, sp.width, sp.smoothing)) {
            rule_fired = true;
            break;
        }
    }
    SimEstimate est;
    est.s_hat = static_cast<double>(m) / static_cast<double>(n);
    est.half_width = plan.delta;
    est.n_used = n;
    est.accepted = est.s_hat >= t;
    est.at_horizon = !rule_fired;
    return est;
}

} // namespace seqlsh
