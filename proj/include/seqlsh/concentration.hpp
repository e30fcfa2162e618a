#pragma once

#include "seqlsh/seqtest.hpp"

namespace seqlsh {

// Two-sided fixed-width sequential CI plan for sketch-only similarity
// estimation, optionally truncated to the threshold-aware horizon n_max.
struct EstimationPlan {
    double delta = 0.05;
    double gamma = 0.03;
    StoppingPlan plan;        // two_sided = true
    int n_max = 0;            // = horizon until truncate_plan is applied
    bool truncated = false;

    bool attainable() const { return plan.attainable; }
};

struct SimEstimate {
    double s_hat = 0.0;
    double half_width = 0.0;
    int n_used = 0;
    bool accepted = false;
    bool at_horizon = false; // forced stop before the Wald rule fired
};

// Same calibration machinery as the one-sided test with the two-sided
// stopping rule (z_{lambda/2}) and coverage indicator |s - m/n| <= delta.
EstimationPlan calibrate_two_sided(double gamma, double delta, int b, int h, double a);

// Keep only stopping points reachable by pairs that can still report an
// estimate >= t - delta; n_max = max n_i over points with m_i/n_i >= t-delta.
EstimationPlan truncate_plan(const EstimationPlan& plan, double t);

// Consume batches to a stopping point (or n_max); accepted iff s_hat >= t.
SimEstimate estimate(const EstimationPlan& plan, double t, const MatchSource& src);

} // namespace seqlsh
