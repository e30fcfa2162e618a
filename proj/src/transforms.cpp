#include "seqlsh/transforms.hpp"

#include "seqlsh/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace seqlsh {

namespace {
constexpr double kPi = std::numbers::pi;
}

double cosine_to_native(double r) {
    if (!(r >= 0.0 && r <= 1.0)) {
        throw config_error("cosine_to_native: r must be in [0,1]");
    }
    return 1.0 - std::acos(r) / kPi;
}

double native_to_cosine(double s) {
    if (!(s >= 0.5 && s <= 1.0)) {
        throw config_error("native_to_cosine: s must be in [0.5, 1]");
    }
    return std::cos(kPi * (1.0 - s));
}

double transform_threshold(double t_user, Measure measure) {
    if (measure == Measure::Jaccard) return t_user;
    return cosine_to_native(t_user);
}

double solve_delta_s(double delta_user) {
    if (!(delta_user > 0.0 && delta_user < 0.5)) {
        throw config_error("solve_delta_s: delta must be in (0, 0.5)");
    }
    // Interval width in cosine scale around s_hat = 0.5 (the worst case):
    // cos(pi*(1 - min(1, 0.5 + d))) - cos(pi*(1 - max(0.5, 0.5 - d))).
    auto width = [](double d) {
        const double upper = std::cos(kPi * (1.0 - std::min(1.0, 0.5 + d)));
        const double lower = std::cos(kPi * (1.0 - std::max(0.5, 0.5 - d)));
        return upper - lower;
    };
    const double target = 2.0 * delta_user;
    double lo = 0.0, hi = 0.5;
    if (width(hi) <= target) return hi;
    while (hi - lo > 1e-9) {
        const double mid = 0.5 * (lo + hi);
        if (width(mid) <= target) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return lo;
}

} // namespace seqlsh
