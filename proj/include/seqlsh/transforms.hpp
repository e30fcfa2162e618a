#pragma once

#include "seqlsh/sparse_vector.hpp"

namespace seqlsh {

// Native similarity s is the per-hash collision probability. For cosine
// similarity r (non-negative corpora, r in [0,1]) the SimHash bit-match
// probability is s = 1 - arccos(r)/pi, so s ranges over [0.5, 1].

double cosine_to_native(double r); // r in [0,1] -> s in [0.5, 1]
double native_to_cosine(double s); // s in [0.5, 1] -> r = cos(pi*(1-s))

// Identity for Jaccard; 1 - arccos(t)/pi for cosine.
double transform_threshold(double t_user, Measure measure);

// Largest delta_s such that a 2*delta_s interval around s_hat = 0.5 maps to a
// cosine interval of width at most 2*delta_user; bisection to 1e-9.
double solve_delta_s(double delta_user);

} // namespace seqlsh
