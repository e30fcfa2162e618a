#pragma once

namespace seqlsh {

// Standard normal CDF.
double normal_cdf(double x);

// Inverse standard normal CDF for p in (0,1).
// Rational approximation refined with one Newton step; |error| < 1e-9.
double normal_quantile(double p);

// Upper-lambda quantile: z such that P(Z > z) = lambda.
double upper_quantile(double lambda);

} // namespace seqlsh
