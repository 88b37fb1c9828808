#pragma once

namespace fenc {

/// Standard normal CDF.
double normal_cdf(double x);

/// Upper tail 1 - Phi(x), computed without cancellation.
double normal_sf(double x);

/// Inverse of the standard normal CDF for p in (0, 1).
double normal_quantile(double p);

}  // namespace fenc
