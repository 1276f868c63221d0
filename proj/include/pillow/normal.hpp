#pragma once

namespace pillow {

/// Standard normal distribution function Φ.
double normal_cdf(double x);

/// Standard normal density φ.
double normal_pdf(double x);

/// Φ⁻¹(p). Returns −inf at p = 0 and +inf at p = 1; NaN outside [0,1].
double normal_quantile(double p);

}  // namespace pillow
