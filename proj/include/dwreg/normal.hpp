#pragma once

namespace dwreg {

/// Standard normal distribution function.
double normal_cdf(double x);

/// Inverse standard normal distribution function for 0 < p < 1.
///
/// Acklam's rational approximation (relative error ~1.2e-9) followed by one
/// Halley step against erfc, which brings the absolute error below 1e-14 over
/// the whole open interval. Throws std::invalid_argument outside (0, 1).
double normal_quantile(double p);

/// Upper tail P(X >= x) of a chi-square variable with `df` degrees of freedom.
/// df = 0 is the point mass at zero.
double chi_square_sf(double x, double df);

}  // namespace dwreg
