#pragma once

#include <vector>

#include "gir/errors.hpp"

namespace gir {

double normal_cdf(double x);

/// Inverse standard normal CDF (Wichura's AS241, full double precision).
double normal_quantile(double p);

/// Upper tail of the chi-square(df) distribution via the regularized
/// incomplete gamma function; relative error below 1e-10.
double chi2_sf(double x, double df);

/// Type-7 quantile (linear interpolation of order statistics) of an
/// unsorted sample.
double quantile_type7(std::vector<double> sample, double q);

}  // namespace gir
