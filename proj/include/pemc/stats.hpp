#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace pemc::stats {

double mean(std::span<const double> xs);

/// Population variance (divisor n), matching the sample-variance convention
/// used by the interval construction.
double variance(std::span<const double> xs);

double covariance(std::span<const double> xs, std::span<const double> ys);

double correlation(std::span<const double> xs, std::span<const double> ys);

double normal_cdf(double x);

/// Inverse standard normal CDF (Acklam's rational approximation + one
/// Halley refinement; absolute error well below 1e-9).
double normal_quantile(double p);

/// Two-sample Kolmogorov-Smirnov test. Returns the asymptotic p-value.
double ks_two_sample_pvalue(std::vector<double> xs, std::vector<double> ys);

}  // namespace pemc::stats
