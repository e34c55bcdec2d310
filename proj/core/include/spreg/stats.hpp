#pragma once

#include <span>
#include <vector>

namespace spreg {

/// Type-7 (linear interpolation) empirical quantile of an unsorted sample.
double empirical_quantile(std::span<const double> values, double p);

/// Same on data already sorted ascending.
double sorted_quantile(std::span<const double> sorted, double p);

/// Kolmogorov-Smirnov distance between the sample and the standard normal.
double ks_distance_std_normal(std::span<const double> values);

double sample_mean(std::span<const double> values);

}  // namespace spreg
