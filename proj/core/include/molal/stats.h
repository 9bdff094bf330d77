// Copyright 2026 The molal Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef MOLAL_STATS_H_
#define MOLAL_STATS_H_

#include <span>

namespace molal::stats {

double mean(std::span<const double> x);

// Sample standard deviation (n - 1 denominator); 0 for fewer than 2 values.
double sample_std(std::span<const double> x);

// Population variance (n denominator).
double population_variance(std::span<const double> x);

// Quantile with linear interpolation between order statistics
// (position q * (n - 1) in the sorted sample). q in [0, 1].
double quantile(std::span<const double> x, double q);

// Pearson correlation. Returns NaN when either side has zero variance.
double pearson(std::span<const double> x, std::span<const double> y);

}  // namespace molal::stats

#endif  // MOLAL_STATS_H_
