// Copyright 2026 The molal Authors
// SPDX-License-Identifier: Apache-2.0

#include "molal/stats.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "molal/error.h"

namespace molal::stats {

double mean(std::span<const double> x) {
  if (x.empty())
    return std::numeric_limits<double>::quiet_NaN();
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double sample_std(std::span<const double> x) {
  if (x.size() < 2)
    return 0.0;
  const double m = mean(x);
  double ss = 0.0;
  for (double v: x)
    ss += (v - m) * (v - m);
  return std::sqrt(ss / static_cast<double>(x.size() - 1));
}

double population_variance(std::span<const double> x) {
  if (x.empty())
    return 0.0;
  const double m = mean(x);
  double ss = 0.0;
  for (double v: x)
    ss += (v - m) * (v - m);
  return ss / static_cast<double>(x.size());
}

double quantile(std::span<const double> x, double q) {
  if (x.empty())
    return std::numeric_limits<double>::quiet_NaN();
  if (q < 0.0 || q > 1.0)
    throw Error("quantile level outside [0, 1]");
  std::vector<double> s(x.begin(), x.end());
  std::sort(s.begin(), s.end());
  const double pos = q * static_cast<double>(s.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, s.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return s[lo] + frac * (s[hi] - s[lo]);
}

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size())
    throw Error("pearson: length mismatch");
  const double mx = mean(x), my = mean(y);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0)
    return std::numeric_limits<double>::quiet_NaN();
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace molal::stats
