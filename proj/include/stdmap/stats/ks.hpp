#pragma once

// Kolmogorov-Smirnov distances.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <vector>

#include "stdmap/errors.hpp"

namespace stdmap::stats {

// CDF of N(mean, variance) through erfc, which keeps the relative error small
// in the lower tail as well.
inline double normal_cdf(double x, double variance, double mean = 0.0) {
  return 0.5 * std::erfc(-(x - mean) / std::sqrt(2.0 * variance));
}

// sup |F_M - F| over the real line for a continuous reference F.  Sorts a copy.
template <class Cdf>
double ks_statistic(std::vector<double> samples, Cdf&& cdf) {
  if (samples.empty()) throw EmptySample("KS statistic of an empty sample");
  std::sort(samples.begin(), samples.end());
  const double m = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max({d, (static_cast<double>(i) + 1.0) / m - f, f - static_cast<double>(i) / m});
  }
  return std::clamp(d, 0.0, 1.0);
}

inline double ks_normal(std::vector<double> samples, double variance) {
  return ks_statistic(std::move(samples), [variance](double x) { return normal_cdf(x, variance); });
}

// sup |F_a - F_b| between two empirical distributions.
inline double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw EmptySample("KS distance with an empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double t = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= t) ++i;
    while (j < b.size() && b[j] <= t) ++j;
    d = std::max(d, std::fabs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

}  // namespace stdmap::stats
