#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace cobweb::eval {

struct Interval {
  double low = 0.0;
  double high = 0.0;
};

// Linear-interpolation quantile of sorted data (the default method of R and
// numpy). `sorted` must be nonempty; 0 <= q <= 1.
double quantile_sorted(std::span<const double> sorted, double q);

// Percentile bootstrap of the mean: `resamples` means of samples drawn with
// replacement, and their (1 - level)/2 and 1 - (1 - level)/2 quantiles.
// Deterministic in `seed`. ConfigError on empty values, resamples == 0 or a
// level outside (0, 1).
Interval bootstrap_ci(std::span<const double> values, std::size_t resamples, double level,
                      std::uint64_t seed);

// Locally weighted linear regression with tricube weights over the nearest
// floor(frac * n) points (at least two), matching statsmodels with
// delta = 0. `iterations` robustifying passes with bisquare weights follow
// the first fit. x must be sorted ascending. Fewer than two points are
// returned unchanged.
std::vector<double> lowess(std::span<const double> x, std::span<const double> y, double frac,
                           int iterations = 0);

}  // namespace cobweb::eval
