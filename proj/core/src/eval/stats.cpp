#include "cobweb/eval/stats.hpp"

#include <algorithm>
#include <cmath>

#include "cobweb/data/rng.hpp"
#include "cobweb/error.hpp"

namespace cobweb::eval {

double quantile_sorted(std::span<const double> sorted, double q) {
  const double h = static_cast<double>(sorted.size() - 1) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

Interval bootstrap_ci(std::span<const double> values, std::size_t resamples, double level,
                      std::uint64_t seed) {
  if (values.empty()) throw ConfigError("bootstrap needs at least one value");
  if (resamples == 0) throw ConfigError("bootstrap needs at least one resample");
  if (!(level > 0.0 && level < 1.0)) throw ConfigError("confidence level must be in (0, 1)");

  const std::size_t n = values.size();
  data::Rng rng(seed);
  std::vector<double> means(resamples);
  for (auto& m : means) {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += values[rng.below(n)];
    m = sum / static_cast<double>(n);
  }
  std::sort(means.begin(), means.end());
  const double tail = (1.0 - level) / 2.0;
  Interval out{quantile_sorted(means, tail), quantile_sorted(means, 1.0 - tail)};
  // Rounding in the sums can leave a constant sample a hair off its value.
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  out.low = std::clamp(out.low, *lo, *hi);
  out.high = std::clamp(out.high, *lo, *hi);
  return out;
}

namespace {

double tricube(double u) {
  if (u >= 1.0) return 0.0;
  const double t = 1.0 - u * u * u;
  return t * t * t;
}

double bisquare(double u) {
  if (u >= 1.0) return 0.0;
  const double t = 1.0 - u * u;
  return t * t;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2.0;
}

}  // namespace

std::vector<double> lowess(std::span<const double> x, std::span<const double> y, double frac,
                           int iterations) {
  if (!(frac > 0.0 && frac <= 1.0)) throw ConfigError("lowess frac must be in (0, 1]");
  if (x.size() != y.size()) throw ConfigError("lowess needs as many x as y values");
  const std::size_t n = x.size();
  if (n < 2) return {y.begin(), y.end()};

  const auto k = std::clamp<std::size_t>(
      static_cast<std::size_t>(frac * static_cast<double>(n) + 1e-10), 2, n);
  std::vector<double> fit(n);
  std::vector<double> robust(n, 1.0);
  std::vector<double> w(n);

  for (int pass = 0; pass <= iterations; ++pass) {
    std::size_t left = 0;
    std::size_t right = k;
    for (std::size_t i = 0; i < n; ++i) {
      // Slide the window right while x[i] is past its centre.
      while (right < n && x[i] > (x[left] + x[right]) / 2.0) {
        ++left;
        ++right;
      }
      const double radius = std::max(x[i] - x[left], x[right - 1] - x[i]);
      double total = 0.0;
      std::size_t nonzero = 0;
      for (std::size_t j = left; j < right; ++j) {
        const double u = radius > 0.0 ? std::abs(x[j] - x[i]) / radius : 0.0;
        w[j] = tricube(u) * robust[j];
        total += w[j];
        nonzero += w[j] != 0.0;
      }
      if (total <= 0.0 || nonzero == 1) {
        fit[i] = y[i];
        continue;
      }
      double mx = 0.0;
      for (std::size_t j = left; j < right; ++j) {
        w[j] /= total;
        mx += w[j] * x[j];
      }
      double spread = 0.0;
      for (std::size_t j = left; j < right; ++j) spread += w[j] * (x[j] - mx) * (x[j] - mx);
      double value = 0.0;
      for (std::size_t j = left; j < right; ++j) {
        double p = w[j];
        if (spread > 0.0) p *= 1.0 + (x[i] - mx) * (x[j] - mx) / spread;
        value += p * y[j];
      }
      fit[i] = value;
    }
    if (pass == iterations) break;
    std::vector<double> resid(n);
    for (std::size_t i = 0; i < n; ++i) resid[i] = std::abs(y[i] - fit[i]);
    const double scale = 6.0 * median(resid);
    if (scale == 0.0) break;
    for (std::size_t i = 0; i < n; ++i) robust[i] = bisquare(resid[i] / scale);
  }
  return fit;
}

}  // namespace cobweb::eval
