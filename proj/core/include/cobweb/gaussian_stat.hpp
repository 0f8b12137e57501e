#pragma once

#include <cmath>
#include <cstdint>

namespace cobweb {

// Running mean and sum of squared deviations, updated one value at a time
// (Welford). stddev() is the population standard deviation.
struct GaussianStat {
  std::uint64_t n = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    ++n;
    const double delta = x - mean;
    mean += delta / static_cast<double>(n);
    m2 += delta * (x - mean);
  }

  double stddev() const { return n <= 1 ? 0.0 : std::sqrt(m2 / static_cast<double>(n)); }

  // Exact combination of two disjoint samples.
  static GaussianStat pooled(const GaussianStat& a, const GaussianStat& b) {
    if (a.n == 0) return b;
    if (b.n == 0) return a;
    GaussianStat out;
    out.n = a.n + b.n;
    const double na = static_cast<double>(a.n);
    const double nb = static_cast<double>(b.n);
    const double total = static_cast<double>(out.n);
    const double delta = b.mean - a.mean;
    out.mean = a.mean + delta * nb / total;
    out.m2 = a.m2 + b.m2 + delta * delta * na * nb / total;
    return out;
  }

  friend bool operator==(const GaussianStat&, const GaussianStat&) = default;
};

}  // namespace cobweb
