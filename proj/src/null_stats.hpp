#pragma once

#include <cmath>

#include "topostat/inference.hpp"

namespace topostat::detail {

// Streaming accumulator for the null sample: p-value counter, Welford
// moments and a fixed 64-bin histogram over [0, 2 * observed] with
// clamped overflow, so a chain step stays O(1) in memory and time.
struct NullAccumulator {
  explicit NullAccumulator(double observed_stat)
      : observed(observed_stat),
        hi(observed_stat > 0.0 && std::isfinite(observed_stat)
               ? 2.0 * observed_stat
               : 1.0),
        inv_width(64.0 / hi) {}

  void add(double v) {
    ++n;
    if (v >= observed) ++count_ge;
    if (std::isfinite(v)) {
      const double d = v - mean;
      mean += d / static_cast<double>(n_finite + 1);
      m2 += d * (v - mean);
      ++n_finite;
    }
    int bin = v <= 0.0 ? 0 : static_cast<int>(v * inv_width);
    if (bin > 63 || !std::isfinite(v)) bin = 63;
    ++hist[bin];
  }

  void finalize(TestResult& r) const {
    r.n_resamples = n;
    r.p_value = n > 0 ? static_cast<double>(count_ge) / static_cast<double>(n)
                      : 1.0;
    r.null_mean = mean;
    r.null_sd = n_finite > 1
                    ? std::sqrt(m2 / static_cast<double>(n_finite - 1))
                    : 0.0;
    r.hist_lo = 0.0;
    r.hist_hi = hi;
    r.hist = hist;
  }

  double observed;
  double hi;
  double inv_width;
  long long n = 0;
  long long n_finite = 0;
  long long count_ge = 0;
  double mean = 0.0;
  double m2 = 0.0;
  std::array<long long, 64> hist{};
};

}  // namespace topostat::detail
