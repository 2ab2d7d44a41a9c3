#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace rspde {

double mean(std::span<const double> x);
/// Unbiased sample variance; zero for fewer than two samples.
double variance(std::span<const double> x);
double standard_error(std::span<const double> x);
/// Linear-interpolation quantile, q in [0, 1].
double quantile(std::vector<double> x, double q);
double median(std::vector<double> x);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  double slope_se = 0.0;
};

/// Ordinary least squares y = intercept + slope x.
LinearFit linear_fit(std::span<const double> x, std::span<const double> y);

struct Interval {
  double low = 0.0;
  double high = 0.0;
  bool contains(double v) const { return low <= v && v <= high; }
};

/// Percentile bootstrap interval of `statistic` over resamples of `samples`
/// (with replacement), seeded deterministically.
Interval bootstrap_ci(std::span<const double> samples,
                      const std::function<double(std::span<const double>)>& statistic,
                      std::size_t resamples, double level, std::uint64_t seed);

}  // namespace rspde
