#include "rspde/stats.hpp"

#include <algorithm>
#include <cmath>

#include "rspde/errors.hpp"
#include "rspde/rng.hpp"

namespace rspde {

double mean(std::span<const double> x) {
  if (x.empty()) throw ConfigError("mean: empty sample");
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

double variance(std::span<const double> x) {
  if (x.size() < 2) return 0.0;
  const double m = mean(x);
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return s / static_cast<double>(x.size() - 1);
}

double standard_error(std::span<const double> x) {
  return std::sqrt(variance(x) / static_cast<double>(x.size()));
}

double quantile(std::vector<double> x, double q) {
  if (x.empty()) throw ConfigError("quantile: empty sample");
  if (!(q >= 0.0 && q <= 1.0)) throw ConfigError("quantile: q must lie in [0, 1]");
  std::sort(x.begin(), x.end());
  const double pos = q * static_cast<double>(x.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, x.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return x[lo] + frac * (x[hi] - x[lo]);
}

double median(std::vector<double> x) { return quantile(std::move(x), 0.5); }

LinearFit linear_fit(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw ConfigError("linear_fit: need two or more paired points");
  const double mx = mean(x);
  const double my = mean(y);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) throw ConfigError("linear_fit: abscissae are all equal");
  LinearFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  const double sse = std::max(0.0, syy - f.slope * sxy);
  f.r2 = syy > 0.0 ? 1.0 - sse / syy : 1.0;
  if (x.size() > 2) f.slope_se = std::sqrt(sse / static_cast<double>(x.size() - 2) / sxx);
  return f;
}

Interval bootstrap_ci(std::span<const double> samples,
                      const std::function<double(std::span<const double>)>& statistic,
                      std::size_t resamples, double level, std::uint64_t seed) {
  if (samples.empty() || resamples == 0) throw ConfigError("bootstrap_ci: empty input");
  if (!(level > 0.0 && level < 1.0)) throw ConfigError("bootstrap_ci: level must lie in (0, 1)");
  Engine engine = make_engine(seed, 0, 0);
  std::vector<double> draw(samples.size());
  std::vector<double> stats;
  stats.reserve(resamples);
  for (std::size_t b = 0; b < resamples; ++b) {
    for (double& v : draw) {
      const auto k = static_cast<std::size_t>(uniform01(engine) * static_cast<double>(samples.size()));
      v = samples[std::min(k, samples.size() - 1)];
    }
    stats.push_back(statistic(draw));
  }
  const double tail = 0.5 * (1.0 - level);
  return {quantile(stats, tail), quantile(stats, 1.0 - tail)};
}

}  // namespace rspde
