#pragma once

#include <cstddef>
#include <vector>

#include "rspde/grid_path.hpp"

namespace rspde {

/// Closed grid interval [first, last] given by grid indices.
struct GridInterval {
  std::size_t first = 0;
  std::size_t last = 0;
  std::size_t steps() const { return last - first; }
};

struct HoelderNorms {
  double path = 0.0;    ///< sup |dX_{s,t}| / (t-s)^gamma
  double second = 0.0;  ///< sup |XX_{s,t}| / (t-s)^{2 gamma}
  double rho = 1.0;     ///< 1 + path + second
};

/// Exact suprema over all grid pairs s < t inside the interval (Euclidean
/// norm on dX, Frobenius norm on XX). Throws ConfigError for an empty
/// interval.
HoelderNorms hoelder_norms(const RoughPath& rough, double gamma, GridInterval interval);

/// P(x, y) = 1 + y + x + x (x^2 + y) with x = |X|_gamma, y = |XX|_{2 gamma}.
double rough_polynomial(const HoelderNorms& norms);

/// W(s, b) for every grid b >= s, as produced by the last-breakpoint dynamic
/// program. Entry k holds W(s, s + k).
struct ControlSweep {
  std::size_t start = 0;
  std::vector<double> values;
};

/// Control function W_{X,gamma,eta1}: supremum over grid partitions of
///   sum (t_{j+1}-t_j)^{-eta1/(gamma-eta1)} [|dX|^{1/(gamma-eta1)} +
///   |XX|^{1/(2(gamma-eta1))}].
/// Exact on the grid, O((t-s)^2) per query. Requires 0 <= eta1 < gamma.
double control_value(const RoughPath& rough, double gamma, double eta1, std::size_t s, std::size_t t);

/// W(s, b) for b = s..last, stopping early (entries beyond the first value
/// exceeding `stop_above` are omitted) when stop_above is finite.
ControlSweep control_sweep(const RoughPath& rough, double gamma, double eta1, std::size_t s,
                           std::size_t last, double stop_above);

/// Cameron-Martin analogue: supremum over grid partitions of
///   sum (t_{j+1}-t_j)^{-eta1/(gp-eta1)} |dh|^{1/(gp-eta1)}.
/// Requires 0 <= eta1 < gamma_prime.
double cm_variation(const GridPath& h, double gamma_prime, double eta1);

struct GreedyPartition {
  std::vector<std::size_t> points;  ///< grid indices tau_0 < ... < tau_N
  double chi = 0.0;
  double eta1 = 0.0;
  double gamma = 0.0;
  std::size_t count() const { return points.empty() ? 0 : points.size() - 1; }
};

/// Greedy points: tau_{n+1} is the largest grid point with
/// W(tau_n, tau)^{gamma-eta1} <= chi. Throws ConfigError naming the
/// offending grid step when a single step already exceeds chi.
GreedyPartition greedy_partition(const RoughPath& rough, double gamma, double eta1, double chi,
                                 GridInterval interval);

}  // namespace rspde
