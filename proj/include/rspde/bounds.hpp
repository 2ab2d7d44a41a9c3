#pragma once

#include <cstddef>
#include <vector>

#include "rspde/solver.hpp"

namespace rspde {

struct BoundReport {
  std::size_t N = 0;
  double x = 0.0;  ///< |X|_gamma on the interval
  double y = 0.0;  ///< |XX|_{2 gamma} on the interval
  double P_value = 1.0;
  double chi = 0.0;
  double epsilon = 0.0;
  double eta1 = 0.0;
  /// Smallest M > 1 with |(Z,G(Z))|_{D,[tau_n,tau_{n+1}]} <= 2M(|Z_{tau_n}| + P)
  /// on every greedy interval of the run.
  double M_eps = 1.0;
  double M_tilde = 0.0;  ///< log(2 M_eps)
  /// Whether M_eps chi^{gamma - eta1} <= 1/4 held.
  bool step_condition = false;
  /// exp(N M~)|Z_s| + (exp((N+1) M~) - 1)/(2M - 1) P.
  double bound = 0.0;
  double observed = 0.0;  ///< sup_t |Z_t|_alpha
  bool holds = false;
  std::vector<double> interval_dnorms;

  /// Second bound: glue * N (1 + x) * bound, with the gluing constant
  /// calibrated as the smallest value >= 1 covering the full-interval norm.
  double glue = 1.0;
  double bound_dnorm = 0.0;
  double observed_dnorm = -1.0;  ///< negative when skipped
  bool holds_dnorm = false;
};

/// Evaluates the greedy-point bound for a solved trajectory. The full-horizon
/// D^gamma norm (O(m^2)) is computed only when the interval has at most
/// `dnorm_max_steps` steps.
BoundReport apriori_bound(const MildSolution& solution, const RoughPath& rough,
                          const SolverConfig& config, std::size_t dnorm_max_steps = 1024);

}  // namespace rspde
