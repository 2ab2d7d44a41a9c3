#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "rspde/linearization.hpp"

namespace rspde {

struct LyapunovConfig {
  double t0 = 1.0;
  std::size_t windows = 20;
  /// Number of exponents (frame columns); 0 selects every dof.
  std::size_t K = 0;
  /// 0 starts from the identity frame; otherwise a random orthogonal frame.
  std::uint64_t frame_seed = 0;
};

struct LyapunovReport {
  double t0 = 0.0;
  std::size_t K = 0;
  std::size_t W = 0;
  /// Sorted decreasingly.
  std::vector<double> lambdas;
  /// Max of the running-mean half-range over the last half of the windows
  /// and two standard errors of the per-window rates.
  std::vector<double> ci;
  /// log |R_jj| per window, in the order of `lambdas`.
  std::vector<std::vector<double>> log_r;
  /// Running means after each window, in the order of `lambdas`.
  std::vector<std::vector<double>> trace;
};

/// Sequential QR along the base solution: B = M Q, B = Q R, accumulate
/// log |R_jj|. Window length t0 must be a whole number of grid steps.
/// Throws NumericalError when a diagonal of R drops below 1e-300.
LyapunovReport lyapunov_qr(const Problem& problem, const RoughPath& rough, const MildSolution& base,
                           const LyapunovConfig& config);

/// Window length in grid steps; throws ConfigError unless t0/dt is integral.
std::size_t window_steps(const RoughPath& rough, double t0);

}  // namespace rspde
