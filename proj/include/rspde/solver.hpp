#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <utility>
#include <vector>

#include "rspde/controlled_path.hpp"
#include "rspde/grid_path.hpp"
#include "rspde/problem.hpp"
#include "rspde/variation.hpp"

namespace rspde {

struct SolverConfig {
  double chi = 1.0;
  /// eta1 = eta + epsilon; a negative value selects (gamma - eta)/4.
  double epsilon = -1.0;
  /// Absolute Picard tolerance on successive iterates (B_alpha sup norm,
  /// then D^gamma norm). Zero iterates until round-off stagnation.
  double tol = 1e-10;
  std::size_t max_iterations = 60;
  /// Smallest interval (grid steps) produced by bisection.
  std::size_t min_steps = 1;
  double ceiling = 1e6;
  /// The D^gamma check of the Picard increment is O(L^2); it is skipped on
  /// intervals longer than this.
  std::size_t dnorm_max_steps = 256;
  /// Partition the horizon by greedy points; false solves one interval.
  bool greedy = true;
  /// Number of dyadic checkpoints at which the mild residual is recorded.
  std::size_t checkpoints = 8;

  double resolved_epsilon(double gamma, double eta) const;
};

/// Per-step weights of the discrete mild map on a uniform grid:
///   Z_{j+1} = E Z_j + phi_a F(Z_j) + phi_b F(Z_{j+1})
///             + E [sum_i G_i(Z_j) dX^i + sum_{l,i} DG_i(Z_j)[G_l(Z_j)] XX^{l,i}],
/// with E = exp(-rate dt) and phi_a, phi_b the exact integrals of
/// exp(-rate (dt - r)) against the linear interpolation weights.
struct StepWeights {
  Eigen::VectorXd decay;
  Eigen::VectorXd left;
  Eigen::VectorXd right;
};
StepWeights step_weights(const Semigroup& semigroup, double dt);

struct IntervalRecord {
  std::size_t first = 0;
  std::size_t last = 0;
  std::size_t iterations = 0;
  double change = 0.0;
  bool bisected = false;
};

struct MildSolution {
  /// Z with Gubinelli derivative G(Z) on the solved grid interval.
  ControlledPath trajectory;
  GreedyPartition partition;
  std::vector<IntervalRecord> intervals;
  /// (grid index, mild residual between the first grid index and it).
  std::vector<std::pair<std::size_t, double>> residuals;
  double epsilon = 0.0;
  double tol = 0.0;

  GridInterval interval() const { return {trajectory.first, trajectory.last()}; }
};

/// Solves the mild equation on `interval` by Picard iteration on greedy
/// subintervals. Throws ConfigError for an invalid setup and NumericalError
/// for Picard failure at the bisection floor or a blow-up.
MildSolution solve_mild(const Problem& problem, const RoughPath& rough, const SpectralField& z0,
                        GridInterval interval, const SolverConfig& config);

/// Fixed number of Picard sweeps on a single interval, no convergence test.
MildSolution picard_truncated(const Problem& problem, const RoughPath& rough,
                              const SpectralField& z0, GridInterval interval,
                              std::size_t iterations);

/// |Z_t - S_{t-s} Z_s - int_s^t S_{t-r} F(Z_r) dr - int_s^t S_{t-r} G(Z_r) dX_r|_alpha
/// with both integrals recomputed from the stored trajectory.
double mild_residual(const MildSolution& solution, const Problem& problem, const RoughPath& rough,
                     std::size_t s, std::size_t t);

/// sup_t |Z_t|_alpha over the solution.
double sup_norm(const MildSolution& solution);

}  // namespace rspde
