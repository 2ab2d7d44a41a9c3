#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <vector>

#include "rspde/controlled_path.hpp"
#include "rspde/problem.hpp"
#include "rspde/solver.hpp"

namespace rspde {

/// Tangent trajectory zeta_t along a base solution; derivative[i] holds the
/// Gubinelli derivative DG_i(Z_t)[zeta_t].
struct TangentPath {
  ControlledPath trajectory;
};

/// Exact derivative of the discrete mild map along a base solution:
///   zeta_{j+1} = (I - phi_b DF(Z_{j+1}))^{-1} [E zeta_j + phi_a DF(Z_j) zeta_j
///                + E (sum_i DG_i zeta_j dX^i
///                     + sum_{l,i} (D^2G_i[G_l, zeta_j] + DG_i[DG_l zeta_j]) XX^{l,i})].
class TangentPropagator {
 public:
  TangentPropagator(const Problem& problem, const RoughPath& rough, const MildSolution& base);

  /// Dense one-step matrix from grid index j to j+1.
  Eigen::MatrixXd step_matrix(std::size_t j) const;
  /// Propagates the columns of `frame` from grid index s to t.
  Eigen::MatrixXd propagate(const Eigen::MatrixXd& frame, std::size_t s, std::size_t t) const;

 private:
  Eigen::MatrixXd drift_jacobian(std::size_t j) const;
  const Problem& problem_;
  const RoughPath& rough_;
  const MildSolution& base_;
  StepWeights weights_;
  bool constant_drift_;
  bool constant_noise_;
  Eigen::MatrixXd drift_matrix_;
  std::vector<Eigen::MatrixXd> noise_matrix_;
  std::vector<Eigen::MatrixXd> noise_product_;
  Eigen::PartialPivLU<Eigen::MatrixXd> implicit_lu_;
};

TangentPath solve_linearized(const Problem& problem, const RoughPath& rough,
                             const MildSolution& base, const SpectralField& zeta0,
                             GridInterval interval);

/// Linearized mild identity defect in B_alpha, integrals recomputed from the
/// stored tangent.
double tangent_residual(const Problem& problem, const RoughPath& rough, const MildSolution& base,
                        const TangentPath& tangent, std::size_t s, std::size_t t);

/// Top-left K x K block of the Galerkin cocycle over `window`: column j is
/// the tangent started from dof j, solved in the full truncation.
Eigen::MatrixXd build_cocycle_matrix(const Problem& problem, const RoughPath& rough,
                                     const MildSolution& base, GridInterval window, std::size_t K);

}  // namespace rspde
