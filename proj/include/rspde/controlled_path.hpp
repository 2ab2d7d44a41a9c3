#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "rspde/grid_path.hpp"
#include "rspde/spectral.hpp"
#include "rspde/variation.hpp"

namespace rspde {

/// A controlled path (Z, Z') on consecutive grid points first..last of a
/// rough path. Column j of `values` is Z at grid index first + j; channel i
/// of the Gubinelli derivative is derivative[i] with the same layout.
struct ControlledPath {
  BasisPtr basis;
  std::size_t first = 0;
  Eigen::MatrixXd values;
  std::vector<Eigen::MatrixXd> derivative;
  double alpha = 0.0;
  double gamma = 0.5;

  std::size_t points() const { return static_cast<std::size_t>(values.cols()); }
  std::size_t last() const { return first + points() - 1; }
  std::size_t channels() const { return derivative.size(); }
  SpectralField at(std::size_t grid_index) const;
  SpectralField derivative_at(std::size_t grid_index, std::size_t channel) const;
  /// Z#_{s,t} = dZ_{s,t} - sum_i Z'_i(s) dX^i_{s,t}.
  SpectralField remainder(const RoughPath& rough, std::size_t s, std::size_t t) const;
  /// Throws ConfigError unless shapes agree with the basis and channel count.
  void check(const RoughPath& rough) const;
};

struct DNorm {
  double value = 0.0;       ///< sum of the three components
  double sup = 0.0;         ///< sup_t |Z_t|_alpha
  double derivative = 0.0;  ///< max(sup |Z'|_{alpha-gamma}, Hoelder_gamma |dZ'|_{alpha-2gamma})
  double remainder = 0.0;   ///< max(|Z#|_{alpha-gamma}/(t-s)^gamma, |Z#|_{alpha-2gamma}/(t-s)^{2gamma})
};

/// Norm of (Z, Z') in D^gamma_{X,alpha}(I) with every supremum taken over
/// grid pairs inside the interval.
DNorm dnorm(const ControlledPath& path, const RoughPath& rough, GridInterval interval);

/// sup_{s<t} |dZ_{s,t}|_{alpha-gamma} / (t-s)^gamma over grid pairs.
double increment_hoelder(const ControlledPath& path, const RoughPath& rough, GridInterval interval);

struct SewingResult {
  SpectralField integral;
  /// defects[m] = |Gamma^{m+1} - Gamma^m|_{alpha - i gamma}, i = 0, 1, 2.
  std::vector<std::array<double, 3>> level_defects;
};

/// Semigroup rough integral int_s^t S_{t-r} Y_r o dX_r by dyadic sewing.
///
/// `integrand` holds one controlled path per noise channel (channel i is
/// integrated against dX^i); each carries n derivative channels. Level m
/// sums S_{t-u}[Y_u dX^i_{u,v} + sum_l Y'_{i,l}(u) XX^{l,i}_{u,v}] over the
/// 2^m dyadic subintervals [u,v]. Norms use the alpha and gamma of
/// integrand[0]. Throws ConfigError when t-s is not divisible by 2^levels.
SewingResult sewing_integral(std::span<const ControlledPath> integrand, const RoughPath& rough,
                             const Semigroup& semigroup, std::size_t s, std::size_t t,
                             unsigned levels);

/// The same compensated sum at the finest (grid) level for any s <= t.
SpectralField grid_sewing_sum(std::span<const ControlledPath> integrand, const RoughPath& rough,
                              const Semigroup& semigroup, std::size_t s, std::size_t t);

/// |int_s^t - S_{t-s} Y_s dX_{s,t} - S_{t-s} Y'_s XX_{s,t}|_{alpha - i gamma}
/// for i = 0, 1, 2, the integral taken at grid resolution. These are measured
/// values; the matching estimate carries rho_gamma = 1 + |X|_gamma + |XX|_2gamma
/// in front of the Y'_s term, not the bare |X|_gamma of some references.
std::array<double, 3> local_expansion_defect(std::span<const ControlledPath> integrand,
                                             const RoughPath& rough, const Semigroup& semigroup,
                                             std::size_t s, std::size_t t);

}  // namespace rspde
