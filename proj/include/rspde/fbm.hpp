#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "rspde/grid_path.hpp"

namespace rspde {

/// Closed-form fBm covariance 1/2 (t^{2H} + s^{2H} - |t-s|^{2H}).
double fbm_covariance(double hurst, double s, double t);

/// Exact fBm sampler on a uniform grid (circulant embedding of the
/// fractional Gaussian noise covariance, Davies-Harte). The embedding
/// spectrum is computed once per (H, m, T) and reused across draws.
class FbmSampler {
 public:
  /// Throws ConfigError for H outside (0,1), m not a power of two, or
  /// T <= 0; throws NumericalError when the embedding has a negative
  /// eigenvalue.
  FbmSampler(double hurst, std::size_t steps, double horizon);

  double hurst() const { return hurst_; }
  std::size_t steps() const { return steps_; }
  double horizon() const { return horizon_; }
  /// True when H lies outside (1/3, 1/2], the rough regime targeted by the
  /// rest of the library. Sampling still works.
  bool outside_rough_regime() const;

  /// Channel c of replicate r uses stream stream_seed(seed, r, c).
  GridPath sample(std::size_t channels, std::uint64_t seed, std::uint64_t replicate = 0) const;
  /// Increments (fractional Gaussian noise) of one channel.
  std::vector<double> sample_increments(std::uint64_t seed, std::uint64_t replicate,
                                        std::uint64_t channel) const;

  /// Embedding eigenvalues (length 2m), for diagnostics.
  const std::vector<double>& spectrum() const { return eigenvalues_; }

 private:
  double hurst_;
  std::size_t steps_;
  double horizon_;
  std::vector<double> eigenvalues_;
};

/// One-shot convenience wrapper around FbmSampler.
GridPath sample_fbm(double hurst, std::size_t channels, std::size_t steps, double horizon,
                    std::uint64_t seed, std::uint64_t replicate = 0);

/// Checks a candidate circulant spectrum: clamps tiny negative round-off to
/// zero and throws NumericalError for a genuinely negative eigenvalue.
void check_circulant_spectrum(std::vector<double>& eigenvalues);

}  // namespace rspde
