#include "rspde/fbm.hpp"

#include <unsupported/Eigen/FFT>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "rspde/errors.hpp"
#include "rspde/rng.hpp"

namespace rspde {

namespace {

bool is_power_of_two(std::size_t m) { return m != 0 && (m & (m - 1)) == 0; }

// Autocovariance of unit-step fractional Gaussian noise at lag k.
double fgn_autocovariance(double hurst, double k) {
  const double h2 = 2.0 * hurst;
  return 0.5 * (std::pow(std::abs(k + 1.0), h2) - 2.0 * std::pow(std::abs(k), h2) +
                std::pow(std::abs(k - 1.0), h2));
}

}  // namespace

double fbm_covariance(double hurst, double s, double t) {
  const double h2 = 2.0 * hurst;
  return 0.5 * (std::pow(t, h2) + std::pow(s, h2) - std::pow(std::abs(t - s), h2));
}

void check_circulant_spectrum(std::vector<double>& eigenvalues) {
  double largest = 0.0;
  for (double v : eigenvalues) largest = std::max(largest, std::abs(v));
  const double floor = -1e-10 * std::max(largest, 1.0);
  for (std::size_t k = 0; k < eigenvalues.size(); ++k) {
    if (eigenvalues[k] < floor) {
      std::ostringstream msg;
      msg << "circulant embedding has negative eigenvalue " << eigenvalues[k] << " at index " << k;
      throw NumericalError(msg.str());
    }
    if (eigenvalues[k] < 0.0) eigenvalues[k] = 0.0;
  }
}

FbmSampler::FbmSampler(double hurst, std::size_t steps, double horizon)
    : hurst_(hurst), steps_(steps), horizon_(horizon) {
  if (!(hurst > 0.0 && hurst < 1.0)) throw ConfigError("fBm: Hurst parameter must lie in (0,1)");
  if (!is_power_of_two(steps)) throw ConfigError("fBm: step count must be a power of two");
  if (!(horizon > 0.0)) throw ConfigError("fBm: horizon must be positive");

  const std::size_t size = 2 * steps;
  std::vector<std::complex<double>> row(size);
  for (std::size_t k = 0; k <= steps; ++k) row[k] = fgn_autocovariance(hurst, static_cast<double>(k));
  for (std::size_t k = steps + 1; k < size; ++k) row[k] = row[size - k];

  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> spec;
  fft.fwd(spec, row);
  eigenvalues_.resize(size);
  for (std::size_t k = 0; k < size; ++k) eigenvalues_[k] = spec[k].real();
  check_circulant_spectrum(eigenvalues_);
}

bool FbmSampler::outside_rough_regime() const { return !(hurst_ > 1.0 / 3.0 && hurst_ <= 0.5); }

std::vector<double> FbmSampler::sample_increments(std::uint64_t seed, std::uint64_t replicate,
                                                  std::uint64_t channel) const {
  const std::size_t size = 2 * steps_;
  Engine engine = make_engine(seed, replicate, channel);
  std::vector<std::complex<double>> w(size);
  for (std::size_t k = 0; k < size; ++k) {
    const double re = standard_normal(engine);
    const double im = standard_normal(engine);
    w[k] = std::sqrt(eigenvalues_[k] / static_cast<double>(size)) * std::complex<double>(re, im);
  }
  // Real part of sum_k w_k e^{-2 pi i jk/size} has covariance equal to the
  // circulant row; the first m entries are fGn.
  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> y;
  fft.fwd(y, w);
  const double scale = std::pow(horizon_ / static_cast<double>(steps_), hurst_);
  std::vector<double> out(steps_);
  for (std::size_t j = 0; j < steps_; ++j) out[j] = scale * y[j].real();
  return out;
}

GridPath FbmSampler::sample(std::size_t channels, std::uint64_t seed, std::uint64_t replicate) const {
  if (channels == 0) throw ConfigError("fBm: need at least one channel");
  RowMatrix values = RowMatrix::Zero(static_cast<Eigen::Index>(steps_ + 1), static_cast<Eigen::Index>(channels));
  for (std::size_t c = 0; c < channels; ++c) {
    const std::vector<double> inc = sample_increments(seed, replicate, c);
    double acc = 0.0;
    for (std::size_t j = 0; j < steps_; ++j) {
      acc += inc[j];
      values(static_cast<Eigen::Index>(j + 1), static_cast<Eigen::Index>(c)) = acc;
    }
  }
  return GridPath(horizon_, std::move(values), seed);
}

GridPath sample_fbm(double hurst, std::size_t channels, std::size_t steps, double horizon,
                    std::uint64_t seed, std::uint64_t replicate) {
  return FbmSampler(hurst, steps, horizon).sample(channels, seed, replicate);
}

}  // namespace rspde
