#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "rspde/fbm.hpp"
#include "rspde/lyapunov.hpp"
#include "rspde/solver.hpp"
#include "rspde/stats.hpp"

namespace rspde {

struct DriverConfig {
  double hurst = 0.45;
  std::size_t steps = 4096;
  double horizon = 1.0;
  std::size_t channels = 1;
  std::uint64_t seed = 1;
  /// Multiplies the sampled path; 0 gives the zero driver.
  double scale = 1.0;
};

/// Seeded source of lifted fBm drivers; replicate r is independent of r'.
class Driver {
 public:
  explicit Driver(const DriverConfig& config);
  const DriverConfig& config() const { return config_; }
  GridPath path(std::uint64_t replicate) const;
  RoughPath rough(std::uint64_t replicate) const;

 private:
  DriverConfig config_;
  std::optional<FbmSampler> sampler_;
};

/// Zero trajectory on the full driver grid (the stationary point Y = 0).
/// Throws ConfigError unless F(0) = G(0) = 0.
MildSolution zero_solution(const Problem& problem, const RoughPath& rough);

// ---- Lyapunov spectrum --------------------------------------------------

/// Samples replicate 0 of the driver (horizon must cover windows * t0) and
/// runs the QR estimator along Y = 0.
LyapunovReport lyapunov_spectrum(const Problem& problem, const Driver& driver,
                                 const LyapunovConfig& config);

// ---- Stability probe ----------------------------------------------------

struct DecayRecord {
  std::size_t path_id = 0;
  double rho = 0.0;
  double fitted_rate = 0.0;
  double r2 = 0.0;
  bool decayed = false;
};

struct StabilityReport {
  std::vector<DecayRecord> records;
  double decay_fraction = 0.0;
  double median_rate = 0.0;
};

/// One path: xi uniform on the sphere |xi|_alpha = rho (direction drawn from
/// stream (seed, path_id)), solved over the driver horizon; the rate is the
/// least-squares slope of log |Z_t|_alpha over t >= fit_start * T.
DecayRecord stability_path(const Problem& problem, const Driver& driver, const SolverConfig& solver,
                           double rho, std::size_t path_id, double fit_start = 0.5);
StabilityReport summarize_stability(std::vector<DecayRecord> records);
StabilityReport stability_probe(const Problem& problem, const Driver& driver,
                                const SolverConfig& solver, double rho, std::size_t paths,
                                double fit_start = 0.5);

// ---- Stable directions --------------------------------------------------

struct StableDirectionConfig {
  double t0 = 0.5;
  std::size_t windows = 10;
  double upsilon = 0.5;
  std::vector<double> magnitudes{1e-4, 1e-3, 1e-2, 1e-1, 1.0};
  double cap = 10.0;
  /// First index of the negative block; negative selects the first
  /// negative exponent.
  long j0 = -1;
};

struct StableDirectionReport {
  /// The directions are right singular vectors of the product cocycle, a
  /// numerical proxy for the Oseledets stable subspace.
  bool proxy = true;
  std::vector<double> lambdas;
  std::size_t j0 = 0;
  double upsilon = 0.0;
  Eigen::MatrixXd directions;
  std::vector<double> magnitudes;
  std::vector<double> sup_ratio;
  std::vector<bool> pass;
  double largest_passing = 0.0;
};

/// Evolves xi = magnitude * v_{j0} (v_{j0} the least-contracted proxy stable
/// direction) and checks sup_n e^{n t0 upsilon} |phi^{n t0}(xi)|_alpha / |xi|_alpha <= cap.
/// Throws ConfigError when no exponent is negative or upsilon is outside
/// (0, -lambda_{j0}).
StableDirectionReport stable_direction_check(const Problem& problem, const RoughPath& rough,
                                             const SolverConfig& solver,
                                             const StableDirectionConfig& config);

// ---- Moments and greedy statistics -------------------------------------

struct MomentConfig {
  std::size_t replicates = 100;
  std::vector<double> p{1.0, 2.0, 4.0};
  double gamma_prime = 0.9;
  std::size_t bootstrap = 500;
  double level = 0.95;
  std::size_t dnorm_max_steps = 4096;
};

/// epsilon used for eta1 = eta + epsilon: the configured value unless
/// gamma + gamma' - 2 eta1 <= 1, in which case (gamma + gamma' - 2 eta - 1)/4.
struct EpsilonChoice {
  double epsilon = 0.0;
  bool reduced = false;
};
EpsilonChoice moment_epsilon(double gamma, double gamma_prime, double eta, double epsilon);

struct MomentSample {
  std::size_t replicate = 0;
  double dnorm = 0.0;
  double sup = 0.0;
  std::size_t N = 0;
};

struct MomentRow {
  double p = 0.0;
  double estimate = 0.0;
  Interval ci;
};

struct SurvivalRow {
  std::size_t n = 0;
  double survival = 0.0;
};

struct SurvivalFit {
  std::vector<SurvivalRow> table;
  /// Slope of log(-log S(n)) against log n over 0 < S(n) < 1.
  double exponent = 0.0;
  Interval ci;
  std::size_t points = 0;
};

struct MomentTable {
  std::vector<MomentRow> moments;
  SurvivalFit survival;
  EpsilonChoice epsilon;
};

MomentSample moment_replicate(const Problem& problem, const Driver& driver,
                              const SolverConfig& solver, const SpectralField& z0,
                              const MomentConfig& config, std::size_t replicate);
SurvivalFit survival_fit(const std::vector<std::size_t>& counts, std::size_t bootstrap,
                         double level, std::uint64_t seed);
/// Throws ConfigError for fewer than 100 samples.
MomentTable summarize_moments(const std::vector<MomentSample>& samples, const MomentConfig& config,
                              std::uint64_t seed);
MomentTable moment_experiment(const Problem& problem, const Driver& driver,
                              const SolverConfig& solver, const SpectralField& z0,
                              const MomentConfig& config);

/// Greedy count N([0,T], eta1, chi, X) of one driver replicate.
std::size_t greedy_count(const Driver& driver, double gamma, double eta1, double chi,
                         std::size_t replicate);

// ---- Grid refinement ----------------------------------------------------

struct ConvergenceRow {
  std::size_t steps = 0;
  double sup = 0.0;
  double terminal_error = 0.0;
  double sup_error = 0.0;
};

struct ConvergenceReport {
  std::vector<ConvergenceRow> rows;
  /// Fitted slope of log terminal error against log dt (coarse levels).
  double observed_order = 0.0;
};

/// Solves on the driver grid restricted by strides 2^levels, ..., 2, 1 and
/// compares with the finest solution.
ConvergenceReport convergence_study(const Problem& problem, const Driver& driver,
                                    const SolverConfig& solver, const SpectralField& z0,
                                    std::size_t levels, std::size_t replicate = 0);

}  // namespace rspde
