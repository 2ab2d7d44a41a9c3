#include "rspde/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "rspde/errors.hpp"
#include "rspde/rng.hpp"

namespace rspde {

namespace {

constexpr std::uint64_t kDirectionStream = 1ull << 20;

double alpha_norm(const Problem& problem, const Eigen::VectorXd& v) {
  return norm_alpha(*problem.basis(), v, problem.alpha());
}

}  // namespace

Driver::Driver(const DriverConfig& config) : config_(config) {
  if (config.channels == 0) throw ConfigError("driver: need at least one channel");
  if (!std::isfinite(config.scale)) throw ConfigError("driver: scale must be finite");
  if (config.scale != 0.0) sampler_.emplace(config.hurst, config.steps, config.horizon);
  else if (config.steps == 0 || !(config.horizon > 0.0)) throw ConfigError("driver: bad grid");
}

GridPath Driver::path(std::uint64_t replicate) const {
  if (!sampler_) return GridPath::zeros(config_.horizon, config_.steps, config_.channels);
  GridPath p = sampler_->sample(config_.channels, config_.seed, replicate);
  return config_.scale == 1.0 ? p : p.scaled(config_.scale);
}

RoughPath Driver::rough(std::uint64_t replicate) const { return lift_piecewise_linear(path(replicate)); }

MildSolution zero_solution(const Problem& problem, const RoughPath& rough) {
  if (!problem.zero_is_stationary()) throw ConfigError("zero is not a stationary point: need F(0) = G(0) = 0");
  if (rough.channels() != problem.channels()) throw ConfigError("zero_solution: channel mismatch");
  MildSolution s;
  const auto d = static_cast<Eigen::Index>(problem.dofs());
  const auto cols = static_cast<Eigen::Index>(rough.steps() + 1);
  s.trajectory.basis = problem.basis();
  s.trajectory.first = 0;
  s.trajectory.values = Eigen::MatrixXd::Zero(d, cols);
  s.trajectory.derivative.assign(problem.channels(), Eigen::MatrixXd::Zero(d, cols));
  s.trajectory.alpha = problem.alpha();
  s.trajectory.gamma = problem.gamma();
  s.partition.points = {0, rough.steps()};
  s.intervals.push_back({0, rough.steps(), 0, 0.0, false});
  return s;
}

LyapunovReport lyapunov_spectrum(const Problem& problem, const Driver& driver,
                                 const LyapunovConfig& config) {
  const RoughPath rough = driver.rough(0);
  const MildSolution base = zero_solution(problem, rough);
  return lyapunov_qr(problem, rough, base, config);
}

DecayRecord stability_path(const Problem& problem, const Driver& driver, const SolverConfig& solver,
                           double rho, std::size_t path_id, double fit_start) {
  if (!(rho > 0.0)) throw ConfigError("stability: rho must be positive");
  if (!(fit_start >= 0.0 && fit_start < 1.0)) throw ConfigError("stability: fit_start must lie in [0, 1)");
  if (!problem.zero_is_stationary()) throw ConfigError("stability: need F(0) = G(0) = 0");
  const RoughPath rough = driver.rough(path_id);
  Engine engine = make_engine(driver.config().seed, path_id, kDirectionStream);
  Eigen::VectorXd v(static_cast<Eigen::Index>(problem.dofs()));
  for (Eigen::Index k = 0; k < v.size(); ++k) v(k) = standard_normal(engine);
  v *= rho / alpha_norm(problem, v);

  DecayRecord rec;
  rec.path_id = path_id;
  rec.rho = rho;
  rec.fitted_rate = std::numeric_limits<double>::quiet_NaN();
  try {
    const MildSolution sol =
        solve_mild(problem, rough, SpectralField(problem.basis(), v), {0, rough.steps()}, solver);
    const std::size_t m = rough.steps();
    const auto first = static_cast<std::size_t>(std::floor(fit_start * static_cast<double>(m)));
    const std::size_t stride = std::max<std::size_t>(1, (m - first) / 1024);
    std::vector<double> t, y;
    for (std::size_t j = first; j <= m; j += stride) {
      const double nrm = alpha_norm(problem, sol.trajectory.values.col(static_cast<Eigen::Index>(j)));
      if (nrm > 0.0) {
        t.push_back(rough.time(j));
        y.push_back(std::log(nrm));
      }
    }
    if (t.size() >= 2) {
      const LinearFit fit = linear_fit(t, y);
      rec.fitted_rate = fit.slope;
      rec.r2 = fit.r2;
    }
    const double final_norm = alpha_norm(problem, sol.trajectory.values.col(static_cast<Eigen::Index>(m)));
    rec.decayed = rec.fitted_rate < 0.0 && final_norm < rho;
  } catch (const NumericalError&) {
    rec.decayed = false;
  }
  return rec;
}

StabilityReport summarize_stability(std::vector<DecayRecord> records) {
  StabilityReport rep;
  std::size_t decayed = 0;
  std::vector<double> rates;
  for (const auto& r : records) {
    if (r.decayed) ++decayed;
    if (std::isfinite(r.fitted_rate)) rates.push_back(r.fitted_rate);
  }
  rep.decay_fraction = records.empty() ? 0.0 : static_cast<double>(decayed) / static_cast<double>(records.size());
  rep.median_rate = rates.empty() ? std::numeric_limits<double>::quiet_NaN() : median(rates);
  rep.records = std::move(records);
  return rep;
}

StabilityReport stability_probe(const Problem& problem, const Driver& driver,
                                const SolverConfig& solver, double rho, std::size_t paths,
                                double fit_start) {
  std::vector<DecayRecord> records;
  for (std::size_t p = 0; p < paths; ++p) records.push_back(stability_path(problem, driver, solver, rho, p, fit_start));
  return summarize_stability(std::move(records));
}

StableDirectionReport stable_direction_check(const Problem& problem, const RoughPath& rough,
                                             const SolverConfig& solver,
                                             const StableDirectionConfig& config) {
  const std::size_t steps = window_steps(rough, config.t0);
  const std::size_t horizon = steps * config.windows;
  if (horizon > rough.steps()) throw ConfigError("stable_direction_check: driver shorter than windows * t0");
  const MildSolution base = zero_solution(problem, rough);
  LyapunovConfig lc;
  lc.t0 = config.t0;
  lc.windows = config.windows;
  const LyapunovReport spec = lyapunov_qr(problem, rough, base, lc);

  StableDirectionReport rep;
  rep.lambdas = spec.lambdas;
  rep.upsilon = config.upsilon;
  std::size_t j0 = spec.lambdas.size();
  if (config.j0 >= 0) {
    j0 = static_cast<std::size_t>(config.j0);
  } else {
    for (std::size_t j = 0; j < spec.lambdas.size(); ++j) {
      if (spec.lambdas[j] < 0.0) {
        j0 = j;
        break;
      }
    }
  }
  if (j0 >= spec.lambdas.size() || !(spec.lambdas[j0] < 0.0)) {
    throw ConfigError("stable_direction_check: the estimated spectrum has no negative exponents");
  }
  if (!(config.upsilon > 0.0 && config.upsilon < -spec.lambdas[j0])) {
    std::ostringstream msg;
    msg << "stable_direction_check: upsilon must lie in (0, " << -spec.lambdas[j0] << ")";
    throw ConfigError(msg.str());
  }
  rep.j0 = j0;

  const TangentPropagator prop(problem, rough, base);
  const auto d = static_cast<Eigen::Index>(problem.dofs());
  const Eigen::MatrixXd psi = prop.propagate(Eigen::MatrixXd::Identity(d, d), 0, horizon);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(psi, Eigen::ComputeFullV);
  rep.directions = svd.matrixV().rightCols(d - static_cast<Eigen::Index>(j0));
  Eigen::VectorXd v = svd.matrixV().col(static_cast<Eigen::Index>(j0));
  v /= alpha_norm(problem, v);

  for (double mag : config.magnitudes) {
    double ratio = std::numeric_limits<double>::infinity();
    try {
      const MildSolution sol =
          solve_mild(problem, rough, SpectralField(problem.basis(), mag * v), {0, horizon}, solver);
      ratio = 0.0;
      for (std::size_t n = 0; n <= config.windows; ++n) {
        const double nrm = alpha_norm(problem, sol.trajectory.values.col(static_cast<Eigen::Index>(n * steps)));
        ratio = std::max(ratio, std::exp(static_cast<double>(n) * config.t0 * config.upsilon) * nrm / mag);
      }
    } catch (const NumericalError&) {
    }
    const bool ok = ratio <= config.cap;
    rep.magnitudes.push_back(mag);
    rep.sup_ratio.push_back(ratio);
    rep.pass.push_back(ok);
    if (ok) rep.largest_passing = std::max(rep.largest_passing, mag);
  }
  return rep;
}

EpsilonChoice moment_epsilon(double gamma, double gamma_prime, double eta, double epsilon) {
  EpsilonChoice c{epsilon, false};
  if (!(gamma + gamma_prime - 2.0 * (eta + epsilon) > 1.0)) {
    c.epsilon = (gamma + gamma_prime - 2.0 * eta - 1.0) / 4.0;
    c.reduced = true;
  }
  if (!(c.epsilon > 0.0)) {
    throw ConfigError("moments: need gamma + gamma' - 2 eta > 1 for an admissible epsilon");
  }
  return c;
}

MomentSample moment_replicate(const Problem& problem, const Driver& driver,
                              const SolverConfig& solver, const SpectralField& z0,
                              const MomentConfig& config, std::size_t replicate) {
  SolverConfig sc = solver;
  sc.epsilon = moment_epsilon(problem.gamma(), config.gamma_prime, problem.eta(),
                              solver.resolved_epsilon(problem.gamma(), problem.eta()))
                   .epsilon;
  const RoughPath rough = driver.rough(replicate);
  const MildSolution sol = solve_mild(problem, rough, z0, {0, rough.steps()}, sc);
  MomentSample s;
  s.replicate = replicate;
  s.N = sol.partition.count();
  s.sup = sup_norm(sol);
  if (rough.steps() <= config.dnorm_max_steps) {
    s.dnorm = dnorm(sol.trajectory, rough, sol.interval()).value;
  } else {
    const auto& pts = sol.partition.points;
    for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
      s.dnorm = std::max(s.dnorm, dnorm(sol.trajectory, rough, {pts[k], pts[k + 1]}).value);
    }
  }
  return s;
}

namespace {

struct SurvivalPoints {
  std::vector<SurvivalRow> table;
  std::vector<double> x, y;
};

SurvivalPoints survival_points(const std::vector<std::size_t>& counts) {
  SurvivalPoints out;
  const std::size_t top = *std::max_element(counts.begin(), counts.end());
  const double r = static_cast<double>(counts.size());
  for (std::size_t n = 0; n <= top; ++n) {
    const auto above = std::count_if(counts.begin(), counts.end(), [n](std::size_t c) { return c > n; });
    const double s = static_cast<double>(above) / r;
    out.table.push_back({n, s});
    if (n >= 1 && s > 0.0 && s < 1.0) {
      out.x.push_back(std::log(static_cast<double>(n)));
      out.y.push_back(std::log(-std::log(s)));
    }
  }
  return out;
}

}  // namespace

SurvivalFit survival_fit(const std::vector<std::size_t>& counts, std::size_t bootstrap,
                         double level, std::uint64_t seed) {
  if (counts.empty()) throw ConfigError("survival_fit: no samples");
  SurvivalFit fit;
  const SurvivalPoints pts = survival_points(counts);
  fit.table = pts.table;
  fit.points = pts.x.size();
  if (pts.x.size() < 2) {
    fit.exponent = std::numeric_limits<double>::quiet_NaN();
    fit.ci = {fit.exponent, fit.exponent};
    return fit;
  }
  fit.exponent = linear_fit(pts.x, pts.y).slope;
  Engine engine = make_engine(seed, 0, 0);
  std::vector<double> slopes;
  std::vector<std::size_t> draw(counts.size());
  for (std::size_t b = 0; b < bootstrap; ++b) {
    for (auto& c : draw) {
      const auto k = static_cast<std::size_t>(uniform01(engine) * static_cast<double>(counts.size()));
      c = counts[std::min(k, counts.size() - 1)];
    }
    const SurvivalPoints p = survival_points(draw);
    if (p.x.size() >= 2) slopes.push_back(linear_fit(p.x, p.y).slope);
  }
  if (slopes.empty()) {
    fit.ci = {fit.exponent, fit.exponent};
  } else {
    const double tail = 0.5 * (1.0 - level);
    fit.ci = {quantile(slopes, tail), quantile(slopes, 1.0 - tail)};
  }
  return fit;
}

MomentTable summarize_moments(const std::vector<MomentSample>& samples, const MomentConfig& config,
                              std::uint64_t seed) {
  if (samples.size() < 100) {
    throw ConfigError("moments: at least 100 replicates are required (got " + std::to_string(samples.size()) + ")");
  }
  MomentTable table;
  std::vector<double> norms;
  std::vector<std::size_t> counts;
  for (const auto& s : samples) {
    norms.push_back(s.dnorm);
    counts.push_back(s.N);
  }
  for (double p : config.p) {
    if (!(p > 0.0)) throw ConfigError("moments: p must be positive");
    auto stat = [p](std::span<const double> x) {
      double acc = 0.0;
      for (double v : x) acc += std::pow(v, p);
      return acc / static_cast<double>(x.size());
    };
    MomentRow row;
    row.p = p;
    row.estimate = stat(norms);
    row.ci = bootstrap_ci(norms, stat, config.bootstrap, config.level, seed);
    table.moments.push_back(row);
  }
  table.survival = survival_fit(counts, config.bootstrap, config.level, seed + 1);
  return table;
}

MomentTable moment_experiment(const Problem& problem, const Driver& driver,
                              const SolverConfig& solver, const SpectralField& z0,
                              const MomentConfig& config) {
  if (config.replicates < 100) throw ConfigError("moments: at least 100 replicates are required");
  std::vector<MomentSample> samples;
  for (std::size_t r = 0; r < config.replicates; ++r) {
    samples.push_back(moment_replicate(problem, driver, solver, z0, config, r));
  }
  MomentTable t = summarize_moments(samples, config, driver.config().seed);
  t.epsilon = moment_epsilon(problem.gamma(), config.gamma_prime, problem.eta(),
                             solver.resolved_epsilon(problem.gamma(), problem.eta()));
  return t;
}

std::size_t greedy_count(const Driver& driver, double gamma, double eta1, double chi,
                         std::size_t replicate) {
  const RoughPath rough = driver.rough(replicate);
  return greedy_partition(rough, gamma, eta1, chi, {0, rough.steps()}).count();
}

ConvergenceReport convergence_study(const Problem& problem, const Driver& driver,
                                    const SolverConfig& solver, const SpectralField& z0,
                                    std::size_t levels, std::size_t replicate) {
  const RoughPath fine = driver.rough(replicate);
  if (levels >= 63 || fine.steps() % (std::size_t{1} << levels) != 0) {
    throw ConfigError("convergence: grid steps must be divisible by 2^levels");
  }
  const MildSolution ref = solve_mild(problem, fine, z0, {0, fine.steps()}, solver);
  const Eigen::VectorXd ref_end = ref.trajectory.values.rightCols(1);
  const double ref_sup = sup_norm(ref);
  ConvergenceReport rep;
  std::vector<double> x, y;
  for (std::size_t k = levels; k >= 1; --k) {
    const RoughPath coarse = fine.restrict(std::size_t{1} << k);
    const MildSolution sol = solve_mild(problem, coarse, z0, {0, coarse.steps()}, solver);
    ConvergenceRow row;
    row.steps = coarse.steps();
    row.sup = sup_norm(sol);
    row.terminal_error = alpha_norm(problem, sol.trajectory.values.rightCols(1) - ref_end);
    row.sup_error = std::abs(row.sup - ref_sup);
    rep.rows.push_back(row);
    if (row.terminal_error > 0.0) {
      x.push_back(std::log(coarse.dt()));
      y.push_back(std::log(row.terminal_error));
    }
  }
  rep.rows.push_back({fine.steps(), ref_sup, 0.0, 0.0});
  rep.observed_order = x.size() >= 2 ? linear_fit(x, y).slope : std::numeric_limits<double>::quiet_NaN();
  return rep;
}

}  // namespace rspde
