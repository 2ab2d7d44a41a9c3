#include "rspde/lyapunov.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "rspde/errors.hpp"
#include "rspde/rng.hpp"
#include "rspde/stats.hpp"

namespace rspde {

std::size_t window_steps(const RoughPath& rough, double t0) {
  if (!(t0 > 0.0)) throw ConfigError("lyapunov: t0 must be positive");
  const double ratio = t0 / rough.dt();
  const double r = std::round(ratio);
  if (r < 1.0 || std::abs(ratio - r) > 1e-9 * std::max(1.0, ratio)) {
    std::ostringstream msg;
    msg << "lyapunov: window t0=" << t0 << " is not a whole number of grid steps (dt=" << rough.dt() << ")";
    throw ConfigError(msg.str());
  }
  return static_cast<std::size_t>(r);
}

LyapunovReport lyapunov_qr(const Problem& problem, const RoughPath& rough, const MildSolution& base,
                           const LyapunovConfig& config) {
  if (config.windows < 10) throw ConfigError("lyapunov: need at least 10 windows");
  const std::size_t d = problem.dofs();
  const std::size_t k = config.K == 0 ? d : config.K;
  if (k > d) throw ConfigError("lyapunov: K exceeds the truncation");
  const std::size_t steps = window_steps(rough, config.t0);
  const std::size_t start = base.trajectory.first;
  if (start + steps * config.windows > base.trajectory.last()) {
    throw ConfigError("lyapunov: base solution shorter than windows * t0");
  }
  const auto dd = static_cast<Eigen::Index>(d);
  const auto kk = static_cast<Eigen::Index>(k);

  Eigen::MatrixXd q;
  if (config.frame_seed == 0) {
    q = Eigen::MatrixXd::Identity(dd, kk);
  } else {
    Engine engine = make_engine(config.frame_seed, 0, 0);
    Eigen::MatrixXd g(dd, kk);
    for (Eigen::Index c = 0; c < kk; ++c) {
      for (Eigen::Index r = 0; r < dd; ++r) g(r, c) = standard_normal(engine);
    }
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    q = qr.householderQ() * Eigen::MatrixXd::Identity(dd, kk);
  }

  const TangentPropagator prop(problem, rough, base);
  std::vector<std::vector<double>> log_r(k);
  for (std::size_t w = 0; w < config.windows; ++w) {
    const std::size_t a = start + w * steps;
    const Eigen::MatrixXd b = prop.propagate(q, a, a + steps);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(b);
    const Eigen::MatrixXd r = qr.matrixQR().topRows(kk).triangularView<Eigen::Upper>();
    q = qr.householderQ() * Eigen::MatrixXd::Identity(dd, kk);
    for (Eigen::Index j = 0; j < kk; ++j) {
      const double rjj = r(j, j);
      if (!(std::abs(rjj) >= 1e-300)) {
        std::ostringstream msg;
        msg << "lyapunov: |R_" << j << j << "| = " << std::abs(rjj) << " below 1e-300 in window " << w
            << " (mode collapse; reduce K)";
        throw NumericalError(msg.str());
      }
      // Keep the frame orientation continuous.
      if (rjj < 0.0) q.col(j) = -q.col(j);
      log_r[static_cast<std::size_t>(j)].push_back(std::log(std::abs(rjj)));
    }
  }

  LyapunovReport rep;
  rep.t0 = config.t0;
  rep.K = k;
  rep.W = config.windows;
  std::vector<double> lambdas(k), ci(k);
  std::vector<std::vector<double>> trace(k);
  for (std::size_t j = 0; j < k; ++j) {
    double sum = 0.0;
    std::vector<double> rates;
    for (std::size_t w = 0; w < config.windows; ++w) {
      sum += log_r[j][w];
      trace[j].push_back(sum / (static_cast<double>(w + 1) * config.t0));
      rates.push_back(log_r[j][w] / config.t0);
    }
    lambdas[j] = trace[j].back();
    const auto tail = trace[j].begin() + static_cast<std::ptrdiff_t>(config.windows / 2);
    const auto [lo, hi] = std::minmax_element(tail, trace[j].end());
    ci[j] = std::max(0.5 * (*hi - *lo), 2.0 * standard_error(rates));
  }
  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return lambdas[a] > lambdas[b]; });
  for (std::size_t j : order) {
    rep.lambdas.push_back(lambdas[j]);
    rep.ci.push_back(ci[j]);
    rep.log_r.push_back(log_r[j]);
    rep.trace.push_back(trace[j]);
  }
  return rep;
}

}  // namespace rspde
