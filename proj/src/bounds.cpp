#include "rspde/bounds.hpp"

#include <algorithm>
#include <cmath>

#include "rspde/errors.hpp"

namespace rspde {

BoundReport apriori_bound(const MildSolution& solution, const RoughPath& rough,
                          const SolverConfig& config, std::size_t dnorm_max_steps) {
  const ControlledPath& z = solution.trajectory;
  const GridInterval iv = solution.interval();
  const double gamma = z.gamma;
  BoundReport r;
  r.epsilon = solution.epsilon;
  r.eta1 = solution.partition.eta1;
  r.chi = solution.partition.chi > 0.0 ? solution.partition.chi : config.chi;
  r.N = solution.partition.count();
  if (r.N == 0) throw ConfigError("apriori_bound: solution carries no partition");

  const HoelderNorms norms = hoelder_norms(rough, gamma, iv);
  r.x = norms.path;
  r.y = norms.second;
  r.P_value = rough_polynomial(norms);

  const Eigen::VectorXd w = z.basis->weights(z.alpha);
  const auto& pts = solution.partition.points;
  double m = 1.0;
  for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
    const double d = dnorm(z, rough, {pts[k], pts[k + 1]}).value;
    r.interval_dnorms.push_back(d);
    const double start = w.cwiseProduct(z.values.col(static_cast<Eigen::Index>(pts[k] - z.first))).norm();
    m = std::max(m, d / (2.0 * (start + r.P_value)));
  }
  r.M_eps = m;
  r.M_tilde = std::log(2.0 * m);
  r.step_condition = m * std::pow(r.chi, gamma - r.eta1) <= 0.25;

  const double z0 = w.cwiseProduct(z.values.col(0)).norm();
  const double n = static_cast<double>(r.N);
  r.bound = std::exp(n * r.M_tilde) * z0 +
            (std::exp((n + 1.0) * r.M_tilde) - 1.0) / (2.0 * m - 1.0) * r.P_value;
  r.observed = sup_norm(solution);
  r.holds = r.observed <= r.bound;

  const double base = n * (1.0 + r.x) * r.bound;
  if (iv.steps() <= dnorm_max_steps) {
    r.observed_dnorm = dnorm(z, rough, iv).value;
    r.glue = std::max(1.0, r.observed_dnorm / base);
    r.bound_dnorm = r.glue * base;
    r.holds_dnorm = r.observed_dnorm <= r.bound_dnorm;
  } else {
    r.bound_dnorm = base;
  }
  return r;
}

}  // namespace rspde
