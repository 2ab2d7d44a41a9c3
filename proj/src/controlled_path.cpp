#include "rspde/controlled_path.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "rspde/errors.hpp"

namespace rspde {

namespace {

Eigen::Index col(const ControlledPath& p, std::size_t grid_index) {
  if (grid_index < p.first || grid_index > p.last()) {
    throw ConfigError("ControlledPath: grid index outside the path");
  }
  return static_cast<Eigen::Index>(grid_index - p.first);
}

void check_integrand(std::span<const ControlledPath> integrand, const RoughPath& rough,
                     std::size_t s, std::size_t t) {
  if (integrand.size() != rough.channels()) {
    throw ConfigError("sewing: need one integrand per noise channel");
  }
  for (const auto& cp : integrand) {
    cp.check(rough);
    if (s < cp.first || t > cp.last() || s > t) throw ConfigError("sewing: interval outside the integrand");
  }
}

// Y_u dX^i_{u,v} + sum_l Y'_{i,l}(u) XX^{l,i}_{u,v}, summed over channels i.
Eigen::VectorXd local_germ(std::span<const ControlledPath> integrand, const ChenWalker& walker) {
  const std::size_t n = integrand.size();
  const std::size_t u = walker.left();
  Eigen::VectorXd out = Eigen::VectorXd::Zero(integrand[0].values.rows());
  for (std::size_t i = 0; i < n; ++i) {
    const ControlledPath& cp = integrand[i];
    const Eigen::Index c = static_cast<Eigen::Index>(u - cp.first);
    out += walker.first()[i] * cp.values.col(c);
    for (std::size_t l = 0; l < n; ++l) {
      out += walker.second()[l * n + i] * cp.derivative[l].col(c);
    }
  }
  return out;
}

std::array<double, 3> graded_norms(const Basis& basis, const Eigen::VectorXd& v, double alpha, double gamma) {
  return {norm_alpha(basis, v, alpha), norm_alpha(basis, v, alpha - gamma),
          norm_alpha(basis, v, alpha - 2.0 * gamma)};
}

}  // namespace

SpectralField ControlledPath::at(std::size_t grid_index) const {
  return SpectralField(basis, values.col(col(*this, grid_index)));
}

SpectralField ControlledPath::derivative_at(std::size_t grid_index, std::size_t channel) const {
  return SpectralField(basis, derivative.at(channel).col(col(*this, grid_index)));
}

SpectralField ControlledPath::remainder(const RoughPath& rough, std::size_t s, std::size_t t) const {
  Eigen::VectorXd r = values.col(col(*this, t)) - values.col(col(*this, s));
  const Eigen::VectorXd dx = rough.increment(s, t);
  for (std::size_t i = 0; i < derivative.size(); ++i) {
    r -= dx(static_cast<Eigen::Index>(i)) * derivative[i].col(col(*this, s));
  }
  return SpectralField(basis, std::move(r));
}

void ControlledPath::check(const RoughPath& rough) const {
  if (!basis) throw ConfigError("ControlledPath: missing basis");
  if (values.rows() != static_cast<Eigen::Index>(basis->dofs()) || values.cols() < 1) {
    throw ConfigError("ControlledPath: value matrix shape does not match the basis");
  }
  if (derivative.size() != rough.channels()) {
    throw ConfigError("ControlledPath: derivative channel count does not match the rough path");
  }
  for (const auto& d : derivative) {
    if (d.rows() != values.rows() || d.cols() != values.cols()) {
      throw ConfigError("ControlledPath: derivative shape mismatch");
    }
  }
  if (last() > rough.steps()) throw ConfigError("ControlledPath: extends beyond the rough path grid");
}

DNorm dnorm(const ControlledPath& path, const RoughPath& rough, GridInterval interval) {
  path.check(rough);
  if (interval.first >= interval.last || interval.first < path.first || interval.last > path.last()) {
    throw ConfigError("dnorm: empty interval or interval outside the path");
  }
  const Basis& basis = *path.basis;
  const double a = path.alpha;
  const double g = path.gamma;
  const Eigen::VectorXd w0 = basis.weights(a);
  const Eigen::VectorXd w1 = basis.weights(a - g);
  const Eigen::VectorXd w2 = basis.weights(a - 2.0 * g);
  const std::size_t n = path.channels();
  const auto c0 = static_cast<Eigen::Index>(interval.first - path.first);
  const auto len = static_cast<Eigen::Index>(interval.steps() + 1);

  const Eigen::MatrixXd z = path.values.middleCols(c0, len);
  const Eigen::MatrixXd z1 = w1.asDiagonal() * z;
  const Eigen::MatrixXd z2 = w2.asDiagonal() * z;
  std::vector<Eigen::MatrixXd> d1(n), d2(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Eigen::MatrixXd d = path.derivative[i].middleCols(c0, len);
    d1[i] = w1.asDiagonal() * d;
    d2[i] = w2.asDiagonal() * d;
  }

  DNorm out;
  for (Eigen::Index j = 0; j < len; ++j) {
    out.sup = std::max(out.sup, w0.cwiseProduct(z.col(j)).norm());
    for (std::size_t i = 0; i < n; ++i) out.derivative = std::max(out.derivative, d1[i].col(j).norm());
  }

  std::vector<double> tg(static_cast<std::size_t>(len)), t2g(static_cast<std::size_t>(len));
  for (Eigen::Index k = 1; k < len; ++k) {
    tg[static_cast<std::size_t>(k)] = std::pow(static_cast<double>(k) * rough.dt(), g);
    t2g[static_cast<std::size_t>(k)] = std::pow(static_cast<double>(k) * rough.dt(), 2.0 * g);
  }
  const RowMatrix& xv = rough.base().values();
  Eigen::VectorXd r1(z.rows()), r2(z.rows());
  double hoelder_derivative = 0.0;
  double rem = 0.0;
  for (Eigen::Index s = 0; s < len; ++s) {
    const auto gs = static_cast<Eigen::Index>(interval.first) + s;
    for (Eigen::Index t = s + 1; t < len; ++t) {
      const auto gt = static_cast<Eigen::Index>(interval.first) + t;
      const auto lag = static_cast<std::size_t>(t - s);
      r1 = z1.col(t) - z1.col(s);
      r2 = z2.col(t) - z2.col(s);
      for (std::size_t i = 0; i < n; ++i) {
        const double dx = xv(gt, static_cast<Eigen::Index>(i)) - xv(gs, static_cast<Eigen::Index>(i));
        r1.noalias() -= dx * d1[i].col(s);
        r2.noalias() -= dx * d2[i].col(s);
        hoelder_derivative = std::max(hoelder_derivative, (d2[i].col(t) - d2[i].col(s)).norm() / tg[lag]);
      }
      rem = std::max({rem, r1.norm() / tg[lag], r2.norm() / t2g[lag]});
    }
  }
  out.derivative = std::max(out.derivative, hoelder_derivative);
  out.remainder = rem;
  out.value = out.sup + out.derivative + out.remainder;
  return out;
}

double increment_hoelder(const ControlledPath& path, const RoughPath& rough, GridInterval interval) {
  path.check(rough);
  if (interval.first >= interval.last || interval.first < path.first || interval.last > path.last()) {
    throw ConfigError("increment_hoelder: empty interval or interval outside the path");
  }
  const Eigen::VectorXd w1 = path.basis->weights(path.alpha - path.gamma);
  double out = 0.0;
  for (std::size_t s = interval.first; s < interval.last; ++s) {
    for (std::size_t t = s + 1; t <= interval.last; ++t) {
      const double d = w1.cwiseProduct(path.values.col(col(path, t)) - path.values.col(col(path, s))).norm();
      out = std::max(out, d / std::pow(static_cast<double>(t - s) * rough.dt(), path.gamma));
    }
  }
  return out;
}

SewingResult sewing_integral(std::span<const ControlledPath> integrand, const RoughPath& rough,
                             const Semigroup& semigroup, std::size_t s, std::size_t t,
                             unsigned levels) {
  check_integrand(integrand, rough, s, t);
  const std::size_t steps = t - s;
  if (steps == 0) {
    SewingResult r{SpectralField::zero(integrand[0].basis), {}};
    return r;
  }
  if (levels >= 63 || (std::size_t{1} << levels) > steps) {
    throw ConfigError("sewing_integral: insufficient grid resolution for the requested depth");
  }
  if (steps % (std::size_t{1} << levels) != 0) {
    std::ostringstream msg;
    msg << "sewing_integral: interval of " << steps << " grid steps is not dyadic at depth " << levels;
    throw ConfigError(msg.str());
  }
  const Basis& basis = *integrand[0].basis;
  const double alpha = integrand[0].alpha;
  const double gamma = integrand[0].gamma;
  const double t_end = rough.time(t);

  std::vector<Eigen::VectorXd> gammas;
  for (unsigned m = 0; m <= levels; ++m) {
    const std::size_t pieces = std::size_t{1} << m;
    const std::size_t stride = steps / pieces;
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(basis.dofs()));
    for (std::size_t p = 0; p < pieces; ++p) {
      const std::size_t u = s + p * stride;
      ChenWalker walker(rough, u);
      while (walker.right() < u + stride) walker.advance();
      sum += semigroup.factors(t_end - rough.time(u)).cwiseProduct(local_germ(integrand, walker));
    }
    gammas.push_back(std::move(sum));
  }
  SewingResult out{SpectralField(integrand[0].basis, gammas.back()), {}};
  for (unsigned m = 0; m < levels; ++m) {
    out.level_defects.push_back(graded_norms(basis, gammas[m + 1] - gammas[m], alpha, gamma));
  }
  return out;
}

SpectralField grid_sewing_sum(std::span<const ControlledPath> integrand, const RoughPath& rough,
                              const Semigroup& semigroup, std::size_t s, std::size_t t) {
  check_integrand(integrand, rough, s, t);
  const double t_end = rough.time(t);
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(integrand[0].basis->dofs()));
  for (std::size_t u = s; u < t; ++u) {
    ChenWalker walker(rough, u);
    walker.advance();
    sum += semigroup.factors(t_end - rough.time(u)).cwiseProduct(local_germ(integrand, walker));
  }
  return SpectralField(integrand[0].basis, std::move(sum));
}

std::array<double, 3> local_expansion_defect(std::span<const ControlledPath> integrand,
                                             const RoughPath& rough, const Semigroup& semigroup,
                                             std::size_t s, std::size_t t) {
  check_integrand(integrand, rough, s, t);
  if (s == t) return {0.0, 0.0, 0.0};
  const SpectralField integral = grid_sewing_sum(integrand, rough, semigroup, s, t);
  ChenWalker walker(rough, s);
  while (walker.right() < t) walker.advance();
  const Eigen::VectorXd germ =
      semigroup.factors(rough.time(t) - rough.time(s)).cwiseProduct(local_germ(integrand, walker));
  return graded_norms(*integrand[0].basis, integral.coeffs() - germ, integrand[0].alpha, integrand[0].gamma);
}

}  // namespace rspde
