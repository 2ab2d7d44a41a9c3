#include "rspde/linearization.hpp"

#include "rspde/errors.hpp"

namespace rspde {

namespace {

bool noise_is_constant(const Problem& problem) {
  for (const auto& g : problem.spec().diffusion) {
    if (g.kind == Diffusion::Kind::nemytskii) return false;
  }
  return true;
}

void check_base(const MildSolution& base, std::size_t s, std::size_t t) {
  const ControlledPath& z = base.trajectory;
  if (s > t || s < z.first || t > z.last()) {
    throw ConfigError("linearization: interval not covered by the base solution");
  }
}

}  // namespace

TangentPropagator::TangentPropagator(const Problem& problem, const RoughPath& rough,
                                     const MildSolution& base)
    : problem_(problem), rough_(rough), base_(base),
      weights_(step_weights(problem.semigroup(), rough.dt())),
      constant_drift_(problem.drift_is_zero() || problem.spec().poly.empty()),
      constant_noise_(noise_is_constant(problem)) {
  if (rough.channels() != problem.channels()) throw ConfigError("linearization: channel mismatch");
  const auto d = static_cast<Eigen::Index>(problem.dofs());
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(d);
  if (constant_drift_) {
    drift_matrix_ = problem.drift_jacobian(zero);
    implicit_lu_.compute(Eigen::MatrixXd::Identity(d, d) - weights_.right.asDiagonal() * drift_matrix_);
  }
  if (constant_noise_) {
    const std::size_t n = problem.channels();
    for (std::size_t i = 0; i < n; ++i) noise_matrix_.push_back(problem.noise_jacobian(i, zero));
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t l = 0; l < n; ++l) noise_product_.push_back(noise_matrix_[i] * noise_matrix_[l]);
    }
  }
}

Eigen::MatrixXd TangentPropagator::drift_jacobian(std::size_t j) const {
  if (constant_drift_) return drift_matrix_;
  return problem_.drift_jacobian(base_.trajectory.at(j).coeffs());
}

Eigen::MatrixXd TangentPropagator::step_matrix(std::size_t j) const {
  check_base(base_, j, j + 1);
  const auto d = static_cast<Eigen::Index>(problem_.dofs());
  const std::size_t n = problem_.channels();
  Eigen::MatrixXd noise = Eigen::MatrixXd::Zero(d, d);
  if (!problem_.diffusion_is_zero()) {
    const Eigen::VectorXd dx = rough_.increment(j, j + 1);
    const double* levy = rough_.segment(j);
    if (constant_noise_) {
      for (std::size_t i = 0; i < n; ++i) {
        noise += dx(static_cast<Eigen::Index>(i)) * noise_matrix_[i];
        for (std::size_t l = 0; l < n; ++l) noise += levy[l * n + i] * noise_product_[i * n + l];
      }
    } else {
      const Eigen::VectorXd u = base_.trajectory.at(j).coeffs();
      std::vector<Eigen::MatrixXd> dg;
      for (std::size_t i = 0; i < n; ++i) dg.push_back(problem_.noise_jacobian(i, u));
      for (std::size_t i = 0; i < n; ++i) {
        noise += dx(static_cast<Eigen::Index>(i)) * dg[i];
        for (std::size_t l = 0; l < n; ++l) {
          const double a = levy[l * n + i];
          if (a == 0.0) continue;
          noise += a * (problem_.noise_second_matrix(i, u, base_.trajectory.derivative[l].col(
                                                                static_cast<Eigen::Index>(j - base_.trajectory.first))) +
                        dg[i] * dg[l]);
        }
      }
    }
  }
  Eigen::MatrixXd explicit_part = weights_.decay.asDiagonal() * (Eigen::MatrixXd::Identity(d, d) + noise);
  if (problem_.drift_is_zero()) return explicit_part;
  explicit_part += weights_.left.asDiagonal() * drift_jacobian(j);
  if (constant_drift_) return implicit_lu_.solve(explicit_part);
  const Eigen::MatrixXd lhs =
      Eigen::MatrixXd::Identity(d, d) - weights_.right.asDiagonal() * drift_jacobian(j + 1);
  return lhs.partialPivLu().solve(explicit_part);
}

Eigen::MatrixXd TangentPropagator::propagate(const Eigen::MatrixXd& frame, std::size_t s,
                                             std::size_t t) const {
  check_base(base_, s, t);
  if (frame.rows() != static_cast<Eigen::Index>(problem_.dofs())) {
    throw ConfigError("linearization: frame row count differs from the truncation");
  }
  Eigen::MatrixXd out = frame;
  for (std::size_t j = s; j < t; ++j) {
    out = step_matrix(j) * out;
    if (!out.allFinite()) throw NumericalError("linearization: non-finite tangent");
  }
  return out;
}

TangentPath solve_linearized(const Problem& problem, const RoughPath& rough,
                             const MildSolution& base, const SpectralField& zeta0,
                             GridInterval interval) {
  if (!zeta0.basis() || !zeta0.basis()->compatible(*problem.basis())) {
    throw ConfigError("solve_linearized: zeta0 lives on a different basis");
  }
  if (interval.first > interval.last) throw ConfigError("solve_linearized: empty interval");
  check_base(base, interval.first, interval.last);
  const TangentPropagator prop(problem, rough, base);
  const auto d = static_cast<Eigen::Index>(problem.dofs());
  const auto cols = static_cast<Eigen::Index>(interval.steps() + 1);
  TangentPath out;
  ControlledPath& z = out.trajectory;
  z.basis = problem.basis();
  z.first = interval.first;
  z.alpha = problem.alpha();
  z.gamma = problem.gamma();
  z.values.resize(d, cols);
  z.values.col(0) = zeta0.coeffs();
  for (Eigen::Index j = 0; j + 1 < cols; ++j) {
    z.values.col(j + 1) = prop.step_matrix(interval.first + static_cast<std::size_t>(j)) * z.values.col(j);
  }
  for (std::size_t i = 0; i < problem.channels(); ++i) {
    Eigen::MatrixXd der(d, cols);
    for (Eigen::Index j = 0; j < cols; ++j) {
      der.col(j) = problem.noise_derivative(i, base.trajectory.at(interval.first + static_cast<std::size_t>(j)).coeffs(),
                                            z.values.col(j));
    }
    z.derivative.push_back(std::move(der));
  }
  return out;
}

double tangent_residual(const Problem& problem, const RoughPath& rough, const MildSolution& base,
                        const TangentPath& tangent, std::size_t s, std::size_t t) {
  const ControlledPath& zeta = tangent.trajectory;
  if (s > t || s < zeta.first || t > zeta.last()) throw ConfigError("tangent_residual: bad checkpoints");
  check_base(base, s, t);
  const Semigroup& sg = problem.semigroup();
  const StepWeights w = step_weights(sg, rough.dt());
  const double tt = rough.time(t);
  Eigen::VectorXd r = zeta.at(t).coeffs() - sg.factors(tt - rough.time(s)).cwiseProduct(zeta.at(s).coeffs());
  if (!problem.drift_is_zero()) {
    for (std::size_t j = s; j < t; ++j) {
      const Eigen::VectorXd a = problem.drift_jacobian(base.trajectory.at(j).coeffs()) * zeta.at(j).coeffs();
      const Eigen::VectorXd b = problem.drift_jacobian(base.trajectory.at(j + 1).coeffs()) * zeta.at(j + 1).coeffs();
      r -= sg.factors(tt - rough.time(j + 1)).cwiseProduct(w.left.cwiseProduct(a) + w.right.cwiseProduct(b));
    }
  }
  const std::size_t n = problem.channels();
  if (n > 0 && t > s) {
    const auto d = static_cast<Eigen::Index>(problem.dofs());
    const auto cols = static_cast<Eigen::Index>(t - s + 1);
    std::vector<ControlledPath> integrand;
    for (std::size_t i = 0; i < n; ++i) {
      ControlledPath cp;
      cp.basis = problem.basis();
      cp.first = s;
      cp.alpha = problem.alpha();
      cp.gamma = problem.gamma();
      cp.values.resize(d, cols);
      cp.derivative.assign(n, Eigen::MatrixXd(d, cols));
      for (Eigen::Index j = 0; j < cols; ++j) {
        const std::size_t g = s + static_cast<std::size_t>(j);
        const Eigen::VectorXd u = base.trajectory.at(g).coeffs();
        const Eigen::VectorXd v = zeta.at(g).coeffs();
        cp.values.col(j) = problem.noise_derivative(i, u, v);
        for (std::size_t l = 0; l < n; ++l) {
          const Eigen::VectorXd gl = problem.noise(l, u);
          cp.derivative[l].col(j) = problem.noise_second(i, u, gl, v) +
                                    problem.noise_derivative(i, u, problem.noise_derivative(l, u, v));
        }
      }
      integrand.push_back(std::move(cp));
    }
    r -= grid_sewing_sum(integrand, rough, sg, s, t).coeffs();
  }
  return norm_alpha(*problem.basis(), r, problem.alpha());
}

Eigen::MatrixXd build_cocycle_matrix(const Problem& problem, const RoughPath& rough,
                                     const MildSolution& base, GridInterval window, std::size_t K) {
  const std::size_t d = problem.dofs();
  if (K == 0 || K > d) throw ConfigError("build_cocycle_matrix: K must lie in [1, dofs]");
  const TangentPropagator prop(problem, rough, base);
  const auto dd = static_cast<Eigen::Index>(d);
  const Eigen::MatrixXd full = prop.propagate(Eigen::MatrixXd::Identity(dd, dd), window.first, window.last);
  const auto k = static_cast<Eigen::Index>(K);
  return full.topLeftCorner(k, k);
}

}  // namespace rspde
