#include "rspde/problem.hpp"

#include <cmath>
#include <sstream>

#include "rspde/errors.hpp"

namespace rspde {

std::string to_string(ScalarMap f) {
  switch (f) {
    case ScalarMap::identity: return "identity";
    case ScalarMap::sine: return "sin";
    case ScalarMap::tanh: return "tanh";
    case ScalarMap::cube: return "cube";
  }
  return "identity";
}

ScalarMap scalar_map_from_string(const std::string& name) {
  if (name == "identity" || name == "u") return ScalarMap::identity;
  if (name == "sin") return ScalarMap::sine;
  if (name == "tanh") return ScalarMap::tanh;
  if (name == "cube") return ScalarMap::cube;
  throw ConfigError("unknown scalar map '" + name + "' (expected identity, sin, tanh or cube)");
}

double scalar_value(ScalarMap f, double u) {
  switch (f) {
    case ScalarMap::identity: return u;
    case ScalarMap::sine: return std::sin(u);
    case ScalarMap::tanh: return std::tanh(u);
    case ScalarMap::cube: return u * u * u;
  }
  return u;
}

double scalar_first(ScalarMap f, double u) {
  switch (f) {
    case ScalarMap::identity: return 1.0;
    case ScalarMap::sine: return std::cos(u);
    case ScalarMap::tanh: {
      const double c = std::cosh(u);
      return 1.0 / (c * c);
    }
    case ScalarMap::cube: return 3.0 * u * u;
  }
  return 1.0;
}

double scalar_second(ScalarMap f, double u) {
  switch (f) {
    case ScalarMap::identity: return 0.0;
    case ScalarMap::sine: return -std::sin(u);
    case ScalarMap::tanh: {
      const double c = std::cosh(u);
      return -2.0 * std::tanh(u) / (c * c);
    }
    case ScalarMap::cube: return 6.0 * u;
  }
  return 0.0;
}

std::string to_string(Diffusion::Kind kind) {
  switch (kind) {
    case Diffusion::Kind::zero: return "zero";
    case Diffusion::Kind::additive: return "additive";
    case Diffusion::Kind::linear: return "linear";
    case Diffusion::Kind::nemytskii: return "nemytskii";
  }
  return "zero";
}

Diffusion::Kind diffusion_kind_from_string(const std::string& name) {
  if (name == "zero") return Diffusion::Kind::zero;
  if (name == "additive") return Diffusion::Kind::additive;
  if (name == "linear") return Diffusion::Kind::linear;
  if (name == "nemytskii") return Diffusion::Kind::nemytskii;
  throw ConfigError("unknown diffusion kind '" + name + "' (expected zero, additive, linear or nemytskii)");
}

GrowthDegrees growth_degrees(const ProblemSpec& spec) {
  GrowthDegrees d;
  for (std::size_t k = spec.poly.size(); k-- > 2;) {
    if (spec.poly[k] != 0.0) {
      d.drift = k - 1;
      break;
    }
  }
  for (const auto& g : spec.diffusion) {
    if (g.kind == Diffusion::Kind::nemytskii && g.map == ScalarMap::cube) d.noise = 2;
  }
  return d;
}

std::vector<Violation> validate(const ProblemSpec& spec) {
  std::vector<Violation> out;
  auto add = [&](const std::string& c, const std::string& m) { out.push_back({c, m}); };
  std::ostringstream v;
  v << "(sigma=" << spec.sigma << ", eta=" << spec.eta << ", theta=" << spec.theta
    << ", gamma=" << spec.gamma << ")";
  const std::string values = v.str();
  if (!spec.basis) add("basis", "no spectral basis configured");
  if (!(spec.sigma >= 0.0)) add("0≤σ", "drift exponent sigma must be nonnegative " + values);
  if (!(spec.sigma < 1.0)) add("σ<1", "drift exponent sigma must be below 1 " + values);
  if (!(spec.eta >= 0.0)) add("0≤η", "diffusion exponent eta must be nonnegative " + values);
  if (!(spec.eta < spec.gamma)) add("η<γ", "diffusion exponent eta must be below gamma " + values);
  if (!(spec.theta >= 0.0)) add("0≤θ", "theta must be nonnegative " + values);
  if (!(spec.theta <= 2.0 * spec.gamma)) add("θ≤2γ", "theta must not exceed 2 gamma " + values);
  if (!(spec.gamma > 1.0 / 3.0 && spec.gamma <= 0.5)) {
    add("1/3<γ≤1/2", "rough regime requires 1/3 < gamma <= 1/2 " + values);
  }
  if (!(spec.diffusivity >= 0.0)) add("0≤ν", "diffusivity must be nonnegative");
  for (std::size_t j = 0; j < spec.linear.size(); ++j) {
    const auto& term = spec.linear[j];
    if (!(term.beta >= 0.0 && term.beta <= spec.sigma)) {
      std::ostringstream m;
      m << "linear drift term " << j << " has beta=" << term.beta << " outside [0, sigma]";
      add("0≤β≤σ", m.str());
    }
    if (spec.basis && term.potential.basis() && !term.potential.basis()->shares_grid(*spec.basis)) {
      add("basis", "linear drift term " + std::to_string(j) + " lives on a different basis");
    }
  }
  for (std::size_t i = 0; i < spec.diffusion.size(); ++i) {
    const auto& d = spec.diffusion[i];
    if (d.kind == Diffusion::Kind::linear && !(d.eta >= 0.0 && d.eta <= spec.eta)) {
      std::ostringstream m;
      m << "channel " << i << " multiplier power " << d.eta << " outside [0, eta]";
      add("0≤η_G≤η", m.str());
    }
    if (d.kind != Diffusion::Kind::zero) {
      if (!d.field.basis()) {
        add("basis", "channel " + std::to_string(i) + " has no coefficient field");
      } else if (spec.basis && d.kind == Diffusion::Kind::additive && !d.field.basis()->compatible(*spec.basis)) {
        add("basis", "channel " + std::to_string(i) + " lives on a different basis");
      } else if (spec.basis && !d.field.basis()->shares_grid(*spec.basis)) {
        add("basis", "channel " + std::to_string(i) + " lives on a different basis");
      }
    }
  }
  return out;
}

namespace {

Eigen::MatrixXd multiplier_on(const Basis& basis, const SpectralField& g, double eta) {
  return grid_multiplication_matrix(basis, g.grid_values()) * basis.fractional_laplacian(eta).asDiagonal();
}

}  // namespace

Problem::Problem(ProblemSpec spec) : spec_(std::move(spec)) {
  const auto violations = validate(spec_);
  if (!violations.empty()) {
    std::ostringstream msg;
    msg << "problem violates";
    for (const auto& v : violations) msg << " [" << v.constraint << ": " << v.message << "]";
    throw ConfigError(msg.str());
  }
  semigroup_ = Semigroup(spec_.basis, spec_.diffusivity);
  const auto d = static_cast<Eigen::Index>(dofs());
  linear_matrix_ = Eigen::MatrixXd::Zero(d, d);
  for (const auto& term : spec_.linear) {
    linear_matrix_ += multiplier_on(*spec_.basis, term.potential, term.beta);
    has_linear_ = true;
  }
  for (double a : spec_.poly) has_poly_ = has_poly_ || a != 0.0;
  for (const auto& g : spec_.diffusion) {
    noise_matrix_.push_back(g.kind == Diffusion::Kind::linear ? multiplier_on(*spec_.basis, g.field, g.eta)
                                                               : Eigen::MatrixXd());
    amplitude_grid_.push_back(g.kind == Diffusion::Kind::nemytskii ? g.field.grid_values()
                                                                    : Eigen::VectorXd());
  }
}

bool Problem::diffusion_is_zero() const {
  for (const auto& g : spec_.diffusion) {
    if (g.kind != Diffusion::Kind::zero && g.field.coeffs().cwiseAbs().maxCoeff() > 0.0) return false;
  }
  return true;
}

bool Problem::zero_is_stationary() const {
  if (!spec_.poly.empty() && spec_.poly[0] != 0.0) return false;
  for (const auto& g : spec_.diffusion) {
    if (g.kind == Diffusion::Kind::additive && g.field.coeffs().cwiseAbs().maxCoeff() > 0.0) return false;
    if (g.kind == Diffusion::Kind::nemytskii && scalar_value(g.map, 0.0) != 0.0) return false;
  }
  return true;
}

namespace {

double poly_value(const std::vector<double>& a, double u) {
  double r = 0.0;
  for (std::size_t k = a.size(); k-- > 0;) r = r * u + a[k];
  return r;
}

double poly_derivative(const std::vector<double>& a, double u) {
  double r = 0.0;
  for (std::size_t k = a.size(); k-- > 1;) r = r * u + static_cast<double>(k) * a[k];
  return r;
}

void check_finite(const Eigen::VectorXd& v, const char* who) {
  if (!v.allFinite()) throw NumericalError(std::string(who) + ": non-finite value");
}

}  // namespace

Eigen::VectorXd Problem::drift(const Eigen::VectorXd& u) const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(u.size());
  if (has_linear_) out.noalias() += linear_matrix_ * u;
  if (has_poly_) {
    const Basis& b = *spec_.basis;
    Eigen::VectorXd grid = b.synthesis() * u;
    for (Eigen::Index j = 0; j < grid.size(); ++j) grid(j) = poly_value(spec_.poly, grid(j));
    check_finite(grid, "drift");
    out.noalias() += b.analysis() * grid;
  }
  return out;
}

Eigen::MatrixXd Problem::drift_jacobian(const Eigen::VectorXd& u) const {
  Eigen::MatrixXd out = linear_matrix_;
  if (has_poly_) {
    const Basis& b = *spec_.basis;
    Eigen::VectorXd grid = b.synthesis() * u;
    for (Eigen::Index j = 0; j < grid.size(); ++j) grid(j) = poly_derivative(spec_.poly, grid(j));
    check_finite(grid, "drift_jacobian");
    out += grid_multiplication_matrix(b, grid);
  }
  return out;
}

Eigen::VectorXd Problem::noise(std::size_t channel, const Eigen::VectorXd& u) const {
  const Diffusion& g = spec_.diffusion.at(channel);
  switch (g.kind) {
    case Diffusion::Kind::zero: return Eigen::VectorXd::Zero(u.size());
    case Diffusion::Kind::additive: return g.field.coeffs();
    case Diffusion::Kind::linear: return noise_matrix_[channel] * u;
    case Diffusion::Kind::nemytskii: {
      const Basis& b = *spec_.basis;
      Eigen::VectorXd grid = b.synthesis() * u;
      for (Eigen::Index j = 0; j < grid.size(); ++j) {
        grid(j) = amplitude_grid_[channel](j) * scalar_value(g.map, grid(j));
      }
      check_finite(grid, "noise");
      return b.analysis() * grid;
    }
  }
  return Eigen::VectorXd::Zero(u.size());
}

Eigen::VectorXd Problem::noise_derivative(std::size_t channel, const Eigen::VectorXd& u,
                                          const Eigen::VectorXd& v) const {
  const Diffusion& g = spec_.diffusion.at(channel);
  switch (g.kind) {
    case Diffusion::Kind::zero:
    case Diffusion::Kind::additive: return Eigen::VectorXd::Zero(u.size());
    case Diffusion::Kind::linear: return noise_matrix_[channel] * v;
    case Diffusion::Kind::nemytskii: {
      const Basis& b = *spec_.basis;
      const Eigen::VectorXd gu = b.synthesis() * u;
      Eigen::VectorXd gv = b.synthesis() * v;
      for (Eigen::Index j = 0; j < gv.size(); ++j) {
        gv(j) *= amplitude_grid_[channel](j) * scalar_first(g.map, gu(j));
      }
      return b.analysis() * gv;
    }
  }
  return Eigen::VectorXd::Zero(u.size());
}

Eigen::MatrixXd Problem::noise_jacobian(std::size_t channel, const Eigen::VectorXd& u) const {
  const Diffusion& g = spec_.diffusion.at(channel);
  const auto d = static_cast<Eigen::Index>(dofs());
  switch (g.kind) {
    case Diffusion::Kind::zero:
    case Diffusion::Kind::additive: return Eigen::MatrixXd::Zero(d, d);
    case Diffusion::Kind::linear: return noise_matrix_[channel];
    case Diffusion::Kind::nemytskii: {
      const Basis& b = *spec_.basis;
      Eigen::VectorXd grid = b.synthesis() * u;
      for (Eigen::Index j = 0; j < grid.size(); ++j) {
        grid(j) = amplitude_grid_[channel](j) * scalar_first(g.map, grid(j));
      }
      return grid_multiplication_matrix(b, grid);
    }
  }
  return Eigen::MatrixXd::Zero(d, d);
}

Eigen::VectorXd Problem::noise_second(std::size_t channel, const Eigen::VectorXd& u,
                                      const Eigen::VectorXd& v, const Eigen::VectorXd& w) const {
  const Diffusion& g = spec_.diffusion.at(channel);
  if (g.kind != Diffusion::Kind::nemytskii) return Eigen::VectorXd::Zero(u.size());
  const Basis& b = *spec_.basis;
  const Eigen::VectorXd gu = b.synthesis() * u;
  const Eigen::VectorXd gv = b.synthesis() * v;
  Eigen::VectorXd gw = b.synthesis() * w;
  for (Eigen::Index j = 0; j < gw.size(); ++j) {
    gw(j) *= gv(j) * amplitude_grid_[channel](j) * scalar_second(g.map, gu(j));
  }
  return b.analysis() * gw;
}

Eigen::MatrixXd Problem::noise_second_matrix(std::size_t channel, const Eigen::VectorXd& u,
                                             const Eigen::VectorXd& v) const {
  const Diffusion& g = spec_.diffusion.at(channel);
  const auto d = static_cast<Eigen::Index>(dofs());
  if (g.kind != Diffusion::Kind::nemytskii) return Eigen::MatrixXd::Zero(d, d);
  const Basis& b = *spec_.basis;
  const Eigen::VectorXd gu = b.synthesis() * u;
  Eigen::VectorXd gv = b.synthesis() * v;
  for (Eigen::Index j = 0; j < gv.size(); ++j) {
    gv(j) *= amplitude_grid_[channel](j) * scalar_second(g.map, gu(j));
  }
  return grid_multiplication_matrix(b, gv);
}

}  // namespace rspde
